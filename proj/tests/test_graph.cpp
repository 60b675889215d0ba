#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "surfer/graph.hpp"
#include "surfer/kernels.hpp"

using namespace surfer;

namespace {

std::vector<double> dense_row(const TransitionModel& m, std::uint32_t i) {
    std::vector<double> row(m.n_nodes(), 0.0);
    for (std::uint64_t k = m.row_offsets()[i]; k < m.row_offsets()[i + 1]; ++k)
        row[m.col_indices()[k]] = m.probs()[k];
    return row;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

bool same_csr(const TransitionModel& a, const TransitionModel& b) {
    return a.n_nodes() == b.n_nodes() &&
           std::equal(a.row_offsets().begin(), a.row_offsets().end(),
                      b.row_offsets().begin(), b.row_offsets().end()) &&
           std::equal(a.col_indices().begin(), a.col_indices().end(),
                      b.col_indices().begin(), b.col_indices().end()) &&
           std::equal(a.probs().begin(), a.probs().end(), b.probs().begin(),
                      b.probs().end());
}

void check_invariants(const TransitionModel& m) {
    for (std::uint32_t i = 0; i < m.n_nodes(); ++i) {
        const std::uint64_t begin = m.row_offsets()[i], end = m.row_offsets()[i + 1];
        REQUIRE(end > begin);  // no empty rows
        double total = 0.0;
        for (std::uint64_t k = begin; k < end; ++k) {
            CHECK(m.probs()[k] > 0.0);
            if (k > begin) CHECK(m.col_indices()[k] > m.col_indices()[k - 1]);
            total += m.probs()[k];
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

}  // namespace

TEST_CASE("build_from_edges: two-node cycle") {
    const Edge edges[] = {{0, 1}, {1, 0}};
    const TransitionModel m = build_from_edges(2, edges);
    CHECK(dense_row(m, 0) == std::vector<double>{0.0, 1.0});
    CHECK(dense_row(m, 1) == std::vector<double>{1.0, 0.0});
    check_invariants(m);
}

TEST_CASE("build_from_edges: dangling nodes become uniform rows") {
    const Edge edges[] = {{0, 1}, {0, 2}};
    const TransitionModel m = build_from_edges(3, edges);
    CHECK(dense_row(m, 0) == std::vector<double>{0.0, 0.5, 0.5});
    CHECK(dense_row(m, 1) == std::vector<double>(3, 1.0 / 3.0));
    CHECK(dense_row(m, 2) == std::vector<double>(3, 1.0 / 3.0));
    check_invariants(m);
}

TEST_CASE("build_from_edges: weighted rows normalize") {
    const Edge edges[] = {{0, 1}, {0, 2}};
    const double weights[] = {3.0, 1.0};
    const TransitionModel m = build_from_edges(3, edges, weights);
    CHECK(dense_row(m, 0) == std::vector<double>{0.0, 0.75, 0.25});
}

TEST_CASE("build_from_edges: rejects bad input") {
    const Edge out_of_range[] = {{0, 3}};
    CHECK_THROWS_AS(build_from_edges(3, out_of_range), std::invalid_argument);

    const Edge dup[] = {{0, 1}, {0, 1}};
    CHECK_THROWS_AS(build_from_edges(3, dup), std::invalid_argument);

    const Edge ok[] = {{0, 1}};
    const double bad_weight[] = {-1.0};
    CHECK_THROWS_AS(build_from_edges(3, ok, bad_weight), std::invalid_argument);
    const double zero_weight[] = {0.0};
    CHECK_THROWS_AS(build_from_edges(3, ok, zero_weight), std::invalid_argument);
    const double short_weights[] = {1.0};
    const Edge two[] = {{0, 1}, {1, 2}};
    CHECK_THROWS_AS(build_from_edges(3, two, short_weights), std::invalid_argument);
}

TEST_CASE("prob() looks up entries and zeros") {
    const Edge edges[] = {{0, 1}, {0, 2}};
    const double weights[] = {3.0, 1.0};
    const TransitionModel m = build_from_edges(3, edges, weights);
    CHECK(m.prob(0, 1) == 0.75);
    CHECK(m.prob(0, 0) == 0.0);
    CHECK(m.prob(1, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("transpose mirrors the forward matrix") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 23;
    spec.degree_min = 1;
    spec.degree_max = 6;
    spec.seed = 11;
    const TransitionModel m = generate(spec);
    const kernels::Csr& t = m.transposed();
    REQUIRE(t.n_rows == m.n_nodes());
    for (std::uint32_t i = 0; i < m.n_nodes(); ++i) {
        for (std::uint64_t k = t.row_offsets[i]; k < t.row_offsets[i + 1]; ++k) {
            CHECK(m.prob(t.col_indices[k], i) == t.values[k]);
        }
    }
    std::size_t nnz = 0;
    for (std::uint32_t i = 0; i < m.n_nodes(); ++i)
        nnz += t.row_offsets[i + 1] - t.row_offsets[i];
    CHECK(nnz == m.probs().size());
}

TEST_CASE("generate: single node with degree 0 becomes a self loop") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 1;
    spec.degree_min = 0;
    spec.degree_max = 0;
    spec.seed = 7;
    const TransitionModel m = generate(spec);
    CHECK(dense_row(m, 0) == std::vector<double>{1.0});
}

TEST_CASE("generate: pure function of the spec") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 50;
    spec.degree_min = 2;
    spec.degree_max = 8;
    spec.seed = 1;
    const TransitionModel a = generate(spec);
    const TransitionModel b = generate(spec);
    CHECK(same_csr(a, b));
    check_invariants(a);

    spec.seed = 2;
    const TransitionModel c = generate(spec);
    CHECK(!same_csr(a, c));
}

TEST_CASE("generate: rejects invalid parameters") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 5;
    spec.degree_min = 3;
    spec.degree_max = 2;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec.degree_min = 1;
    spec.degree_max = 5;  // > n-1
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);

    spec.kind = GraphSpec::Kind::power_law_out_degree;
    spec.exponent = 1.0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("generate: power-law out-degrees fit the requested exponent") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::power_law_out_degree;
    spec.n_nodes = 200;
    spec.exponent = 2.1;
    spec.seed = 3;
    const TransitionModel m = generate(spec);
    check_invariants(m);

    // discrete maximum-likelihood exponent over the out-degrees; dangling
    // repair never fires here because power-law degrees start at 1
    double log_sum = 0.0;
    std::size_t count = 0;
    for (std::uint32_t i = 0; i < m.n_nodes(); ++i) {
        log_sum += std::log(static_cast<double>(m.out_degree(i)) / 0.5);
        ++count;
    }
    const double alpha_hat = 1.0 + static_cast<double>(count) / log_sum;
    CHECK(std::abs(alpha_hat - 2.1) <= 0.3);
}

TEST_CASE("generate: zipf target bias concentrates in-links on low ids") {
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 100;
    spec.degree_min = 4;
    spec.degree_max = 8;
    spec.seed = 9;
    spec.target_zipf = 1.5;
    const TransitionModel m = generate(spec);
    check_invariants(m);
    std::vector<std::size_t> in_degree(m.n_nodes(), 0);
    for (std::uint32_t col : m.col_indices()) in_degree[col]++;
    std::size_t low = 0, high = 0;
    for (std::size_t j = 0; j < 10; ++j) low += in_degree[j];
    for (std::size_t j = 90; j < 100; ++j) high += in_degree[j];
    CHECK(low > 3 * high);
}

TEST_CASE("edge list: minimal round trip and comments") {
    const auto path = temp_file("surfer_edges_min.txt");
    {
        std::ofstream out(path);
        out << "# tiny cycle\n2\n0 1\n# middle comment\n1 0\n";
    }
    const TransitionModel m = load_edge_list(path);
    CHECK(dense_row(m, 0) == std::vector<double>{0.0, 1.0});
    CHECK(dense_row(m, 1) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("edge list: weighted file equals in-memory construction") {
    const auto path = temp_file("surfer_edges_weighted.txt");
    {
        std::ofstream out(path);
        out << "3\n0 1 3\n0 2 1\n";
    }
    const TransitionModel loaded = load_edge_list(path);
    const Edge edges[] = {{0, 1}, {0, 2}};
    const double weights[] = {3.0, 1.0};
    const TransitionModel built = build_from_edges(3, edges, weights);
    CHECK(same_csr(loaded, built));
}

TEST_CASE("edge list: parse errors carry line numbers") {
    const auto path = temp_file("surfer_edges_bad.txt");
    {
        std::ofstream out(path);
        out << "2\n0 1\nnope\n";
    }
    try {
        load_edge_list(path);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }

    {
        std::ofstream out(path);
        out << "2\n0 5\n";
    }
    CHECK_THROWS_AS(load_edge_list(path), std::runtime_error);

    {
        std::ofstream out(path);
        out << "# only comments\n";
    }
    CHECK_THROWS_AS(load_edge_list(path), std::runtime_error);
    CHECK_THROWS_AS(load_edge_list(temp_file("surfer_no_such_file.txt")),
                    std::runtime_error);
}

TEST_CASE("edge list: save then load reproduces models bit for bit") {
    // unweighted, including a repaired dangling row
    const Edge edges[] = {{0, 1}, {0, 2}, {1, 0}};
    const TransitionModel m = build_from_edges(3, edges);
    const auto path = temp_file("surfer_edges_roundtrip.txt");
    save_edge_list(m, path);
    CHECK(same_csr(m, load_edge_list(path)));

    // generated instance
    GraphSpec spec;
    spec.kind = GraphSpec::Kind::uniform_out_degree;
    spec.n_nodes = 40;
    spec.degree_min = 1;
    spec.degree_max = 7;
    spec.seed = 4;
    const TransitionModel g = generate(spec);
    save_edge_list(g, path);
    CHECK(same_csr(g, load_edge_list(path)));
}

TEST_CASE("edge list: weighted save/load round trip stays within rounding") {
    const Edge edges[] = {{0, 1}, {0, 2}, {2, 0}};
    const double weights[] = {0.3, 1.7, 2.0};
    const TransitionModel m = build_from_edges(3, edges, weights);
    const auto path = temp_file("surfer_edges_roundtrip_w.txt");
    save_edge_list(m, path);
    const TransitionModel back = load_edge_list(path);
    REQUIRE(back.probs().size() == m.probs().size());
    for (std::size_t k = 0; k < m.probs().size(); ++k)
        CHECK(back.probs()[k] == doctest::Approx(m.probs()[k]).epsilon(1e-14));
}

TEST_CASE("google matrix validates damping") {
    const Edge edges[] = {{0, 1}, {1, 0}};
    const TransitionModel m = build_from_edges(2, edges);
    CHECK_THROWS_AS(GoogleMatrix(m, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GoogleMatrix(m, 1.0), std::invalid_argument);
    const GoogleMatrix gm(m, 0.85);
    CHECK(gm.c == 0.85);
}
