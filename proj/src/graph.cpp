#include "surfer/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "surfer/rng.hpp"

namespace surfer {

namespace {

constexpr std::size_t kMaxNodes = std::size_t{1} << 31;  // gather kernels use i32 indices

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

kernels::Csr transpose_of(const kernels::Csr& a) {
    kernels::Csr t;
    t.n_rows = a.n_cols;
    t.n_cols = a.n_rows;
    t.row_offsets.assign(t.n_rows + 1, 0);
    for (std::uint32_t col : a.col_indices) t.row_offsets[col + 1]++;
    for (std::size_t i = 0; i < t.n_rows; ++i) t.row_offsets[i + 1] += t.row_offsets[i];
    t.col_indices.resize(a.col_indices.size());
    t.values.resize(a.values.size());
    std::vector<std::uint64_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        for (std::uint64_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k) {
            const std::uint64_t p = cursor[a.col_indices[k]]++;
            t.col_indices[p] = static_cast<std::uint32_t>(i);
            t.values[p] = a.values[k];
        }
    }
    // source rows were scanned in increasing order, so each transpose row is
    // already sorted
    return t;
}

}  // namespace

double TransitionModel::prob(std::uint32_t i, std::uint32_t j) const {
    const auto begin = forward_.col_indices.begin() + static_cast<std::ptrdiff_t>(forward_.row_offsets[i]);
    const auto end = forward_.col_indices.begin() + static_cast<std::ptrdiff_t>(forward_.row_offsets[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return forward_.values[static_cast<std::size_t>(it - forward_.col_indices.begin())];
}

GoogleMatrix::GoogleMatrix(const TransitionModel& base_model, double damping)
    : base(&base_model), c(damping) {
    if (!(damping > 0.0 && damping < 1.0)) fail("damping must lie in (0, 1)");
}

TransitionModel build_from_edges(std::size_t n_nodes, std::span<const Edge> edges,
                                 std::span<const double> weights) {
    if (n_nodes == 0) fail("node count must be positive");
    if (n_nodes > kMaxNodes) fail("node count exceeds supported maximum");
    if (!weights.empty() && weights.size() != edges.size())
        fail("weight count does not match edge count");

    // 1) validate and count out-degrees
    std::vector<std::uint64_t> degree(n_nodes, 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].source >= n_nodes || edges[e].target >= n_nodes)
            fail("edge " + std::to_string(e) + " index out of range");
        if (!weights.empty() && !(weights[e] > 0.0 && std::isfinite(weights[e])))
            fail("edge " + std::to_string(e) + " weight must be positive and finite");
        degree[edges[e].source]++;
    }

    // 2) dangling rows become uniform over all nodes
    kernels::Csr m;
    m.n_rows = m.n_cols = n_nodes;
    m.row_offsets.assign(n_nodes + 1, 0);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const std::uint64_t d = degree[i] > 0 ? degree[i] : n_nodes;
        m.row_offsets[i + 1] = m.row_offsets[i] + d;
    }
    m.col_indices.resize(m.row_offsets[n_nodes]);
    m.values.resize(m.row_offsets[n_nodes]);

    // 3) scatter edges, then sort each row by column
    std::vector<std::uint64_t> cursor(m.row_offsets.begin(), m.row_offsets.end() - 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::uint64_t p = cursor[edges[e].source]++;
        m.col_indices[p] = edges[e].target;
        m.values[p] = weights.empty() ? 1.0 : weights[e];
    }
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (degree[i] == 0) {
            const double u = 1.0 / static_cast<double>(n_nodes);
            for (std::size_t j = 0; j < n_nodes; ++j) {
                m.col_indices[m.row_offsets[i] + j] = static_cast<std::uint32_t>(j);
                m.values[m.row_offsets[i] + j] = u;
            }
            continue;
        }
        const std::uint64_t begin = m.row_offsets[i], end = m.row_offsets[i + 1];
        row.clear();
        for (std::uint64_t k = begin; k < end; ++k)
            row.emplace_back(m.col_indices[k], m.values[k]);
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == row[k - 1].first)
                fail("duplicate edge (" + std::to_string(i) + ", " +
                     std::to_string(row[k].first) + ")");
        }
        // normalize: uniform rows get exactly 1/d, weighted rows w/sum(w)
        if (weights.empty()) {
            const double u = 1.0 / static_cast<double>(degree[i]);
            for (std::size_t k = 0; k < row.size(); ++k) {
                m.col_indices[begin + k] = row[k].first;
                m.values[begin + k] = u;
            }
        } else {
            double total = 0.0;
            for (const auto& [col, w] : row) total += w;
            for (std::size_t k = 0; k < row.size(); ++k) {
                m.col_indices[begin + k] = row[k].first;
                m.values[begin + k] = row[k].second / total;
            }
        }
    }

    TransitionModel model;
    model.forward_ = std::move(m);
    model.transpose_ = transpose_of(model.forward_);
    return model;
}

namespace {

// Inverse-CDF sampling over an arbitrary positive weight table.
class DiscreteCdf {
public:
    explicit DiscreteCdf(std::vector<double> weights) : cdf_(std::move(weights)) {
        std::partial_sum(cdf_.begin(), cdf_.end(), cdf_.begin());
        total_ = cdf_.back();
    }
    std::size_t draw(Rng& rng) const {
        const double u = rng.next_double() * total_;
        return static_cast<std::size_t>(
            std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    }

private:
    std::vector<double> cdf_;
    double total_ = 0.0;
};

// d distinct targets in [0, n) excluding `self`, appended to out. Rejection
// against a hash set, with a deterministic sweep fallback so pathological
// skew cannot loop forever.
void sample_targets(std::size_t d, std::size_t n, std::uint32_t self,
                    const DiscreteCdf* bias, Rng& rng,
                    std::vector<Edge>& out) {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(d * 2);
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 64 * d + 256;
    while (chosen.size() < d && attempts < attempt_cap) {
        ++attempts;
        const auto t = static_cast<std::uint32_t>(
            bias ? bias->draw(rng) : rng.next_below(n));
        if (t == self || chosen.count(t)) continue;
        chosen.insert(t);
        out.push_back(Edge{self, t});
    }
    for (std::uint32_t t = 0; chosen.size() < d; ++t) {
        if (t == self || chosen.count(t)) continue;
        chosen.insert(t);
        out.push_back(Edge{self, t});
    }
}

}  // namespace

TransitionModel generate(const GraphSpec& spec) {
    if (spec.kind == GraphSpec::Kind::edge_list) return load_edge_list(spec.path);

    const std::size_t n = spec.n_nodes;
    if (n == 0) fail("node count must be positive");
    if (n > kMaxNodes) fail("node count exceeds supported maximum");
    if (!(spec.target_zipf >= 0.0) || !std::isfinite(spec.target_zipf))
        fail("target_zipf must be a finite value >= 0");

    Rng rng(spec.seed, rng_stream::kGraphGen);

    std::vector<std::size_t> degrees(n, 0);
    if (spec.kind == GraphSpec::Kind::uniform_out_degree) {
        if (spec.degree_min > spec.degree_max) fail("degree_min exceeds degree_max");
        if (spec.degree_max > n - 1) fail("degree bounds must not exceed n_nodes - 1");
        const std::uint64_t span = spec.degree_max - spec.degree_min + 1;
        for (std::size_t i = 0; i < n; ++i)
            degrees[i] = spec.degree_min + rng.next_below(span);
    } else {
        if (!(spec.exponent > 1.0)) fail("power-law exponent must exceed 1");
        if (n < 2) fail("power-law generation needs at least 2 nodes");
        std::vector<double> w(n - 1);
        for (std::size_t d = 1; d < n; ++d)
            w[d - 1] = std::pow(static_cast<double>(d), -spec.exponent);
        const DiscreteCdf degree_cdf(std::move(w));
        for (std::size_t i = 0; i < n; ++i) degrees[i] = degree_cdf.draw(rng) + 1;
    }

    std::unique_ptr<DiscreteCdf> bias;
    if (spec.target_zipf > 0.0) {
        std::vector<double> w(n);
        for (std::size_t j = 0; j < n; ++j)
            w[j] = std::pow(static_cast<double>(j + 1), -spec.target_zipf);
        bias = std::make_unique<DiscreteCdf>(std::move(w));
    }

    std::vector<Edge> edges;
    edges.reserve(std::accumulate(degrees.begin(), degrees.end(), std::size_t{0}));
    for (std::size_t i = 0; i < n; ++i) {
        sample_targets(degrees[i], n, static_cast<std::uint32_t>(i), bias.get(),
                       rng, edges);
    }
    return build_from_edges(n, edges);
}

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

TransitionModel load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::size_t line_no = 0;
    std::string line;
    std::size_t n_nodes = 0;
    bool have_n = false;
    std::vector<Edge> edges;
    std::vector<double> weights;
    bool any_weight = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ss(line);
        if (!have_n) {
            unsigned long long n = 0;
            std::string extra;
            if (!(ss >> n) || (ss >> extra))
                parse_fail(path, line_no, "expected a single node count");
            if (n == 0 || n > kMaxNodes) parse_fail(path, line_no, "node count out of range");
            n_nodes = static_cast<std::size_t>(n);
            have_n = true;
            continue;
        }
        unsigned long long s = 0, t = 0;
        if (!(ss >> s >> t)) parse_fail(path, line_no, "expected `source target [weight]`");
        if (s >= n_nodes || t >= n_nodes) parse_fail(path, line_no, "node index out of range");
        double w = 0.0;
        if (ss >> w) {
            if (!(w > 0.0) || !std::isfinite(w)) parse_fail(path, line_no, "weight must be positive");
            if (!any_weight) {
                weights.assign(edges.size(), 1.0);
                any_weight = true;
            }
        }
        std::string extra;
        if (ss >> extra) parse_fail(path, line_no, "trailing tokens");
        edges.push_back(Edge{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(t)});
        if (any_weight) weights.push_back(w > 0.0 ? w : 1.0);
    }
    if (!have_n) throw std::runtime_error(path.string() + ": empty edge-list file");

    try {
        return build_from_edges(n_nodes, edges,
                                any_weight ? std::span<const double>(weights)
                                           : std::span<const double>{});
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void save_edge_list(const TransitionModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const std::size_t n = model.n_nodes();
    out << n << "\n";
    char buf[64];
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto begin = model.row_offsets()[i];
        const auto end = model.row_offsets()[i + 1];
        const double uniform = 1.0 / static_cast<double>(end - begin);
        bool is_uniform = true;
        for (auto k = begin; k < end && is_uniform; ++k)
            is_uniform = model.probs()[k] == uniform;
        for (auto k = begin; k < end; ++k) {
            out << i << ' ' << model.col_indices()[k];
            if (!is_uniform) {
                std::snprintf(buf, sizeof buf, "%.17g", model.probs()[k]);
                out << ' ' << buf;
            }
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace surfer
