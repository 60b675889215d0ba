#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "surfer/kernels.hpp"
#include "surfer/rng.hpp"

using namespace surfer;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng, double lo = -1.0,
                                  double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * rng.next_double();
    return v;
}

kernels::Csr random_csr(std::size_t rows, std::size_t cols, std::size_t per_row,
                        Rng& rng) {
    kernels::Csr a;
    a.n_rows = rows;
    a.n_cols = cols;
    a.row_offsets.push_back(0);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t d = 1 + rng.next_below(per_row);
        for (std::size_t k = 0; k < d; ++k) {
            a.col_indices.push_back(static_cast<std::uint32_t>(rng.next_below(cols)));
            a.values.push_back(rng.next_double() * 2.0 - 1.0);
        }
        a.row_offsets.push_back(a.col_indices.size());
    }
    return a;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b));
}

const std::size_t kSizes[] = {0,  1,  2,  3,   4,   5,    7,   8,  9, 15,
                              16, 17, 31, 33, 63, 100, 257, 1024, 4097};

}  // namespace

TEST_CASE("kernels: hand values") {
    const std::vector<double> a = {1.0, -2.0, 3.0, -4.0, 5.0};
    const std::vector<double> b = {0.5, 0.5, 0.5, 0.5, 0.5};

    CHECK(kernels::sum(a) == doctest::Approx(3.0));
    CHECK(kernels::l1_norm(a) == doctest::Approx(15.0));
    CHECK(kernels::l1_distance(a, b) == doctest::Approx(0.5 + 2.5 + 2.5 + 4.5 + 4.5));

    std::vector<double> y = b;
    kernels::axpy(2.0, a, y);
    CHECK(y[0] == doctest::Approx(2.5));
    CHECK(y[1] == doctest::Approx(-3.5));

    std::vector<double> s = {1.0, 2.0};
    kernels::scale(s, -3.0);
    CHECK(s[0] == -3.0);
    CHECK(s[1] == -6.0);
}

TEST_CASE("kernels: small csr and dense products") {
    // [[2, 0], [1, 3]] times [10, 100]
    kernels::Csr a;
    a.n_rows = a.n_cols = 2;
    a.row_offsets = {0, 1, 3};
    a.col_indices = {0, 0, 1};
    a.values = {2.0, 1.0, 3.0};
    std::vector<double> x = {10.0, 100.0}, y(2);
    kernels::csr_matvec(a, x, y);
    CHECK(y[0] == doctest::Approx(20.0));
    CHECK(y[1] == doctest::Approx(310.0));

    const std::vector<double> m1 = {1, 2, 3, 4};
    const std::vector<double> m2 = {5, 6, 7, 8};
    std::vector<double> prod(4);
    kernels::dense_matmul(2, m1, m2, prod);
    CHECK(prod == std::vector<double>{19, 22, 43, 50});

    std::vector<double> mv(2);
    kernels::dense_matvec(2, m1, x, mv);
    CHECK(mv[0] == doctest::Approx(210.0));
    CHECK(mv[1] == doctest::Approx(430.0));
}

TEST_CASE("kernels: backend dispatch") {
    CHECK(kernels::backend_available(kernels::Backend::scalar));
    const kernels::Backend initial = kernels::active_backend();

    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    kernels::set_backend(initial);

    if (!kernels::backend_available(kernels::Backend::avx2)) {
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::avx2),
                        std::invalid_argument);
    }
}

#if defined(SURFER_HAVE_AVX2)

TEST_CASE("kernels: scalar and avx2 agree on reductions and elementwise ops") {
    if (!kernels::backend_available(kernels::Backend::avx2)) return;
    Rng rng(2024, 900);
    for (std::size_t n : kSizes) {
        const auto x = random_vector(n, rng);
        const auto y0 = random_vector(n, rng);

        CHECK(close_rel(kernels::scalar::sum(x), kernels::avx2::sum(x), 1e-12));
        CHECK(close_rel(kernels::scalar::l1_norm(x), kernels::avx2::l1_norm(x), 1e-12));
        CHECK(close_rel(kernels::scalar::l1_distance(x, y0),
                        kernels::avx2::l1_distance(x, y0), 1e-12));

        auto y1 = y0, y2 = y0;
        kernels::scalar::axpy(0.73, x, y1);
        kernels::avx2::axpy(0.73, x, y2);
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(y1[i], y2[i], 1e-13));

        auto s1 = x, s2 = x;
        kernels::scalar::scale(s1, -1.37);
        kernels::avx2::scale(s2, -1.37);
        for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);
    }
}

TEST_CASE("kernels: scalar and avx2 agree on sparse and dense products") {
    if (!kernels::backend_available(kernels::Backend::avx2)) return;
    Rng rng(77, 901);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t rows = 1 + rng.next_below(40);
        const std::size_t cols = 1 + rng.next_below(40);
        const auto a = random_csr(rows, cols, 9, rng);
        const auto x = random_vector(cols, rng);
        std::vector<double> y1(rows), y2(rows);
        kernels::scalar::csr_matvec(a, x, y1);
        kernels::avx2::csr_matvec(a, x, y2);
        for (std::size_t i = 0; i < rows; ++i) CHECK(close_rel(y1[i], y2[i], 1e-12));
    }
    for (std::size_t n : {1, 2, 3, 4, 5, 7, 8, 9, 17, 33}) {
        const auto a = random_vector(n * n, rng);
        const auto b = random_vector(n * n, rng);
        std::vector<double> c1(n * n), c2(n * n), v1(n), v2(n);
        kernels::scalar::dense_matmul(n, a, b, c1);
        kernels::avx2::dense_matmul(n, a, b, c2);
        for (std::size_t i = 0; i < n * n; ++i) CHECK(close_rel(c1[i], c2[i], 1e-12));
        const auto x = random_vector(n, rng);
        kernels::scalar::dense_matvec(n, a, x, v1);
        kernels::avx2::dense_matvec(n, a, x, v2);
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(v1[i], v2[i], 1e-12));
    }
}

#endif  // SURFER_HAVE_AVX2

TEST_CASE("kernels: csr_matvec matches a dense re-computation") {
    Rng rng(5, 902);
    const std::size_t rows = 17, cols = 13;
    const auto a = random_csr(rows, cols, 6, rng);
    const auto x = random_vector(cols, rng);

    std::vector<double> dense(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::uint64_t k = a.row_offsets[i]; k < a.row_offsets[i + 1]; ++k)
            dense[i * cols + a.col_indices[k]] += a.values[k];

    std::vector<double> want(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) want[i] += dense[i * cols + j] * x[j];

    std::vector<double> got(rows);
    kernels::csr_matvec(a, x, got);
    for (std::size_t i = 0; i < rows; ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("rng: determinism and bounded draws") {
    Rng a(42, 3), b(42, 3), c(42, 4);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    bool any_diff = false;
    Rng a2(42, 3);
    for (int i = 0; i < 100; ++i) any_diff |= a2.next_u64() != c.next_u64();
    CHECK(any_diff);

    Rng r(7, 0);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t v = r.next_below(17);
        CHECK(v < 17);
        const double d = r.next_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
    }
}
