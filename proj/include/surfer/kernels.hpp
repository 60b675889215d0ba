#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops behind the solvers and metrics. Every kernel has
// a scalar reference implementation; on x86-64 an AVX2+FMA variant is
// selected at runtime when the host supports it. The two backends may differ
// in the last few ulps (different reduction order); equivalence is asserted
// by the test suite, and a process always sticks to one backend unless
// set_backend() is called.

namespace surfer::kernels {

// Plain CSR storage shared by the sparse kernels. values runs parallel to
// col_indices; row_offsets has n_rows + 1 entries.
struct Csr {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::uint64_t> row_offsets;
    std::vector<std::uint32_t> col_indices;
    std::vector<double> values;
};

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
void set_backend(Backend b);  // throws std::invalid_argument if unavailable
std::string_view backend_name(Backend b);

// ---- reductions ----
double sum(std::span<const double> x);
double l1_norm(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);

// ---- elementwise ----
void axpy(double a, std::span<const double> x, std::span<double> y);  // y += a*x
void scale(std::span<double> x, double a);                            // x *= a

// ---- sparse ----
// y[i] = sum_k values[k] * x[col_indices[k]] over row i (gather form).
void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y);

// ---- dense, row-major n x n ----
void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c);  // c = a*b
void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y);  // y = a*x

// Scalar reference kernels, callable directly for equivalence tests.
namespace scalar {
double sum(std::span<const double> x);
double l1_norm(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);
void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y);
void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c);
void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y);
}  // namespace scalar

#if defined(SURFER_HAVE_AVX2)
namespace avx2 {
double sum(std::span<const double> x);
double l1_norm(std::span<const double> x);
double l1_distance(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);
void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y);
void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c);
void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y);
}  // namespace avx2
#endif

}  // namespace surfer::kernels
