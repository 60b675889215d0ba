#include "surfer/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace surfer::kernels {

// =========================================================================
// Scalar reference kernels
// =========================================================================

namespace scalar {

double sum(std::span<const double> x) {
    // two-lane unrolling; keeps the reduction order fixed and documented
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < x.size(); i += 2) {
        s0 += x[i];
        s1 += x[i + 1];
    }
    if (i < x.size()) s0 += x[i];
    return s0 + s1;
}

double l1_norm(std::span<const double> x) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < x.size(); i += 2) {
        s0 += std::abs(x[i]);
        s1 += std::abs(x[i + 1]);
    }
    if (i < x.size()) s0 += std::abs(x[i]);
    return s0 + s1;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 1 < a.size(); i += 2) {
        s0 += std::abs(a[i] - b[i]);
        s1 += std::abs(a[i + 1] - b[i + 1]);
    }
    if (i < a.size()) s0 += std::abs(a[i] - b[i]);
    return s0 + s1;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
    for (double& v : x) v *= a;
}

void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        double acc = 0.0;
        const std::uint64_t end = a.row_offsets[i + 1];
        for (std::uint64_t k = a.row_offsets[i]; k < end; ++k) {
            acc += a.values[k] * x[a.col_indices[k]];
        }
        y[i] = acc;
    }
}

void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c) {
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = c.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            const double* bk = b.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
}

void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * n;
        double s0 = 0.0, s1 = 0.0;
        std::size_t j = 0;
        for (; j + 1 < n; j += 2) {
            s0 += ai[j] * x[j];
            s1 += ai[j + 1] * x[j + 1];
        }
        if (j < n) s0 += ai[j] * x[j];
        y[i] = s0 + s1;
    }
}

}  // namespace scalar

// =========================================================================
// Runtime dispatch
// =========================================================================

namespace {

struct Dispatch {
    double (*sum)(std::span<const double>);
    double (*l1_norm)(std::span<const double>);
    double (*l1_distance)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    void (*scale)(std::span<double>, double);
    void (*csr_matvec)(const Csr&, std::span<const double>, std::span<double>);
    void (*dense_matmul)(std::size_t, std::span<const double>,
                         std::span<const double>, std::span<double>);
    void (*dense_matvec)(std::size_t, std::span<const double>,
                         std::span<const double>, std::span<double>);
};

constexpr Dispatch kScalarTable = {
    scalar::sum,        scalar::l1_norm,      scalar::l1_distance,
    scalar::axpy,       scalar::scale,        scalar::csr_matvec,
    scalar::dense_matmul, scalar::dense_matvec,
};

#if defined(SURFER_HAVE_AVX2)
constexpr Dispatch kAvx2Table = {
    avx2::sum,        avx2::l1_norm,      avx2::l1_distance,
    avx2::axpy,       avx2::scale,        avx2::csr_matvec,
    avx2::dense_matmul, avx2::dense_matvec,
};
#endif

bool host_supports_avx2() {
#if defined(SURFER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("SURFER_KERNELS")) {
        const std::string_view v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && host_supports_avx2()) return Backend::avx2;
    }
    return host_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

const Dispatch* table_for(Backend b) {
#if defined(SURFER_HAVE_AVX2)
    if (b == Backend::avx2) return &kAvx2Table;
#endif
    (void)b;
    return &kScalarTable;
}

Backend g_backend = detect_backend();
const Dispatch* g_table = table_for(g_backend);

}  // namespace

Backend active_backend() { return g_backend; }

bool backend_available(Backend b) {
    if (b == Backend::scalar) return true;
    return host_supports_avx2();
}

void set_backend(Backend b) {
    if (!backend_available(b)) {
        throw std::invalid_argument("kernel backend not available on this host: " +
                                    std::string(backend_name(b)));
    }
    g_backend = b;
    g_table = table_for(b);
}

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

double sum(std::span<const double> x) { return g_table->sum(x); }
double l1_norm(std::span<const double> x) { return g_table->l1_norm(x); }
double l1_distance(std::span<const double> a, std::span<const double> b) {
    return g_table->l1_distance(a, b);
}
void axpy(double a, std::span<const double> x, std::span<double> y) {
    g_table->axpy(a, x, y);
}
void scale(std::span<double> x, double a) { g_table->scale(x, a); }
void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y) {
    g_table->csr_matvec(a, x, y);
}
void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c) {
    g_table->dense_matmul(n, a, b, c);
}
void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y) {
    g_table->dense_matvec(n, a, x, y);
}

}  // namespace surfer::kernels
