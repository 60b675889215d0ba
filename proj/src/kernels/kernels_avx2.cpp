// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma; only reached through
// the dispatch table after a cpuid check, so the rest of the library stays
// runnable on plain x86-64.

#include "surfer/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace surfer::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x.data() + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x.data() + i + 4));
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double l1_norm(std::span<const double> x) {
    const std::size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(x.data() + i)));
        acc1 = _mm256_add_pd(acc1, abs_pd(_mm256_loadu_pd(x.data() + i + 4)));
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += std::abs(x[i]);
    return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                         _mm256_loadu_pd(b.data() + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i + 4),
                                         _mm256_loadu_pd(b.data() + i + 4));
        acc0 = _mm256_add_pd(acc0, abs_pd(d0));
        acc1 = _mm256_add_pd(acc1, abs_pd(d1));
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += std::abs(a[i] - b[i]);
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y.data() + i);
        const __m256d vx = _mm256_loadu_pd(x.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, vx, vy));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
    const std::size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x.data() + i,
                         _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

void csr_matvec(const Csr& a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < a.n_rows; ++i) {
        const std::uint64_t begin = a.row_offsets[i];
        const std::uint64_t end = a.row_offsets[i + 1];
        __m256d acc = _mm256_setzero_pd();
        std::uint64_t k = begin;
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(
                reinterpret_cast<const __m128i*>(a.col_indices.data() + k));
            const __m256d xv = _mm256_i32gather_pd(x.data(), idx, 8);
            const __m256d av = _mm256_loadu_pd(a.values.data() + k);
            acc = _mm256_fmadd_pd(av, xv, acc);
        }
        double s = hsum_pd(acc);
        for (; k < end; ++k) s += a.values[k] * x[a.col_indices[k]];
        y[i] = s;
    }
}

void dense_matmul(std::size_t n, std::span<const double> a,
                  std::span<const double> b, std::span<double> c) {
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = c.data() + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) _mm256_storeu_pd(ci + j, _mm256_setzero_pd());
        for (; j < n; ++j) ci[j] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const __m256d aik = _mm256_set1_pd(a[i * n + k]);
            const double* bk = b.data() + k * n;
            j = 0;
            for (; j + 8 <= n; j += 8) {
                const __m256d c0 = _mm256_loadu_pd(ci + j);
                const __m256d c1 = _mm256_loadu_pd(ci + j + 4);
                _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(aik, _mm256_loadu_pd(bk + j), c0));
                _mm256_storeu_pd(ci + j + 4, _mm256_fmadd_pd(aik, _mm256_loadu_pd(bk + j + 4), c1));
            }
            for (; j + 4 <= n; j += 4) {
                const __m256d c0 = _mm256_loadu_pd(ci + j);
                _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(aik, _mm256_loadu_pd(bk + j), c0));
            }
            for (; j < n; ++j) ci[j] += a[i * n + k] * bk[j];
        }
    }
}

void dense_matvec(std::size_t n, std::span<const double> a,
                  std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* ai = a.data() + i * n;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + j),
                                   _mm256_loadu_pd(x.data() + j), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + j + 4),
                                   _mm256_loadu_pd(x.data() + j + 4), acc1);
        }
        double s = hsum_pd(_mm256_add_pd(acc0, acc1));
        for (; j < n; ++j) s += ai[j] * x[j];
        y[i] = s;
    }
}

}  // namespace surfer::kernels::avx2
