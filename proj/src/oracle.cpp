#include "surfer/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "surfer/kernels.hpp"

namespace surfer {

namespace {

void require_dim(std::size_t got, std::size_t want) {
    if (got != want)
        throw std::invalid_argument("vector dimension " + std::to_string(got) +
                                    " does not match model dimension " +
                                    std::to_string(want));
}

void require_damping(double c) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("damping must lie in (0, 1)");
}

// Sweeps needed to shrink an initial L1 gap of order N*c down to eps at
// contraction rate c, with headroom.
std::size_t sweep_cap(std::size_t n, double c, double eps) {
    const double start = static_cast<double>(n) * c + 1.0;
    const double k = std::log(eps / start) / std::log(c);
    return static_cast<std::size_t>(std::max(k, 1.0)) * 2 + 100;
}

}  // namespace

FixedPoint solve_fixed_point(const TransitionModel& model, double c, double tol) {
    require_damping(c);
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const std::size_t n = model.n_nodes();

    // stop once the sweep delta guarantees both the requested gap and the
    // published residual bound
    const double eps = std::min(tol * (1.0 - c),
                                1e-10 * static_cast<double>(n) / (c + 1.0));
    const std::size_t cap = sweep_cap(n, c, eps);

    std::vector<double> z(n, 1.0), t(n), next(n);
    double delta = 0.0;
    std::size_t sweeps = 0;
    for (;; ++sweeps) {
        if (sweeps >= cap)
            throw std::runtime_error("fixed-point sweeps did not converge; model is broken");
        kernels::csr_matvec(model.transposed(), z, t);
        for (std::size_t i = 0; i < n; ++i) next[i] = 1.0 + c * t[i];
        delta = kernels::l1_distance(next, z);
        z.swap(next);
        if (delta <= eps) break;
    }

    kernels::csr_matvec(model.transposed(), z, t);
    for (std::size_t i = 0; i < n; ++i) next[i] = 1.0 + c * t[i] - z[i];
    FixedPoint fp;
    fp.z_star = std::move(z);
    fp.residual = kernels::l1_norm(next);
    return fp;
}

std::vector<double> stationary_power_method(const GoogleMatrix& gm, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const TransitionModel& model = *gm.base;
    const double c = gm.c;
    const std::size_t n = model.n_nodes();
    const double teleport = (1.0 - c) / static_cast<double>(n);
    const std::size_t cap = sweep_cap(n, c, tol * (1.0 - c) * 0.5);

    std::vector<double> pi(n, 1.0 / static_cast<double>(n)), t(n), next(n);
    std::size_t sweeps = 0;
    for (;; ++sweeps) {
        if (sweeps >= cap)
            throw std::runtime_error("power method did not converge; model is broken");
        // pi P equals P^T applied to pi as a column
        kernels::csr_matvec(model.transposed(), pi, t);
        for (std::size_t i = 0; i < n; ++i) next[i] = c * t[i] + teleport;
        const double delta = kernels::l1_distance(next, pi);
        pi.swap(next);
        if (delta <= tol) break;
    }
    const double total = kernels::sum(pi);
    kernels::scale(pi, 1.0 / total);
    return pi;
}

std::vector<double> ode_field(std::span<const double> z, const TransitionModel& model,
                              double c) {
    require_damping(c);
    require_dim(z.size(), model.n_nodes());
    std::vector<double> h(z.size());
    kernels::csr_matvec(model.transposed(), z, h);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 + c * h[i] - z[i];
    return h;
}

std::vector<double> ode_field_scaled(std::span<const double> z,
                                     const TransitionModel& model, double c) {
    require_damping(c);
    require_dim(z.size(), model.n_nodes());
    std::vector<double> h(z.size());
    kernels::csr_matvec(model.transposed(), z, h);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = c * h[i] - z[i];
    return h;
}

namespace {

double max_abs_column_sum(std::size_t n, std::span<const double> a) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(a[i * n + j]);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace

std::vector<double> flow_exponential(const TransitionModel& model, double c, double t) {
    require_damping(c);
    if (!(t >= 0.0)) throw std::invalid_argument("flow time must be nonnegative");
    const std::size_t n = model.n_nodes();
    if (n > kDenseGuard)
        throw std::invalid_argument("instance exceeds the dense guard (" +
                                    std::to_string(kDenseGuard) + " nodes)");

    // A = (c P^T - I) * t/N, dense row-major
    const double scale = t / static_cast<double>(n);
    std::vector<double> a(n * n, 0.0);
    const auto& fwd = model.forward();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint64_t k = fwd.row_offsets[i]; k < fwd.row_offsets[i + 1]; ++k) {
            a[static_cast<std::size_t>(fwd.col_indices[k]) * n + i] +=
                c * fwd.values[k] * scale;
        }
    }
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] -= scale;

    // scaling and squaring: halve until the norm is at most 1, run the
    // series to relative 1e-16, square back up
    const double norm_a = max_abs_column_sum(n, a);
    const auto squarings = static_cast<unsigned>(
        std::ceil(std::log2(std::max(1.0, norm_a))));
    if (squarings > 0) kernels::scale(a, std::ldexp(1.0, -static_cast<int>(squarings)));

    std::vector<double> result(n * n, 0.0), term(a), scratch(n * n);
    for (std::size_t i = 0; i < n; ++i) result[i * n + i] = 1.0;  // k = 0
    kernels::axpy(1.0, term, result);                             // k = 1
    for (int k = 2; k <= 128; ++k) {
        kernels::dense_matmul(n, term, a, scratch);
        term.swap(scratch);
        kernels::scale(term, 1.0 / static_cast<double>(k));
        kernels::axpy(1.0, term, result);
        if (max_abs_column_sum(n, term) <= 1e-16 * max_abs_column_sum(n, result)) break;
    }
    for (unsigned s = 0; s < squarings; ++s) {
        kernels::dense_matmul(n, result, result, scratch);
        result.swap(scratch);
    }
    return result;
}

double matrix_exponential_1norm(const TransitionModel& model, double c, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("flow time must be positive");
    const std::vector<double> e = flow_exponential(model, c, t);
    return max_abs_column_sum(model.n_nodes(), e);
}

std::vector<double> flow_map(std::span<const double> z, const TransitionModel& model,
                             double c, double t) {
    require_dim(z.size(), model.n_nodes());
    const std::size_t n = model.n_nodes();
    const std::vector<double> e = flow_exponential(model, c, t);
    const FixedPoint fp = solve_fixed_point(model, c, 1e-13);

    std::vector<double> shifted(n), out(n);
    for (std::size_t i = 0; i < n; ++i) shifted[i] = z[i] - fp.z_star[i];
    kernels::dense_matvec(n, e, shifted, out);
    for (std::size_t i = 0; i < n; ++i) out[i] += fp.z_star[i];
    return out;
}

}  // namespace surfer
