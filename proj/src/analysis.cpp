#include "surfer/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "surfer/kernels.hpp"
#include "surfer/oracle.hpp"
#include "surfer/rng.hpp"

namespace surfer {

namespace {

std::vector<double> normalized(std::span<const double> z) {
    std::vector<double> p(z.begin(), z.end());
    const double total = kernels::sum(p);
    if (!(total > 0.0)) throw std::invalid_argument("vector has no positive mass");
    kernels::scale(p, 1.0 / total);
    return p;
}

// value of the rank-th largest component (rank is 1-based)
double value_at_rank(std::span<const double> z, std::size_t rank) {
    std::vector<double> v(z.begin(), z.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     v.end(), std::greater<>());
    return v[rank - 1];
}

}  // namespace

RankCriterion make_rank_criterion(std::size_t top_count, std::size_t window,
                                  std::span<const double> z_star) {
    if (top_count == 0) throw std::invalid_argument("top_count must be positive");
    if (!(top_count < window && window < z_star.size()))
        throw std::invalid_argument("need top_count < window < dimension");
    if (!(value_at_rank(z_star, top_count) > value_at_rank(z_star, window)))
        throw std::invalid_argument(
            "degenerate criterion: reference ranks top_count and window are tied");
    return RankCriterion{top_count, window};
}

double l1_distance(std::span<const double> z, std::span<const double> z_star) {
    if (z.size() != z_star.size())
        throw std::invalid_argument("dimension mismatch in l1_distance");
    return kernels::l1_distance(z, z_star);
}

std::vector<std::uint32_t> top_indices(std::span<const double> z, std::size_t k) {
    if (k > z.size()) throw std::invalid_argument("k exceeds dimension");
    std::vector<std::uint32_t> idx(z.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                      idx.end(), [&](std::uint32_t a, std::uint32_t b) {
                          if (z[a] != z[b]) return z[a] > z[b];
                          return a < b;
                      });
    idx.resize(k);
    return idx;
}

double rank_miss_pct(std::span<const double> z, std::span<const double> z_star,
                     const RankCriterion& crit) {
    if (z.size() != z_star.size())
        throw std::invalid_argument("dimension mismatch in rank_miss_pct");
    if (crit.top_count == 0 || crit.top_count > crit.window)
        throw std::invalid_argument("criterion needs 1 <= top_count <= window");
    const auto top_true = top_indices(z_star, crit.top_count);
    auto window = top_indices(z, crit.window);
    std::sort(window.begin(), window.end());
    std::size_t missing = 0;
    for (std::uint32_t i : top_true) {
        if (!std::binary_search(window.begin(), window.end(), i)) ++missing;
    }
    return 100.0 * static_cast<double>(missing) / static_cast<double>(crit.top_count);
}

bool in_good_set(std::span<const double> z, std::span<const double> z_star,
                 const RankCriterion& crit) {
    return rank_miss_pct(z, z_star, crit) == 0.0;
}

bool in_core_set(std::span<const double> z, std::span<const double> z_star,
                 const RankCriterion& crit, double kappa_estimate) {
    if (!in_good_set(z, z_star, crit)) return false;
    const auto p = normalized(z);
    const auto p_star = normalized(z_star);
    return kernels::l1_distance(p, p_star) <= kappa_estimate;
}

bool near_good_set(std::span<const double> z, std::span<const double> z_star,
                   const RankCriterion& crit, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (in_good_set(z, z_star, crit)) return true;
    const auto q = normalized(z);
    const auto p_star = normalized(z_star);
    const double d0 = kernels::l1_distance(q, p_star);
    // walk the segment toward the reference point (a member); the entry
    // point bounds the inf-distance from above
    double lo = 0.0, hi = 1.0;
    std::vector<double> point(q.size());
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < q.size(); ++i)
            point[i] = q[i] + mid * (p_star[i] - q[i]);
        (in_good_set(point, z_star, crit) ? hi : lo) = mid;
    }
    return hi * d0 < eps;
}

double estimate_kappa(std::span<const double> z_star, const RankCriterion& crit,
                      std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("need at least 1000 samples");
    const auto p_star = normalized(z_star);
    const std::size_t n = p_star.size();
    if (crit.top_count == 0 || crit.top_count > crit.window || crit.window >= n)
        throw std::invalid_argument("criterion needs 1 <= top_count <= window < dimension");
    // a tie at the boundary ranks makes the exit distance collapse to zero;
    // with top_count == window the boundary is against the next rank down
    const std::size_t boundary =
        crit.top_count < crit.window ? crit.window : crit.window + 1;
    if (!(value_at_rank(p_star, crit.top_count) > value_at_rank(p_star, boundary)))
        throw std::invalid_argument(
            "degenerate criterion: tied reference values at the window boundary");

    double best = std::numeric_limits<double>::infinity();

    // targeted swaps: exchange a top-rank value with one just outside the
    // window; the closest exchanges sit right past the window boundary
    const auto order = top_indices(p_star, n);
    const std::size_t b_end = std::min(n, crit.window + 256);
    std::vector<double> candidate(p_star);
    for (std::size_t ai = 0; ai < crit.top_count; ++ai) {
        for (std::size_t bi = crit.window; bi < b_end; ++bi) {
            const std::uint32_t a = order[ai], b = order[bi];
            std::swap(candidate[a], candidate[b]);
            if (!in_good_set(candidate, p_star, crit))
                best = std::min(best, 2.0 * std::abs(p_star[a] - p_star[b]));
            std::swap(candidate[a], candidate[b]);
        }
    }

    // simplex Monte Carlo with bisection refinement toward the reference
    Rng rng(seed, rng_stream::kSimplex);
    std::vector<double> q(n), point(n);
    for (std::size_t s = 0; s < n_samples; ++s) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = -std::log(1.0 - rng.next_double());
            total += q[i];
        }
        for (std::size_t i = 0; i < n; ++i) q[i] /= total;
        if (in_good_set(q, p_star, crit)) continue;
        const double d0 = kernels::l1_distance(q, p_star);
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 30; ++it) {
            const double mid = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < n; ++i)
                point[i] = q[i] + mid * (p_star[i] - q[i]);
            (in_good_set(point, p_star, crit) ? hi : lo) = mid;
        }
        best = std::min(best, (1.0 - lo) * d0);
    }
    return best;
}

StepSumThreshold step_sum_threshold(const StepSchedule& schedule, double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("tau must be finite and nonnegative");
    constexpr std::uint64_t kCap = 20'000'000;
    double acc = 0.0;
    for (std::uint64_t k = 0; k < kCap; ++k) {
        acc += step_size(schedule, k);
        if (acc >= tau) return {k, true};
    }
    // integral lower bound on the partial sum; solving it for tau yields an
    // index at which the true sum has certainly crossed
    if (schedule.kind == StepSchedule::Kind::polynomial) {
        const double a0 = schedule.a0, K = schedule.offset, rho = schedule.rho;
        double x;  // continuous step count with integral(x) = tau
        if (rho < 1.0) {
            x = K * (std::pow(tau * (1.0 - rho) / (a0 * K) + 1.0, 1.0 / (1.0 - rho)) - 1.0);
        } else {
            x = K * std::expm1(tau / (a0 * K));
        }
        return {static_cast<std::uint64_t>(std::ceil(x)), false};
    }
    // piecewise: continue block-wise from the cap
    const std::uint64_t start_block = kCap / schedule.plateau + 1;
    double rest = tau - acc;
    for (std::uint64_t b = start_block;; ++b) {
        const double a = std::max(
            schedule.a0 * std::pow(schedule.ratio, static_cast<double>(b)),
            schedule.floor);
        const double block_sum = a * static_cast<double>(schedule.plateau);
        if (block_sum >= rest) {
            const auto steps = static_cast<std::uint64_t>(std::ceil(rest / a));
            return {b * schedule.plateau + steps - 1, false};
        }
        rest -= block_sum;
        if (a == schedule.floor && schedule.floor == 0.0)
            throw std::runtime_error("step sums converge below tau; threshold unreachable");
        if (b > start_block + 10'000'000)
            throw std::runtime_error("step-sum threshold out of tractable range");
    }
}

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ComplexityReport complexity_report_with_kappa(const TransitionModel& model, double c,
                                              double kappa, const StepSchedule& schedule,
                                              std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("t_grid must not be empty");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("all grid times must be positive");
    }

    ComplexityReport report;
    report.tau = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        const double norm1 = matrix_exponential_1norm(model, c, t);
        if (norm1 >= 1.0)
            throw std::runtime_error("flow exponential is not a contraction; "
                                     "the exponential computation is broken");
        const double tau = 4.0 * (t + 1.0) / ((1.0 - norm1) * kappa);
        if (tau < report.tau) {
            report.t_flow = t;
            report.norm1 = norm1;
            report.tau = tau;
        }
    }
    report.kappa_estimate = kappa;
    report.gamma = (1.0 - report.norm1) * kappa;
    const StepSumThreshold threshold = step_sum_threshold(schedule, report.tau);
    report.n0 = threshold.n0;
    report.n0_exact = threshold.exact;
    report.delta = report.gamma / (2.0 * std::sqrt(static_cast<double>(model.n_nodes())));
    report.caveat =
        "kappa_estimate is the minimum over sampled rankings only, an upper bound "
        "on the true exit distance, so tau may be understated; the high-probability "
        "statement has the form 1 - 2N exp(-K delta^2 / (N sum_{m>=k} a(m)^2)) with "
        "an unspecified constant K > 0, so no numeric probability is claimed.";
    return report;
}

ComplexityReport complexity_report(const TransitionModel& model, double c,
                                   const RankCriterion& crit,
                                   const StepSchedule& schedule,
                                   std::span<const double> t_grid, std::uint64_t seed,
                                   std::size_t kappa_samples) {
    const FixedPoint fp = solve_fixed_point(model, c);
    const double kappa = estimate_kappa(fp.z_star, crit, kappa_samples, seed);
    return complexity_report_with_kappa(model, c, kappa, schedule, t_grid);
}

double variance(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("variance of empty vector");
    const double mean = kernels::sum(x) / static_cast<double>(x.size());
    double acc = 0.0;
    for (double v : x) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(x.size());
}

std::optional<std::uint64_t> sustained_zero_miss_iteration(const ConvergenceTrace& trace) {
    if (!trace.has_criterion || trace.rows.empty()) return std::nullopt;
    if (trace.rows.back().rank_miss_pct != 0.0) return std::nullopt;
    std::uint64_t first = trace.rows.back().n;
    for (auto it = trace.rows.rbegin(); it != trace.rows.rend(); ++it) {
        if (it->rank_miss_pct != 0.0) break;
        first = it->n;
    }
    return first;
}

void write_trace_csv(const std::filesystem::path& path, const ConvergenceTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "n,l1_distance,rank_miss_pct,wall_nanos\n";
    for (const TraceRow& row : trace.rows) {
        out << row.n << ',' << format_g17(row.l1_distance) << ','
            << format_g17(row.rank_miss_pct) << ',' << row.wall_nanos << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ConvergenceTrace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        (line != "n,l1_distance,rank_miss_pct,wall_nanos" &&
         line != "n,l1_distance,rank_miss_pct,wall_nanos\r"))
        throw std::runtime_error(path.string() + ": unexpected trace header");
    ConvergenceTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        TraceRow row;
        if (!(ss >> row.n >> row.l1_distance >> row.rank_miss_pct >> row.wall_nanos))
            throw std::runtime_error(path.string() + ": malformed trace row");
        trace.rows.push_back(row);
    }
    trace.has_oracle = !trace.rows.empty() && !std::isnan(trace.rows.front().l1_distance);
    trace.has_criterion =
        !trace.rows.empty() && !std::isnan(trace.rows.front().rank_miss_pct);
    return trace;
}

}  // namespace surfer
