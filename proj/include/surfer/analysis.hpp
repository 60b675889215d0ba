#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surfer/graph.hpp"
#include "surfer/schedule.hpp"

namespace surfer {

// Ordinal ranking target: the top `top_count` true indices must appear among
// the top `window` estimated indices. Requires top_count < window < N and a
// strict value gap between the two boundary ranks of the reference vector,
// checked by make_rank_criterion.
struct RankCriterion {
    std::size_t top_count = 5;
    std::size_t window = 10;
};

RankCriterion make_rank_criterion(std::size_t top_count, std::size_t window,
                                  std::span<const double> z_star);

struct TraceRow {
    std::uint64_t n = 0;
    double l1_distance = 0.0;
    double rank_miss_pct = 0.0;
    std::uint64_t wall_nanos = 0;
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
    bool has_oracle = false;
    bool has_criterion = false;
};

double l1_distance(std::span<const double> z, std::span<const double> z_star);

// Indices of the k largest components, descending by value, ties broken by
// ascending index.
std::vector<std::uint32_t> top_indices(std::span<const double> z, std::size_t k);

// Percentage of the top true indices missing from the estimated window;
// 0 exactly when the ranking target is met.
double rank_miss_pct(std::span<const double> z, std::span<const double> z_star,
                     const RankCriterion& crit);

// Membership in the good set: rankings (of the normalized vector) that meet
// the criterion. Scale-invariant, so normalization is implicit.
bool in_good_set(std::span<const double> z, std::span<const double> z_star,
                 const RankCriterion& crit);

// Core of the good set: members within the estimated exit distance of the
// reference point. kappa_estimate should come from estimate_kappa.
bool in_core_set(std::span<const double> z, std::span<const double> z_star,
                 const RankCriterion& crit, double kappa_estimate);

// eps-thickening of the good set. The inf-distance to the set is bounded
// from above by a bisection along the segment toward the reference point,
// so a `true` answer is sound while `false` may be conservative.
bool near_good_set(std::span<const double> z, std::span<const double> z_star,
                   const RankCriterion& crit, double eps);

// Smallest L1 distance found from the normalized reference point to a
// ranking that violates the criterion, over targeted boundary-rank swaps
// plus n_samples simplex draws refined toward the reference. A sampled
// minimum, hence an upper bound on the true exit distance.
double estimate_kappa(std::span<const double> z_star, const RankCriterion& crit,
                      std::size_t n_samples, std::uint64_t seed);

struct ComplexityReport {
    double t_flow = 0.0;          // chosen flow horizon
    double norm1 = 0.0;           // contraction factor of the flow over t_flow
    double kappa_estimate = 0.0;  // sampled exit distance (upper bound)
    double gamma = 0.0;           // (1 - norm1) * kappa_estimate
    double tau = 0.0;             // 4 (t_flow + 1) / gamma
    std::uint64_t n0 = 0;         // first n with sum_{k<=n} a(k) >= tau
    bool n0_exact = true;         // false when n0 comes from the integral bound
    double delta = 0.0;           // gamma / (2 sqrt N)
    std::string caveat;           // unconditional reporting caveats
};

ComplexityReport complexity_report(const TransitionModel& model, double c,
                                   const RankCriterion& crit,
                                   const StepSchedule& schedule,
                                   std::span<const double> t_grid,
                                   std::uint64_t seed,
                                   std::size_t kappa_samples = 20000);

// Same assembly with a caller-supplied exit distance; the grid search,
// gamma/tau/n0/delta chain is unchanged.
ComplexityReport complexity_report_with_kappa(const TransitionModel& model,
                                              double c, double kappa,
                                              const StepSchedule& schedule,
                                              std::span<const double> t_grid);

struct StepSumThreshold {
    std::uint64_t n0 = 0;
    bool exact = true;
};

// min { n >= 0 : sum_{k=0..n} a(k) >= tau }. Exact by accumulation up to an
// iteration cap; past the cap the polynomial kind falls back to the integral
// bound and reports exact = false.
StepSumThreshold step_sum_threshold(const StepSchedule& schedule, double tau);

// Population variance (divisor N).
double variance(std::span<const double> x);

// Checkpoint index from which the ranking miss is zero and stays zero to the
// end of the trace; empty when that never happens or no criterion was traced.
std::optional<std::uint64_t> sustained_zero_miss_iteration(const ConvergenceTrace& trace);

// CSV schema: header `n,l1_distance,rank_miss_pct,wall_nanos`, LF endings,
// floats at full precision.
void write_trace_csv(const std::filesystem::path& path, const ConvergenceTrace& trace);
ConvergenceTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace surfer
