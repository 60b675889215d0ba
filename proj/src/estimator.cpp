#include "surfer/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "surfer/kernels.hpp"

namespace surfer {

StepSchedule StepSchedule::polynomial(double a0, double offset, double rho) {
    if (!(a0 > 0.0)) throw std::invalid_argument("a0 must be positive");
    if (!(offset > 0.0)) throw std::invalid_argument("offset must be positive");
    if (!(rho > 0.5 && rho <= 1.0))
        throw std::invalid_argument("rho must lie in (0.5, 1]");
    StepSchedule s;
    s.kind = Kind::polynomial;
    s.a0 = a0;
    s.offset = offset;
    s.rho = rho;
    return s;
}

StepSchedule StepSchedule::piecewise(double a0, std::uint64_t plateau, double ratio,
                                     double floor) {
    if (!(a0 > 0.0)) throw std::invalid_argument("a0 must be positive");
    if (plateau == 0) throw std::invalid_argument("plateau must be positive");
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw std::invalid_argument("ratio must lie in (0, 1]");
    if (!(floor >= 0.0 && floor <= a0))
        throw std::invalid_argument("floor must lie in [0, a0]");
    StepSchedule s;
    s.kind = Kind::piecewise_constant;
    s.a0 = a0;
    s.plateau = plateau;
    s.ratio = ratio;
    s.floor = floor;
    return s;
}

double step_size(const StepSchedule& schedule, std::uint64_t n) {
    if (schedule.kind == StepSchedule::Kind::polynomial) {
        return schedule.a0 /
               std::pow(1.0 + static_cast<double>(n) / schedule.offset, schedule.rho);
    }
    const double a = schedule.a0 *
                     std::pow(schedule.ratio, static_cast<double>(n / schedule.plateau));
    return schedule.floor > 0.0 ? std::max(a, schedule.floor) : a;
}

EstimatorState init_state(std::size_t n_nodes, double c, const StepSchedule& schedule,
                          std::size_t batch) {
    if (n_nodes == 0) throw std::invalid_argument("node count must be positive");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("damping must lie in (0, 1)");
    if (batch == 0) throw std::invalid_argument("batch size must be at least 1");
    EstimatorState state;
    state.z.assign(n_nodes, 1.0);
    state.schedule = schedule;
    state.c = c;
    state.batch = batch;
    return state;
}

void rl_step(EstimatorState& state, SamplePair sample) {
    if (sample.x >= state.z.size() || sample.y >= state.z.size())
        throw std::invalid_argument("sample index outside state dimension");
    const double a = step_size(state.schedule, state.n);
    const double zx = state.z[sample.x];  // pre-update, shared by both terms
    state.z[sample.x] += a * (1.0 - zx);
    state.z[sample.y] += a * state.c * zx;
    state.n += 1;
}

void rl_step_batch(EstimatorState& state, std::span<const SamplePair> samples) {
    if (samples.size() != state.batch)
        throw std::invalid_argument("batch length does not match state.batch");
    for (const SamplePair& p : samples) {
        if (p.x >= state.z.size() || p.y >= state.z.size())
            throw std::invalid_argument("sample index outside state dimension");
    }
    const double a = step_size(state.schedule, state.n);

    // cache pre-update values of every x before mutating anything
    static thread_local std::vector<double> zx_cache;
    static thread_local std::vector<std::uint32_t> xs;
    zx_cache.clear();
    xs.clear();
    for (const SamplePair& p : samples) {
        zx_cache.push_back(state.z[p.x]);
        xs.push_back(p.x);
    }

    // pull-toward-1 once per distinct x
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::uint32_t x : xs) state.z[x] += a * (1.0 - state.z[x]);

    // relay term sums over all pairs
    for (std::size_t j = 0; j < samples.size(); ++j)
        state.z[samples[j].y] += a * state.c * zx_cache[j];

    state.n += 1;
}

namespace {

// Iterates stay nonnegative by construction. No useful deterministic upper
// bound exists (relay increments can stack between visits), so checkpoints
// enforce a generous guard that only a diverging or corrupted run can cross:
// twice the largest value any fixed point can reach, plus slack.
double divergence_guard(std::size_t n, double c) {
    return 2.0 * (1.0 + c * static_cast<double>(n) / (1.0 - c)) + 2.0;
}

void check_iterate(std::span<const double> z, double bound, std::uint64_t n) {
    for (double v : z) {
        if (!std::isfinite(v) || v < 0.0 || v > bound)
            throw std::runtime_error("iterate left the feasible region at step " +
                                     std::to_string(n));
    }
}

}  // namespace

ConvergenceTrace run(Sampler& sampler, EstimatorState& state, const RunOptions& options,
                     std::span<const double> oracle_z, const RankCriterion* criterion) {
    if (options.n_iters == 0) throw std::invalid_argument("n_iters must be at least 1");
    if (options.checkpoint_every == 0)
        throw std::invalid_argument("checkpoint_every must be at least 1");
    if (sampler.model().n_nodes() != state.z.size())
        throw std::invalid_argument("sampler and state dimensions differ");
    if (!oracle_z.empty() && oracle_z.size() != state.z.size())
        throw std::invalid_argument("oracle vector dimension differs");
    if (criterion && oracle_z.empty())
        throw std::invalid_argument("criterion requires an oracle vector");

    const double guard = divergence_guard(state.z.size(), state.c);
    const auto t0 = std::chrono::steady_clock::now();

    ConvergenceTrace trace;
    trace.has_oracle = !oracle_z.empty();
    trace.has_criterion = criterion != nullptr;
    trace.rows.reserve(options.n_iters / options.checkpoint_every + 2);

    const auto checkpoint = [&](std::uint64_t n) {
        check_iterate(state.z, guard, n);
        TraceRow row;
        row.n = n;
        row.l1_distance =
            trace.has_oracle ? kernels::l1_distance(state.z, oracle_z)
                             : std::numeric_limits<double>::quiet_NaN();
        row.rank_miss_pct =
            criterion ? rank_miss_pct(state.z, oracle_z, *criterion)
                      : std::numeric_limits<double>::quiet_NaN();
        row.wall_nanos =
            options.record_timing
                ? static_cast<std::uint64_t>(
                      std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count())
                : 0;
        trace.rows.push_back(row);
    };

    checkpoint(state.n);
    std::vector<SamplePair> batch(state.batch);
    for (std::uint64_t it = 1; it <= options.n_iters; ++it) {
        if (state.batch == 1) {
            rl_step(state, sampler.draw());
        } else {
            sampler.draw_batch(std::span<SamplePair>(batch));
            rl_step_batch(state, batch);
        }
        if (it % options.checkpoint_every == 0 || it == options.n_iters)
            checkpoint(state.n);
    }
    return trace;
}

}  // namespace surfer
