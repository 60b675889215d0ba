#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfer/analysis.hpp"
#include "surfer/sampling.hpp"
#include "surfer/schedule.hpp"

namespace surfer {

// Mutable state of the stochastic iteration: the current iterate, the step
// counter, and the knobs that drive an update. The iteration itself never
// reads transition probabilities, only samples.
struct EstimatorState {
    std::vector<double> z;
    std::uint64_t n = 0;
    StepSchedule schedule;
    double c = 0.85;
    std::size_t batch = 1;
};

// z starts at all-ones: the fixed point dominates the all-ones vector
// componentwise, which puts the start inside the basin at the right scale.
EstimatorState init_state(std::size_t n_nodes, double c,
                          const StepSchedule& schedule, std::size_t batch = 1);

// One update from one sample pair: entry x moves toward 1, entry y receives
// the damped pre-update value of entry x. Both increments use the pre-update
// iterate and add up when x == y; no other entry is touched.
void rl_step(EstimatorState& state, SamplePair sample);

// Batched update: the pull-toward-1 term applies once per distinct x (set
// membership, not multiplicity); the relay term sums over all pairs. All
// reads are pre-update; the step counter advances once.
void rl_step_batch(EstimatorState& state, std::span<const SamplePair> samples);

struct RunOptions {
    std::uint64_t n_iters = 0;
    std::uint64_t checkpoint_every = 1000;
    bool record_timing = false;  // off keeps traces bit-reproducible
};

// Applies n_iters updates (batched when state.batch > 1), recording a trace
// row at n = 0, every checkpoint, and the final step. Distances need
// oracle_z; miss percentages additionally need a criterion. Checkpoints
// assert the iterate is finite, nonnegative, and inside a divergence guard.
ConvergenceTrace run(Sampler& sampler, EstimatorState& state, const RunOptions& options,
                     std::span<const double> oracle_z = {},
                     const RankCriterion* criterion = nullptr);

}  // namespace surfer
