#pragma once

#include <span>
#include <vector>

#include "surfer/estimator.hpp"
#include "surfer/graph.hpp"

// Update decomposition against the generating model. Lives apart from the
// estimator on purpose: the iteration itself must stay model-free, so
// anything that reads p(i, j) belongs here, behind a diagnostics-only
// boundary.

namespace surfer::diag {

struct StepDecomposition {
    std::vector<double> drift;  // conditional mean of the bracketed update
    std::vector<double> noise;  // realized bracket minus drift; zero mean given x
};

// Conditional-mean update given the uniform pick x:
// drift(i) = 1{x=i} (1 - z(i)) + c z(x) p(x, i).
std::vector<double> drift_vector(std::span<const double> z, double c,
                                 const TransitionModel& model, std::uint32_t x);

// Splits the realized update bracket for one sample into drift plus a
// mean-zero remainder. drift + noise reproduces the realized bracket
// exactly; the state is not advanced.
StepDecomposition decompose_step(const EstimatorState& state, SamplePair sample,
                                 const TransitionModel& model);

}  // namespace surfer::diag
