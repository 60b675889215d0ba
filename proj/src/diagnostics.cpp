#include "surfer/diagnostics.hpp"

#include <stdexcept>

namespace surfer::diag {

std::vector<double> drift_vector(std::span<const double> z, double c,
                                 const TransitionModel& model, std::uint32_t x) {
    if (z.size() != model.n_nodes())
        throw std::invalid_argument("state and model dimensions differ");
    if (x >= model.n_nodes()) throw std::invalid_argument("state index out of range");

    std::vector<double> drift(z.size(), 0.0);
    drift[x] = 1.0 - z[x];
    const auto& fwd = model.forward();
    const double relay = c * z[x];
    for (std::uint64_t k = fwd.row_offsets[x]; k < fwd.row_offsets[x + 1]; ++k)
        drift[fwd.col_indices[k]] += relay * fwd.values[k];
    return drift;
}

StepDecomposition decompose_step(const EstimatorState& state, SamplePair sample,
                                 const TransitionModel& model) {
    StepDecomposition d;
    d.drift = drift_vector(state.z, state.c, model, sample.x);

    // realized bracket: 1{x=i}(1 - z(i)) + c z(x) 1{y=i}
    std::vector<double> realized(state.z.size(), 0.0);
    realized[sample.x] = 1.0 - state.z[sample.x];
    realized[sample.y] += state.c * state.z[sample.x];

    d.noise.resize(state.z.size());
    for (std::size_t i = 0; i < realized.size(); ++i)
        d.noise[i] = realized[i] - d.drift[i];
    return d;
}

}  // namespace surfer::diag
