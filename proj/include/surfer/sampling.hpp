#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surfer/graph.hpp"
#include "surfer/rng.hpp"

namespace surfer {

// One split-sampling draw: x uniform over nodes, y from row x of the model.
struct SamplePair {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
};

// Seeded sampler over a fixed model. Walker alias tables give O(1)
// successor draws; the uniform and successor picks consume separate
// substreams of the seed, so the sequence depends only on (model, seed).
// Single-owner mutable; draws never allocate.
class Sampler {
public:
    Sampler(const TransitionModel& model, std::uint64_t seed);

    SamplePair draw();

    // Fills out with out.size() draws, consuming the stream exactly as the
    // same number of successive draw() calls would.
    void draw_batch(std::span<SamplePair> out);
    std::vector<SamplePair> draw_batch(std::size_t m);

    const TransitionModel& model() const { return *model_; }
    std::uint64_t seed() const { return seed_; }

    // Probability the alias table assigns to (row, col slot k within the
    // row); exposed for table-reconstruction checks.
    double slot_keep_probability(std::uint64_t k) const { return threshold_[k]; }
    std::uint32_t slot_alias(std::uint64_t k) const { return alias_[k]; }

private:
    const TransitionModel* model_;
    std::uint64_t seed_;
    std::vector<double> threshold_;   // per CSR slot, aligned with model storage
    std::vector<std::uint32_t> alias_;  // node id taken when the coin misses
    Rng rng_x_;
    Rng rng_y_;
};

}  // namespace surfer
