#include "surfer/sampling.hpp"

#include <stdexcept>

namespace surfer {

Sampler::Sampler(const TransitionModel& model, std::uint64_t seed)
    : model_(&model),
      seed_(seed),
      rng_x_(seed, rng_stream::kStatePick),
      rng_y_(seed, rng_stream::kSuccessorPick) {
    // Vose alias construction per row. Slot k of a row keeps its own column
    // with probability threshold_[k] and falls through to alias_[k]
    // otherwise, so every draw costs one table lookup.
    const auto& csr = model.forward();
    threshold_.resize(csr.values.size());
    alias_.resize(csr.values.size());
    std::vector<double> scaled;
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < csr.n_rows; ++i) {
        const std::uint64_t begin = csr.row_offsets[i];
        const auto d = static_cast<std::uint32_t>(csr.row_offsets[i + 1] - begin);
        scaled.assign(csr.values.begin() + static_cast<std::ptrdiff_t>(begin),
                      csr.values.begin() + static_cast<std::ptrdiff_t>(begin + d));
        for (double& v : scaled) v *= d;
        small.clear();
        large.clear();
        for (std::uint32_t k = 0; k < d; ++k)
            (scaled[k] < 1.0 ? small : large).push_back(k);
        while (!small.empty() && !large.empty()) {
            const std::uint32_t s = small.back();
            const std::uint32_t l = large.back();
            small.pop_back();
            threshold_[begin + s] = scaled[s];
            alias_[begin + s] = csr.col_indices[begin + l];
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::uint32_t k : large) {
            threshold_[begin + k] = 1.0;
            alias_[begin + k] = csr.col_indices[begin + k];
        }
        for (std::uint32_t k : small) {  // residual rounding mass
            threshold_[begin + k] = 1.0;
            alias_[begin + k] = csr.col_indices[begin + k];
        }
    }
}

SamplePair Sampler::draw() {
    const auto& csr = model_->forward();
    const auto x = static_cast<std::uint32_t>(rng_x_.next_below(csr.n_rows));
    const std::uint64_t begin = csr.row_offsets[x];
    const std::uint64_t d = csr.row_offsets[x + 1] - begin;
    const std::uint64_t slot = begin + rng_y_.next_below(d);
    const double coin = rng_y_.next_double();
    const std::uint32_t y =
        coin < threshold_[slot] ? csr.col_indices[slot] : alias_[slot];
    return SamplePair{x, y};
}

void Sampler::draw_batch(std::span<SamplePair> out) {
    if (out.empty()) throw std::invalid_argument("batch size must be at least 1");
    for (SamplePair& p : out) p = draw();
}

std::vector<SamplePair> Sampler::draw_batch(std::size_t m) {
    if (m == 0) throw std::invalid_argument("batch size must be at least 1");
    std::vector<SamplePair> out(m);
    draw_batch(std::span<SamplePair>(out));
    return out;
}

}  // namespace surfer
