#pragma once

#include <cassert>
#include <cstdint>

namespace surfer {

// Counter-based 64-bit generator built on the splitmix64 finalizer.
// Output k of stream s under seed q is mix(key(q, s) + (k+1) * GAMMA); there
// is no hidden state beyond the counter, so substreams are independent of
// scheduling and sequences reproduce bit-for-bit across platforms.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : key_(derive_key(seed, stream)) {}

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

    // 53-bit draw in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n) by multiply-shift reduction of a 64-bit
    // draw; draws below the wrap-around threshold are rejected, so the
    // result carries no modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        assert(n > 0);
        unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
        auto low = static_cast<std::uint64_t>(wide);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                wide = static_cast<unsigned __int128>(next_u64()) * n;
                low = static_cast<std::uint64_t>(wide);
            }
        }
        return static_cast<std::uint64_t>(wide >> 64);
    }

    std::uint64_t counter() const { return counter_; }

private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
        return mix(mix(seed + kGamma) ^ mix(stream * kGamma + 1));
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Substream identifiers. Independent consumers of the same seed must draw
// from distinct streams.
namespace rng_stream {
inline constexpr std::uint64_t kStatePick = 0;      // uniform state draws
inline constexpr std::uint64_t kSuccessorPick = 1;  // per-row successor draws
inline constexpr std::uint64_t kGraphGen = 16;      // synthetic graph construction
inline constexpr std::uint64_t kSimplex = 32;       // simplex Monte Carlo
}  // namespace rng_stream

}  // namespace surfer
