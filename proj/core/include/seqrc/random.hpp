#pragma once

#include <cstdint>
#include <random>

namespace seqrc {

/// Deterministic random stream. Draws are derived from raw mt19937_64 output
/// with our own conversions, so sequences are identical across standard
/// library implementations (std distributions are not).
class RandomStream {
public:
    /// `stream` separates independent sub-streams of the same seed, e.g. one
    /// per reservoir layer.
    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1).
    double uniform01();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Standard normal (Box-Muller, one cached spare).
    double normal();

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// splitmix64 finalizer; used to decorrelate (seed, stream) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace seqrc
