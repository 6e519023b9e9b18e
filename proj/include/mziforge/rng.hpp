#pragma once

#include <cstdint>

namespace mziforge {

/// Deterministic, portable random stream (xoshiro256** seeded through
/// splitmix64). Distinct (seed, stream) pairs give statistically
/// independent sequences, which is what lets Monte-Carlo iterations run
/// in any order or thread count and still reproduce bit-identical
/// results: iteration i always owns stream i.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();

    /// Standard normal via Box-Muller; always consumes two uniforms.
    double gaussian();
    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

private:
    std::uint64_t s_[4];
};

} // namespace mziforge
