#pragma once

#include <array>
#include <cstdint>

namespace shavlab {

// Counter-based pseudorandom generator (Philox 4x32, 10 rounds).
//
// Output depends only on (seed, stream, position), so any consumer that owns
// a stream id produces the same values no matter which thread runs it or in
// what order streams are processed. That property is what makes every Monte
// Carlo estimate in this project independent of the worker count.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint32_t next_u32();

    // Uniform in [0,1) with 53 random bits.
    double next_unit();

    // Standard normal via Box-Muller; second value of each pair is cached.
    double next_normal();

    // Uniform integer in [0, n), n > 0. Uses rejection to stay unbiased.
    std::uint64_t next_below(std::uint64_t n);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace shavlab
