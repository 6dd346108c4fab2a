#pragma once

#include <cstdint>

namespace lagdeconv {

/// Counter-based normal generator. Every draw is a pure function of
/// (seed, stream, index), so replicated runs are bit-identical regardless of
/// evaluation order.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    /// Uniform in (0, 1).
    double uniform(std::uint64_t stream, std::uint64_t index) const;

    /// Standard normal via Box-Muller on two keyed uniforms.
    double normal(std::uint64_t stream, std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

/// 64-bit finalizer-based hash of a (seed, stream, index, lane) tuple.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                           std::uint64_t lane);

}
