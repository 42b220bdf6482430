#pragma once

#include <cstdint>
#include <random>

namespace coda {

// SplitMix64 finalizer, used to derive well-separated substream seeds from
// (seed, stream, substream) triples.
std::uint64_t mix64(std::uint64_t z);

// Seeded random stream. All distribution transforms are implemented
// explicitly (no std::*_distribution) so that a given seed produces the same
// stream on every platform and standard library.
//
// Replicated computations derive one stream per replicate via substream();
// results are then independent of scheduling order.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : RandomStream(seed, 0, 0) {}
    RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

    static RandomStream substream(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t sub = 0) {
        return RandomStream(seed, stream, sub);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (pairs cached).
    double normal();

    // Uniform index in {0, ..., n-1} via 128-bit multiply (bias < n / 2^64).
    std::size_t uniform_index(std::size_t n);

    // Chi-square with integer degrees of freedom (sum of squared normals).
    double chi_square(int dof);

private:
    std::mt19937_64 gen_;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace coda
