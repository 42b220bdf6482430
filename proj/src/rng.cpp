#include "coda/rng.hpp"

#include <cmath>

#include "coda/errors.hpp"

namespace coda {

// https://prng.di.unimi.it/splitmix64.c
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(stream + 0x1234567890abcdefULL));
    h = mix64(h ^ mix64(substream + 0xfedcba0987654321ULL));
    const std::uint64_t h2 = mix64(h);
    const std::uint64_t h3 = mix64(h2);
    const std::uint64_t h4 = mix64(h3);
    std::seed_seq seq{
        static_cast<std::uint32_t>(h),  static_cast<std::uint32_t>(h >> 32),
        static_cast<std::uint32_t>(h2), static_cast<std::uint32_t>(h2 >> 32),
        static_cast<std::uint32_t>(h3), static_cast<std::uint32_t>(h3 >> 32),
        static_cast<std::uint32_t>(h4), static_cast<std::uint32_t>(h4 >> 32)};
    gen_.seed(seq);
}

double RandomStream::uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    // Box-Muller; 1-u keeps the log argument in (0, 1].
    const double u = 1.0 - uniform01();
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * M_PI * v;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

std::size_t RandomStream::uniform_index(std::size_t n) {
    const auto x = static_cast<unsigned __int128>(gen_());
    return static_cast<std::size_t>((x * n) >> 64);
}

double RandomStream::chi_square(int dof) {
    if (dof < 1) throw InvalidDf("chi-square degrees of freedom must be >= 1");
    double s = 0.0;
    for (int i = 0; i < dof; ++i) {
        const double z = normal();
        s += z * z;
    }
    return s;
}

}  // namespace coda
