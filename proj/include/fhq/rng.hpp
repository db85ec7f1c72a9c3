#ifndef FHQ_RNG_HPP
#define FHQ_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace fhq {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Substream seed for work unit `index` under `master`. Adding units never
/// changes the seeds of earlier ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) ^ (0xD1B54A32D192ED03ull * (index + 1)));
}

using Engine = std::mt19937_64;

/// CN(0, variance): independent real and imaginary parts of variance/2.
inline std::complex<double> complex_normal(Engine& engine, double variance) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const double sd = std::sqrt(0.5 * variance);
    const double re = unit(engine);
    const double im = unit(engine);
    return {sd * re, sd * im};
}

}  // namespace fhq

#endif  // FHQ_RNG_HPP
