#pragma once

// Reproducible random streams. A stream is keyed by (master seed, counters);
// the key is hashed with SplitMix64 finalizers into the seed of an
// independent mt19937_64, so stream i is the same no matter which thread or
// in which order it is consumed.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace cusp::rng {

using Engine = std::mt19937_64;

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a 64-bit key from a master seed and a list of counters.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
    std::uint64_t key = mix64(seed);
    for (std::uint64_t c : counters) key = mix64(key ^ mix64(c + 0x632be59bd9b4e019ULL));
    return key;
}

inline Engine stream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) {
    return Engine(derive(seed, counters));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

/// Exp(1) variate by inversion.
inline double exponential1(Engine& g) { return -std::log1p(-uniform01(g)); }

/// Fills `out` with independent standard normals (Marsaglia polar method,
/// both variates of each accepted pair are used).
inline void fill_normal(Engine& g, std::span<double> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform01(g) - 1.0;
            v = 2.0 * uniform01(g) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        out[i++] = u * f;
        if (i < out.size()) out[i++] = v * f;
    }
}

}  // namespace cusp::rng
