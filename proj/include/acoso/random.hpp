#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

// Portable draws on top of mt19937_64. The standard distributions are
// implementation-defined, which would make seeded outputs differ across
// standard libraries.
namespace acoso::rng {

using Engine = std::mt19937_64;

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform in [lo, hi).
inline double uniform(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform01(engine);
}

/// Uniform integer in [0, bound), rejection sampled. `bound` must be > 0.
inline std::uint64_t below(Engine& engine, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = engine();
    } while (x >= limit);
    return x % bound;
}

/// Standard normal via Box-Muller.
inline double normal(Engine& engine) {
    constexpr double kTwoPi = 6.283185307179586476925;
    const double u1 = 1.0 - uniform01(engine);
    const double u2 = uniform01(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

template <typename T>
void shuffle(std::span<T> items, Engine& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(engine, i));
        std::swap(items[i - 1], items[j]);
    }
}

/// splitmix64 finalizer; used to derive independent child seeds.
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    return mix(mix(mix(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace acoso::rng
