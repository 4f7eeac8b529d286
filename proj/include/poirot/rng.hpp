#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace poirot {

/// Seeded generator used for every random draw in the library. Passed by
/// value or reference explicitly; there is no hidden global state.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform double in [0, 1) with 53 random bits. Avoids
/// std::uniform_real_distribution so the byte stream is pinned by the
/// engine alone.
inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_double(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_double(rng);
}

/// Uniform integer in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform_double(rng) * static_cast<double>(n)) % n;
}

/// Standard normal via Box-Muller. One value per call; the discarded pair
/// member keeps the draw count predictable.
inline double gaussian(Rng& rng) {
    double u1 = uniform_double(rng);
    double u2 = uniform_double(rng);
    while (u1 <= 0.0) u1 = uniform_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace poirot
