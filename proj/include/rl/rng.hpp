#pragma once

#include <cstdint>
#include <cmath>

namespace rl {

// SplitMix64. Used everywhere randomness is needed so that results are
// reproducible across platforms and independent of the standard library.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1)
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller; avoids std::normal_distribution which is not stable
    // across implementations.
    double gaussian() {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

// Counter-mode split: independent stream for (seed, index) pairs, used to
// give every experiment trial its own deterministic generator.
inline SplitMix64 split_stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    mix.next();
    return mix;
}

}  // namespace rl
