#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "mstates/io_util.hpp"

namespace mstates {

// splitmix64 finalizer. Decorrelates nearby seed values before they
// reach the generator, so seed and seed+1 give unrelated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Named-stream derivation: every consumer of randomness asks for the
// root seed mixed with a stream name ("synth/epoch/7", "kmeans/restart/3").
// Adding a new consumer never perturbs existing streams, and parallel
// workers draw from disjoint streams regardless of schedule.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stream) {
    return splitmix64(root ^ fnv1a64(stream));
}

// mt19937_64 is fully specified by the standard, so a given seed yields
// the same raw stream on every platform.
inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view stream = "default") {
    return std::mt19937_64(derive_seed(root, stream));
}

// Marsaglia polar normal sampler. std::normal_distribution's algorithm is
// implementation-defined; this keeps synthetic panels and k-means seeding
// reproducible across standard libraries.
class NormalSampler {
public:
    double operator()(std::mt19937_64& rng) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform_pm1(rng);
            v = uniform_pm1(rng);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

private:
    static double uniform_pm1(std::mt19937_64& rng) {
        // 53-bit mantissa draw in [0,1), mapped to (-1,1).
        const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return 2.0 * u01 - 1.0;
    }

    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Uniform integer in [0, n). Rejection sampling keeps the draw exact and
// portable; std::uniform_int_distribution is implementation-defined.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Uniform double in [0,1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mstates
