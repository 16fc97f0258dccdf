#pragma once

// Deterministic seeded randomness. All stochastic results derive from one
// run seed; per-shot streams are split with a mixing function so shot k is
// reproducible independently of threading or evaluation order. mt19937_64
// output is fixed by the standard, and the uniform/gaussian converters
// below avoid the implementation-defined std::distributions, so identical
// (seed, config) gives identical output everywhere.

#include <cmath>
#include <cstdint>
#include <random>

#include "units.hpp"

namespace biphoton {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97f4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(seed ^ splitmix64(stream + 0x1234567ULL)));
    }

    std::uint64_t integer() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal, Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

    // Index in [0, n) with probability proportional to weights[i].
    template <class Weights>
    std::size_t choose(const Weights& weights, double total) {
        const double r = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;
    }

    // Poisson sample by inversion (small means only).
    int poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            p *= uniform();
            ++k;
        } while (p > limit && k < 1000);
        return k - 1;
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace biphoton
