#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "gaitlab/geometry.hpp"

namespace gaitlab {

// splitmix64 mixing step.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent per-individual evaluation seed from the run seed and the
// individual's creation id, so concurrent evaluation order cannot change
// results.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t id) {
    return splitmix64(base ^ splitmix64(id + 1));
}

// mt19937_64 with hand-coded uniform/normal draws. The engine sequence is
// fixed by the standard; std::*_distribution sequences are not, and the
// experiment outputs must be byte-reproducible across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0,n), unbiased; n >= 1
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        std::uint64_t x;
        do {
            x = engine_();
        } while (x < threshold);
        return x % n;
    }

    // standard normal, Box-Muller
    double gaussian() {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace gaitlab
