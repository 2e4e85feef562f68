#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace duocover {

/// Seed used when none is given on the command line or in DUOCOVER_SEED.
inline constexpr std::uint64_t kDefaultSeed = 20100901;

/// Seedable random source whose output depends only on the seed.
///
/// The std distributions are implementation-defined, so the uniform and
/// normal draws here are built directly on the mt19937_64 bit stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent generator for stream `index` of `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), rejection sampled.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t draw = next();
        while (draw >= limit) draw = next();
        return draw % bound;
    }

    /// Standard normal via the polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// splitmix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace duocover
