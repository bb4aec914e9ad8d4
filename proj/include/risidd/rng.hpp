// Deterministic random streams.
//
// Every Monte Carlo trial owns one Rng seeded through a counter-mode
// splitmix64 derivation, so trials are reproducible in isolation and
// independent of execution order or thread count.  Gaussian variates are
// generated by an explicit Box-Muller transform instead of
// std::normal_distribution, whose output is not pinned down by the
// standard and varies across library implementations.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risidd {

// splitmix64 finalizer: a bijection on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives the seed of one (trial, value) cell from a base seed.
// The counter trial_index*2^20 + value_index is unique for
// value_index < 2^20, and splitmix64 is injective, so derived seeds
// never collide for a fixed base.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial_index,
                                std::uint64_t value_index) {
    const std::uint64_t counter = (trial_index << 20) | (value_index & 0xfffffULL);
    return splitmix64(splitmix64(base) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal, Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> cnormal(double variance) {
        const double s = std::sqrt(variance * 0.5);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace risidd
