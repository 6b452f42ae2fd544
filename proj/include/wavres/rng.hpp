#pragma once

#include <cmath>
#include <cstdint>

#include "wavres/errors.hpp"

namespace wavres {

// SplitMix64 step. Used both as the core generator and to derive
// independent streams from a master seed, so that per-ray / per-pair
// work is reproducible regardless of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Inverse of the standard normal CDF (Acklam's rational approximation,
// relative error ~1.15e-9). Deterministic alternative to
// std::normal_distribution, whose output is implementation-defined.
inline double inverse_normal_cdf(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_normal_cdf: p outside (0,1)");
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Deterministic PRNG with the distributions the toolkit needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream: hash of (seed, index). Streams for
    // different indices are decorrelated, so parallel producers can each
    // own one without the result depending on scheduling.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ull + index * 0xD1B54A32D192ED03ull);
        splitmix64(s);
        return Rng(s);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1), safe as a CDF argument.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return inverse_normal_cdf(uniform_open()); }

    // Poisson sample: CDF inversion below mean 30, rounded normal
    // approximation above. The approximation trades last-digit fidelity
    // for cross-platform reproducibility.
    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw DomainError("poisson: negative mean");
        if (mean == 0.0) return 0;
        if (mean < 30.0) {
            double u = uniform_open();
            double p = std::exp(-mean);
            double cdf = p;
            std::uint64_t k = 0;
            while (u > cdf && k < 1000) {
                ++k;
                p *= mean / static_cast<double>(k);
                cdf += p;
            }
            return k;
        }
        double n = std::floor(mean + std::sqrt(mean) * normal() + 0.5);
        return n <= 0.0 ? 0 : static_cast<std::uint64_t>(n);
    }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace wavres
