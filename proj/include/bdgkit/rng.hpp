#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bdgkit {

// Identifier of the random-variate pipeline below. Reports carry it so that
// reimplementations can match distributions (statistically, not bitwise).
inline constexpr const char* kRngAlgorithm = "mt19937_64+u53+box-muller/v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for an independent substream, e.g. one per path or per ensemble member.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// mt19937_64 is fully specified by the standard, and the conversions below are
// ours, so a given seed produces the same variates under any toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    bool coin() { return (engine_() >> 63) != 0; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(angle);
        has_spare_ = true;
        return r * std::cos(angle);
    }

    // Inversion sampler; intended for small means.
    std::uint64_t poisson(double mean) {
        const double u = uniform();
        double term = std::exp(-mean);
        double cdf = term;
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            term *= mean / static_cast<double>(k);
            cdf += term;
        }
        return k;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace bdgkit
