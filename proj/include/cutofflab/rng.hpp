#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cutofflab {

// Deterministic random source. All distributions are implemented on top of the
// raw 64-bit stream so that a fixed (seed, workerCount) reproduces bit-identical
// output on every platform; std::normal_distribution and friends are
// implementation-defined and are not used.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // uniform on the open interval (0,1); never returns 0 or 1, so logs are safe
    double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller without spare caching (two uniforms per draw, stateless)
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double exponential() { return -std::log(uniform()); }

    // Knuth product method; large intensities are split into independent blocks
    long poisson(double lambda) {
        long total = 0;
        while (lambda > 30.0) {
            total += poissonSmall(30.0);
            lambda -= 30.0;
        }
        return total + poissonSmall(lambda);
    }

    // Chambers-Mallows-Stuck, symmetric case, unit scale
    double stableSymmetric(double alpha) {
        const double u = M_PI * (uniform() - 0.5);  // (-pi/2, pi/2)
        if (std::abs(alpha - 1.0) < 1e-12) return std::tan(u);
        const double e = exponential();
        const double s = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
        const double t = std::pow(std::cos(u - alpha * u) / e, (1.0 - alpha) / alpha);
        return s * t;
    }

  private:
    long poissonSmall(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        long k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    std::mt19937_64 gen_;
};

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent per-worker stream: (seed, workerIndex) -> derived seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t worker) {
    return splitmix64(seed ^ splitmix64(worker + 1));
}

}  // namespace cutofflab
