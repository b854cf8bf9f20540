#ifndef CVPHY_RNG_HPP
#define CVPHY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "cvphy/signal.hpp"

namespace cvphy {

namespace detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014); used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/**
 * Deterministic pseudorandom source. The generator is std::mt19937_64, whose
 * output stream is fully specified by the C++ standard, so a given seed
 * reproduces the same stream on every platform. Gaussian variates use an
 * explicit Box-Muller transform rather than std::normal_distribution (whose
 * algorithm is implementation-defined).
 *
 * A SeededRng is single-owner: never share one across threads. Parallel work
 * derives independent child generators with split().
 */
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal variate (Box-Muller, second value cached).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double gaussian(double mean, double variance) {
        return mean + std::sqrt(variance) * gaussian();
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`
    /// (so each real dimension carries variance/2).
    Complex complex_gaussian(double variance) {
        const double s = std::sqrt(variance * 0.5);
        return {s * gaussian(), s * gaussian()};
    }

    /// Derive an independent child generator. Deterministic in (seed, stream),
    /// so parallel trials can each own stream = trial index.
    SeededRng split(std::uint64_t stream) const {
        return SeededRng(detail::splitmix64(seed_ ^ detail::splitmix64(stream)));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// n i.i.d. circularly-symmetric complex Gaussian samples with total variance
/// `variance` per sample. variance == 0 yields an all-zero signal.
inline ComplexSignal sample_complex_gaussian(SeededRng& rng, std::size_t n, double variance) {
    if (variance < 0.0)
        throw std::invalid_argument("sample_complex_gaussian: negative variance");
    ComplexSignal out(n, Complex(0.0, 0.0));
    if (variance > 0.0)
        for (std::size_t i = 0; i < n; ++i) out[i] = rng.complex_gaussian(variance);
    return out;
}

} // namespace cvphy

#endif
