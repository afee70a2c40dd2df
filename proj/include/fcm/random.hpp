#ifndef FCM_RANDOM_HPP
#define FCM_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "fcm/error.hpp"

namespace fcm {

/// SplitMix64 mixing step; used to spread seed material.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: stream `index` of a master seed. Trial i
/// always gets the same seed no matter in which order trials execute.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x516cc3a1a368dbc5ULL));
}

/// Deterministic RNG. The engine is std::mt19937_64 (its output sequence is
/// pinned by the standard); every distribution on top of it is implemented
/// here so that sampled values are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). Masked rejection keeps it unbiased.
    std::uint64_t uniform_below(std::uint64_t n) {
        require(n > 0, ErrorCode::invalid_argument, "uniform_below: n must be positive");
        if (n == 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll(n - 1);
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= n);
        return v;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_double() < p; }

    /// Poisson draw via Knuth's product method; fine for the small means
    /// used here (noise counts per frame).
    std::uint64_t poisson(double mean) {
        require(mean >= 0.0, ErrorCode::invalid_argument, "poisson: mean must be >= 0");
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_double();
        } while (p > limit);
        return k - 1;
    }

    /// k distinct values from [0, n), by partial Fisher-Yates. Output order is
    /// the sampled order (itself uniformly random).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        require(k <= n, ErrorCode::invalid_argument,
                "sample_without_replacement: k exceeds population");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform_below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fcm

#endif  // FCM_RANDOM_HPP
