#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace adex {

/// Deterministic 64-bit generator (splitmix64 core). The standard library
/// distributions are not bit-stable across implementations, so everything
/// stochastic in this project goes through this type.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one value per call; the pair's
    /// second half is discarded to keep call sites order-independent).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0)
            u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    std::uint64_t state_;
};

/// FNV-1a over a byte string; used for stage seeds and artifact hashes.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Stable per-(stage, unit) seed derivation from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                                 std::string_view unit = {}) {
    std::uint64_t h = fnv1a(stage);
    h = fnv1a("/", h);
    h = fnv1a(unit, h);
    return h ^ (master * 0x9e3779b97f4a7c15ULL);
}

} // namespace adex
