#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace afslab {

// Deterministic RNG used everywhere seeds appear in the public API.
// std::mt19937_64 output is fully specified by the standard; the mappings
// below avoid std::uniform_real_distribution / std::normal_distribution,
// whose streams are implementation-defined. Identical seeds therefore give
// bit-identical results on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection sampling keeps the draw exactly uniform
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// splitmix64 hash step; used to derive independent child seeds.
inline std::uint64_t hash_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for a (stream, index) pair within a parent seed.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    return hash_seed(hash_seed(parent ^ 0xa5a5a5a55a5a5a5aULL) + hash_seed(stream) + index);
}

}  // namespace afslab
