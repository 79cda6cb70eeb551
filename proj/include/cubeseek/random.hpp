#pragma once

#include <cstdint>
#include <random>

namespace cubeseek {

/// splitmix64 finaliser; used to decorrelate consecutive seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seedable 64-bit stream (mt19937_64 behind a splitmix64-mixed seed).
/// Integer and real draws are implemented here rather than through <random>
/// distributions so trajectories are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

    /// Independent stream for trial `index` of a batch seeded with `base_seed`.
    static Rng for_trial(std::uint64_t base_seed, std::uint64_t index) { return Rng(base_seed + index); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t next() { return engine_(); }

    /// Uniform on the open interval (0, 1).
    double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [lo, hi], unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == UINT64_MAX) return static_cast<std::int64_t>(next());
        const std::uint64_t n = span + 1;
        // 2^64 mod n values at the top of the engine's range would bias the modulo.
        const std::uint64_t rem = (UINT64_MAX % n + 1) % n;
        std::uint64_t v = next();
        while (rem != 0 && v > UINT64_MAX - rem) v = next();
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + v % n);
    }

    /// True with probability p.
    bool bernoulli(double p) { return uniform() < p; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace cubeseek
