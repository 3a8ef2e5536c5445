#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace noisegate {

/// Deterministic, splittable random generator (xoshiro256++ seeded via
/// splitmix64). Every concurrent unit of work in the library derives its own
/// substream from (seed, path...) so parallel schedules cannot change results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    /// Derives an independent stream from a seed and an index path, e.g.
    /// substream(seed, {kBootstrap, iteration}).
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        std::uint64_t x = seed;
        for (std::uint64_t p : path) {
            std::uint64_t salted = p + 0x9e3779b97f4a7c15ULL;
            x ^= splitmix64(salted);
            x = splitmix64(x);
        }
        return Rng(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; two uniforms per draw, no cached spare.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Uniform index in [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n) {
        // Lemire multiply-shift; bias is unmeasurable for the sizes used here.
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

/// Stream identifiers used when deriving substreams, kept in one place so the
/// derivations never collide.
namespace streams {
inline constexpr std::uint64_t kBootstrapDraw = 1;
inline constexpr std::uint64_t kBootstrapTrain = 2;
inline constexpr std::uint64_t kBootstrapTune = 3;
inline constexpr std::uint64_t kTuneCell = 4;
inline constexpr std::uint64_t kForestTree = 5;
inline constexpr std::uint64_t kNoisyWindow = 6;
inline constexpr std::uint64_t kRankShiftRep = 7;
inline constexpr std::uint64_t kSynthetic = 8;
inline constexpr std::uint64_t kQuantaBin = 9;
inline constexpr std::uint64_t kExperiment = 10;
inline constexpr std::uint64_t kIncrementalTune = 11;
}  // namespace streams

}  // namespace noisegate
