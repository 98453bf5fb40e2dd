#pragma once

#include <cstdint>

namespace mgsim {

/// splitmix64 step; advances the state and returns the next value.
/// Used to derive independent stream seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic, platform-independent generator (xorshift64*).
/// Identical sequences for identical seeds on every platform; no libc rand,
/// no std::mt19937 distribution differences.
class Xorshift64Star {
  public:
    explicit Xorshift64Star(std::uint64_t seed = 1) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        // run the seed through splitmix64 so small seeds still give good streams
        std::uint64_t s = seed;
        state_ = splitmix64(s);
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;  // state must stay nonzero
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1DULL;
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller; pairs cached.
    double gaussian();

  private:
    std::uint64_t state_ = 1;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Seed for a named substream of a master seed. Stream index 0 is reserved
/// for the run itself; channels and noise sources take fixed indices.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= stream; ++i) out = splitmix64(s);
    return out;
}

}  // namespace mgsim
