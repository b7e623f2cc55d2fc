#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>

namespace swe {

/// splitmix64 state step + finalizer (Steele/Lea/Flood constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mixes a tuple of words into one 64-bit key. Streams for different
/// (seed, replicate, row, purpose) tuples are derived through this, so the
/// sampling order never depends on scheduling.
inline std::uint64_t mix64(std::initializer_list<std::uint64_t> words) {
    std::uint64_t state = 0x6A09E667F3BCC909ULL;  // sqrt(2) fraction bits
    for (std::uint64_t w : words) {
        state ^= w + 0x9E3779B97F4A7C15ULL + (state << 6) + (state >> 2);
        state = splitmix64(state) ^ (state << 1);
    }
    return splitmix64(state);
}

/// xoshiro256++ (Blackman/Vigna), seeded through splitmix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// uniform double in [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// uniform double in (0, 1]  (safe under log)
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Fills `out` with i.i.d. standard normals (Box–Muller). Implemented in a
/// fast-math translation unit; the output is a deterministic function of the
/// generator state.
void fill_standard_normal(Xoshiro256pp& rng, std::span<double> out);

}  // namespace swe
