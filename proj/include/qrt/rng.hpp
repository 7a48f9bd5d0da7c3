// rng.hpp - deterministic seeded random streams (splitmix64 / xoshiro256**)
//
// All stochastic code in this library draws from these generators instead of
// <random> distributions, so results are bit-identical across platforms and
// standard-library implementations.

#pragma once

#include <cstdint>
#include <cmath>

namespace qrt {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stateless mix of a single word (one splitmix64 step).
inline std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    // Substream for a work block: the master seed is mixed first and then
    // XORed with the block index before a second mix, so nearby (seed, block)
    // pairs never share a stream. Results are therefore independent of how
    // blocks are distributed over threads.
    static Rng substream(std::uint64_t seed, std::uint64_t block) {
        std::uint64_t sm = seed;
        std::uint64_t key = splitmix64(sm) ^ block;
        return Rng(splitmix64(key));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased uniform integer in [0, n), n >= 1.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

} // namespace qrt
