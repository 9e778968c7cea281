#pragma once
/*
Deterministic random streams for parallel Monte Carlo.

Seeding scheme (stable across releases, relied on by every experiment):
  - child_seed(master, r) is the (r+1)-th output of a splitmix64 sequence
    started at `master` (Steele/Lea/Flood construction, same as Java's
    SplittableRandom). Replication r of a run with master seed S always
    draws from RandomStream(child_seed(S, r)), independent of thread count.
  - RandomStream is xoshiro256++ (Blackman/Vigna, public domain), state
    filled from four successive splitmix64 outputs of the seed.

A "logical event" on a stream is one distribution draw (uniform01, normal,
bernoulli). normal() uses the Marsaglia polar method and consumes a
variable number of raw words; sequences stay reproducible because each
consumer owns its stream and draws serially.
*/

#include <cmath>
#include <cstdint>

namespace unbal {

constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += kGolden64;
    return mix64(state);
}

// (index+1)-th splitmix64 output of the sequence seeded with `master`.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * kGolden64);
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64_next(sm);
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static RandomStream child_of(std::uint64_t master, std::uint64_t index) {
        return RandomStream(child_seed(master, index));
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

    // uniform on [0,1), 53-bit resolution
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal, Marsaglia polar method
    double normal() {
        while (true) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                return u * std::sqrt(-2.0 * std::log(s) / s);
            }
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

} // namespace unbal
