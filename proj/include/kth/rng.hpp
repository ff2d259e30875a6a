// rng.hpp — deterministic PRNG: xoshiro256** seeded via splitmix64.
// One independent stream per trial, derived from (master seed, trial index).
#pragma once
#include <cstdint>

namespace kth {

inline uint64_t splitmix64(uint64_t& x) {
    uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Xoshiro256 {
    uint64_t s[4];

    explicit Xoshiro256(uint64_t seed = 0) {
        uint64_t x = seed;
        for (auto& w : s) w = splitmix64(x);
    }

    static inline uint64_t rotl(uint64_t v, int r) { return (v << r) | (v >> (64 - r)); }

    uint64_t next() {
        uint64_t result = rotl(s[1] * 5, 7) * 9;
        uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Lemire's unbiased bounded draw.
    uint64_t bounded(uint64_t n) {
        uint64_t x = next();
        __uint128_t m = (__uint128_t)x * n;
        uint64_t lo = (uint64_t)m;
        if (lo < n) {
            uint64_t thr = (0 - n) % n;
            while (lo < thr) {
                x = next();
                m = (__uint128_t)x * n;
                lo = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    // uniform in (0,1); never returns 0 (safe for log()).
    double uniform01() {
        return ((next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Stream seed for one trial of one experiment cell.
inline uint64_t trial_seed(uint64_t master_seed, uint64_t cell_tag, uint64_t trial) {
    uint64_t x = master_seed;
    uint64_t a = splitmix64(x);
    x = a ^ (cell_tag * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL);
    uint64_t b = splitmix64(x);
    x = b ^ (trial + 0xd1b54a32d192ed03ULL);
    return splitmix64(x);
}

} // namespace kth
