#pragma once
#include <cstdint>

namespace csplab {

// SplitMix64 step. All randomness in the project flows through this so that
// results are byte-identical across platforms (the standard distributions
// make no such guarantee).
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream for trial number `trial` of a campaign.
inline uint64_t trial_seed(uint64_t master, uint64_t trial) {
    uint64_t s = master ^ (0xbf58476d1ce4e5b9ULL * (trial + 1));
    splitmix64(s);
    return splitmix64(s);
}

struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() { return splitmix64(state); }

    // Uniform in [0, n). Modulo bias is ~n/2^64, irrelevant at desk scale.
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }

    // Uniform in [lo, hi], inclusive.
    int range(int lo, int hi) {
        if (hi < lo) return lo;
        return lo + int(below(uint64_t(hi - lo) + 1));
    }

    double real() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }

    bool chance(double p) { return real() < p; }
};

} // namespace csplab
