#pragma once

#include <cstdint>

namespace rlops {

// Deterministic 64-bit generator (SplitMix64, Steele et al.).
//
// The standard <random> engines are portable but the distributions are
// implementation-defined, which breaks bit-for-bit reproducibility across
// standard libraries. Every sampled stream in this project goes through
// this generator instead. One instance per run; cells of an experiment
// derive independent streams via derive_seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform in [0, n), n > 0. Multiply-shift bounding; bias is O(n/2^64).
    int uniform_int(int n) {
        return static_cast<int>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
    }

private:
    std::uint64_t state_;
};

// Stream splitting: hash a base seed with cell coordinates so that every
// (run, cell) pair owns a disjoint, reproducible stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    SplitMix64 g(base);
    std::uint64_t h = g.next_u64() ^ (a * 0xff51afd7ed558ccdULL);
    SplitMix64 g2(h);
    return g2.next_u64() ^ (b * 0xc4ceb9fe1a85ec53ULL);
}

} // namespace rlops
