#pragma once

#include <cstdint>
#include <cstddef>

namespace ens {

// The one PRNG used everywhere results must be reproducible bit-for-bit
// across platforms. std::mt19937 would be portable but the standard
// distributions are not, so we roll the few mappings we need by hand.
//
// Generator: splitmix64 (Steele, Lea, Vigna).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits of mantissa.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, bound). Multiply-shift mapping (Lemire);
    // bias is below 2^-64, acceptable for sampling and tie-breaking.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(next_below(n));
    }

private:
    std::uint64_t state_;
};

// Derives an independent seed stream for component `stream` of an ensemble
// (or tree of a forest, fold of a split, ...). One splitmix64 step over the
// mixed inputs keeps streams decorrelated even for adjacent indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    SplitMix64 g(master ^ (stream * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL));
    return g.next();
}

// FNV-1a over raw bytes; used to fold tie sets / vote tallies into the
// tie-break seed so that identical inputs always break ties identically.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ens
