// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/rng.hpp"

namespace corrigid {

std::uint64_t SplitMix64::next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SplitMix64 SplitMix64::split() { return SplitMix64(next()); }

Rat SplitMix64::uniform(const Rat& lo, const Rat& hi) {
    std::uint64_t t = next() >> 32;  // 32 fresh bits
    Rat frac(static_cast<unsigned long>(t), 1UL);
    frac /= Rat(Int(1) << 32);
    return lo + (hi - lo) * frac;
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Rejection sampling over the top of the range keeps the draw unbiased.
    if (bound == 0) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
}

SplitMix64 seeded_rng(std::uint64_t seed, std::uint64_t n, std::uint64_t m, std::uint64_t tag) {
    SplitMix64 mixer(seed);
    std::uint64_t s = mixer.next() ^ (n * 0xA24BAED4963EE407ULL);
    SplitMix64 mixer2(s);
    s = mixer2.next() ^ (m * 0x9FB21C651E98DF25ULL);
    SplitMix64 mixer3(s);
    return SplitMix64(mixer3.next() ^ tag);
}

}  // namespace corrigid
