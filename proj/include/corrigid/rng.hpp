// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "corrigid/rational.hpp"

namespace corrigid {

// SplitMix64: a tiny 64-bit splittable generator (Steele/Lea/Flood mixing
// constants). Every sampler in the library draws from one of these, seeded
// deterministically from user-visible integers, so identical inputs always
// reproduce identical artifacts byte for byte.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Derives an independent child stream; used to keep the draw order of
    // one phase insensitive to how many draws another phase consumed.
    SplitMix64 split();

    // Uniform draw from [lo, hi): lo + (hi-lo) * t / 2^32 with t a fresh
    // 32-bit integer. Samples are exact dyadic-step rationals, so collisions
    // are detectable and downstream arithmetic stays exact.
    Rat uniform(const Rat& lo, const Rat& hi);

    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    bool coin() { return (next() >> 63) != 0; }

private:
    std::uint64_t state_;
};

// Folds the generation parameters into one root seed so that (seed, n, m)
// fully determine a generator's output.
SplitMix64 seeded_rng(std::uint64_t seed, std::uint64_t n, std::uint64_t m, std::uint64_t tag);

}  // namespace corrigid
