// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "corrigid/divisible.hpp"

namespace corrigid {

// Four ways to produce valid MDivisibleSets. All sampling uses dyadic
// rationals (32 fractional bits), so outputs are exact and reproducible:
// the same (seed, n, m) always yields the same set. The random generators
// validate their output and resample on the rare collision; after a bounded
// number of attempts they give up with std::runtime_error("generator stuck").

// Values start high (in (0,1]) and only shrink where a player is active.
// Each round activates every player with probability 1/2 (empty rounds are
// redrawn), divides each active player's previous value by r in [2,4), and
// redraws inactive values from [1/2,1). Winning values land in
// [max(1/2, v+1/4), 1), which pins the margins: g_i <= 2 and alpha_j <= 4
// on every output, and |S| concentrates near n*m/2.
MDivisibleSet gen_random_high_values(int n, int m, std::uint64_t seed);

// Every player active every round. Round 1 is the all-ones profile; each
// later round multiplies every value by a fresh r in [2,4). Winning values
// sit in [2v, 4v). Guarantees |S| = n*m and c_S <= (2n + 2^m) / (n*m).
MDivisibleSet gen_geometric(int n, int m, std::uint64_t seed);

// Deterministic family in which the winner is never among the k highest
// bidders. Players 0..n-k-1 are active in every round j (1-based) with base
// value eps^(1-j); the k remaining players hold x_j = eps^(-j)*(1+eps) +
// (1+eps); winning values are x_j - eps, which k players always exceed.
// Requires 0 < eps < 1 and 1 <= k, k + 2 < n. Throws std::invalid_argument
// when the parameters violate those bounds or produce a colliding set.
MDivisibleSet gen_k_excluded(int n, int k, int m, const Rat& eps);

// One member of a combinatorial family indexed by its activity pattern:
// pattern[j] lists round j's active players, all drawn from {1..n-1} (player
// 0 is never active) and all rounds the same size. Active values shrink as
// in gen_random_high_values; player 0's value each round is drawn above
// every winning value and every other value of that round, so player 0 is
// the strict maximum of every instance yet never wins.
MDivisibleSet gen_family_member(int n, int m, const std::vector<std::vector<int>>& pattern,
                                std::uint64_t seed);

}  // namespace corrigid
