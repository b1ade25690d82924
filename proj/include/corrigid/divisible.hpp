// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/distribution.hpp"
#include "corrigid/rational.hpp"

namespace corrigid {

// A partial allocation plan over n > 2 players, split into m rounds. Round j
// carries a base profile (the values everyone holds by default), a set of
// active players, and for each active player i a winning value u(j,i) above
// their base value. The plan says: when everybody else sits at round j's base
// profile and player i alone raises to u(j,i), player i gets the item.
//
// Structural rules, checked by validate_set:
//   - every active set is nonempty and all values are positive
//   - u(j,i) strictly exceeds the base value of i in round j
//   - no player repeats a base value across two different rounds, so every
//     punctured profile (v_j)_{-i} identifies its round unambiguously
//   - per player, the winning values are pairwise distinct and distinct from
//     all of that player's base values
struct MDivisibleSet {
    int n = 0;
    int m = 0;
    std::vector<Instance> base_vectors;             // m profiles of length n
    std::vector<std::vector<int>> active_sets;      // sorted player indices per round
    std::map<std::pair<int, int>, Rat> thresholds;  // (round j, player i) -> u(j,i)

    bool is_active(int j, int i) const;
    const Rat& threshold(int j, int i) const;  // requires is_active(j, i)
};

std::vector<std::string> validate_set(const MDivisibleSet& s);

// Derived quantities of a valid plan. For each ever-active player i let
// y(i,1) < ... < y(i,k_i) be their base values in the rounds they are active.
// The spread d_i = 1 - max consecutive ratio y(i,r)/y(i,r+1) measures how
// fast those values grow (d_i = 1/2 by convention when k_i = 1, so that the
// geometric tail attached to them later stays finite), and g_i = 1/d_i.
// Per round, alpha_j compares the round's highest base value against the
// smallest winning margin u - v among its active players. The quality score
//   c_S = (a * g_avg + m * alpha_avg) / |S|
// aggregates both: small c_S means many allocations per unit of spread and
// margin, which is what makes the embedded prior hard to exploit.
struct SetParameters {
    std::vector<int> active_players;                // sorted union of active sets
    int a = 0;                                      // |active_players|
    long long size = 0;                             // |S| = total (round, player) pairs
    std::map<int, std::vector<Rat>> sorted_values;  // i -> y(i,1..k_i) ascending
    std::map<int, Rat> d;                           // i -> d_i
    std::map<int, Rat> g;                           // i -> 1/d_i
    std::map<std::pair<int, int>, int> sigma;       // (i, j) -> 1-based rank of i's value in round j
    std::map<int, Rat> alpha;                       // j -> alpha_j
    Rat g_avg;
    Rat alpha_avg;
    Rat c_S;

    int k(int i) const { return static_cast<int>(sorted_values.at(i).size()); }
};

// Throws std::invalid_argument when s fails validate_set.
SetParameters parameters(const MDivisibleSet& s);

}  // namespace corrigid
