// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "corrigid/rational.hpp"

namespace corrigid {

// One valuation profile: values[i] is player i's value for the single item.
using Instance = std::vector<Rat>;

// values with one coordinate removed; the opponent profile a player observes.
using Profile = std::vector<Rat>;

struct WeightedInstance {
    Instance values;
    Rat prob;
};

// A finite joint prior over valuation profiles. Probabilities are positive
// and sum to exactly 1; instances are pairwise distinct.
struct JointDistribution {
    int n = 0;
    std::vector<WeightedInstance> support;
};

// Lexicographic comparison on rational vectors.
bool lex_less(const std::vector<Rat>& a, const std::vector<Rat>& b);

// Comparator for containers keyed by instances or profiles.
struct LexLess {
    bool operator()(const std::vector<Rat>& a, const std::vector<Rat>& b) const {
        return lex_less(a, b);
    }
};

Profile profile_without(const Instance& v, int player);

// Returns human-readable violations; empty means the distribution is valid.
std::vector<std::string> validate_distribution(const JointDistribution& d);

// Marginal of player i: (value, probability) sorted by value ascending.
std::vector<std::pair<Rat, Rat>> marginal(const JointDistribution& d, int player);

// Expected value of max_i v_i under d.
Rat expected_welfare(const JointDistribution& d);

// Row-stochastic matrix of conditionals for one player. Rows are the
// player's values ascending; columns are the distinct opponent profiles in
// lexicographic order. Entry (k, j) = Pr(profile j | value k), nonzero
// exactly when the combined instance lies in the support.
struct CPMatrix {
    int player = 0;
    std::vector<Rat> values;
    std::vector<Profile> profiles;
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> value_prob;    // marginal of each value
    std::vector<Rat> profile_prob;  // marginal of each profile
};

CPMatrix cp_matrix(const JointDistribution& d, int player);

// Exact rank over the rationals via fraction-free (Bareiss) elimination on
// the denominator-cleared matrix.
int rational_rank(const std::vector<std::vector<Rat>>& mat);

struct RankReport {
    bool full_rank = false;              // every player's matrix has rank |D_i|
    std::vector<int> ranks;              // per player
    std::vector<int> value_counts;       // |D_i| per player
};

RankReport full_rank_check(const JointDistribution& d);

}  // namespace corrigid
