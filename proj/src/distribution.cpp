// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/distribution.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace corrigid {

bool lex_less(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Profile profile_without(const Instance& v, int player) {
    Profile p;
    p.reserve(v.size() - 1);
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
        if (i != player) p.push_back(v[i]);
    return p;
}

std::vector<std::string> validate_distribution(const JointDistribution& d) {
    std::vector<std::string> issues;
    if (d.n < 1) issues.push_back("player count must be at least 1");
    if (d.support.empty()) issues.push_back("support is empty");
    Rat total = 0;
    std::set<Instance, decltype(&lex_less)> seen(&lex_less);
    for (size_t k = 0; k < d.support.size(); ++k) {
        const auto& w = d.support[k];
        if (static_cast<int>(w.values.size()) != d.n)
            issues.push_back("instance " + std::to_string(k) + " has wrong arity");
        for (const auto& v : w.values)
            if (v < 0) {
                issues.push_back("instance " + std::to_string(k) + " has a negative value");
                break;
            }
        if (w.prob <= 0)
            issues.push_back("instance " + std::to_string(k) + " has non-positive probability");
        total += w.prob;
        if (!seen.insert(w.values).second)
            issues.push_back("instance " + std::to_string(k) + " duplicates an earlier instance");
    }
    if (!d.support.empty() && total != 1)
        issues.push_back("probabilities sum to " + format_rational(total) + ", expected 1/1");
    return issues;
}

std::vector<std::pair<Rat, Rat>> marginal(const JointDistribution& d, int player) {
    std::map<Rat, Rat> acc;
    for (const auto& w : d.support) acc[w.values[player]] += w.prob;
    return {acc.begin(), acc.end()};
}

Rat expected_welfare(const JointDistribution& d) {
    Rat out = 0;
    for (const auto& w : d.support) out += w.prob * *std::max_element(w.values.begin(), w.values.end());
    return out;
}

CPMatrix cp_matrix(const JointDistribution& d, int player) {
    CPMatrix cp;
    cp.player = player;
    std::map<Rat, Rat> vmarg;
    std::map<Profile, Rat, decltype(&lex_less)> pmarg(&lex_less);
    for (const auto& w : d.support) {
        vmarg[w.values[player]] += w.prob;
        pmarg[profile_without(w.values, player)] += w.prob;
    }
    std::map<Rat, int> vidx;
    std::map<Profile, int, decltype(&lex_less)> pidx(&lex_less);
    for (const auto& [v, p] : vmarg) {
        vidx[v] = static_cast<int>(cp.values.size());
        cp.values.push_back(v);
        cp.value_prob.push_back(p);
    }
    for (const auto& [prof, p] : pmarg) {
        pidx[prof] = static_cast<int>(cp.profiles.size());
        cp.profiles.push_back(prof);
        cp.profile_prob.push_back(p);
    }
    cp.rows.assign(cp.values.size(), std::vector<Rat>(cp.profiles.size(), Rat(0)));
    for (const auto& w : d.support) {
        int r = vidx[w.values[player]];
        int c = pidx[profile_without(w.values, player)];
        cp.rows[r][c] += w.prob;
    }
    for (size_t r = 0; r < cp.rows.size(); ++r)
        for (auto& entry : cp.rows[r]) entry /= cp.value_prob[r];
    return cp;
}

int rational_rank(const std::vector<std::vector<Rat>>& mat) {
    if (mat.empty() || mat[0].empty()) return 0;
    size_t nrows = mat.size(), ncols = mat[0].size();

    // Clear denominators row by row; row scaling does not change rank.
    std::vector<std::vector<Int>> a(nrows, std::vector<Int>(ncols));
    for (size_t r = 0; r < nrows; ++r) {
        Int lcm = 1;
        for (size_t c = 0; c < ncols; ++c) {
            Int den = mat[r][c].get_den();
            Int g;
            mpz_gcd(g.get_mpz_t(), lcm.get_mpz_t(), den.get_mpz_t());
            lcm = lcm / g * den;
        }
        for (size_t c = 0; c < ncols; ++c)
            a[r][c] = mat[r][c].get_num() * (lcm / mat[r][c].get_den());
    }

    // Bareiss fraction-free elimination: divisions are exact by construction.
    int rank = 0;
    Int prev = 1;
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < nrows; ++col) {
        size_t piv = row;
        while (piv < nrows && a[piv][col] == 0) ++piv;
        if (piv == nrows) continue;
        std::swap(a[piv], a[row]);
        for (size_t r = row + 1; r < nrows; ++r) {
            for (size_t c = col + 1; c < ncols; ++c)
                a[r][c] = (a[row][col] * a[r][c] - a[r][col] * a[row][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[row][col];
        ++row;
        ++rank;
    }
    return rank;
}

RankReport full_rank_check(const JointDistribution& d) {
    RankReport rep;
    rep.full_rank = true;
    for (int i = 0; i < d.n; ++i) {
        CPMatrix cp = cp_matrix(d, i);
        int rank = rational_rank(cp.rows);
        rep.ranks.push_back(rank);
        rep.value_counts.push_back(static_cast<int>(cp.values.size()));
        if (rank != static_cast<int>(cp.values.size())) rep.full_rank = false;
    }
    return rep;
}

}  // namespace corrigid
