// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/mechanism.hpp"

#include <algorithm>
#include <stdexcept>

namespace corrigid {
namespace {

// Lowest-index argmax; the tie-break used everywhere a "highest bidder"
// must be unique.
int top_index(const Instance& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

struct Outcome {
    int winner;
    Rat payment;
};

std::optional<Outcome> outcome_of(const ThresholdMechanism& mech, const Instance& v) {
    std::optional<Outcome> out;
    for (int i = 0; i < mech.n; ++i) {
        ExtRat t = mech.threshold(i, profile_without(v, i));
        if (!t.is_inf && v[i] >= t.value) {
            if (out) throw std::runtime_error("two winners in one instance");
            out = Outcome{i, t.value};
        }
    }
    return out;
}

// Any one solution of A x = b with free coordinates pinned to zero, or
// nullopt when the system is inconsistent. Gauss-Jordan over exact
// rationals; A is small (one row per player value).
std::optional<std::vector<Rat>> solve_underdetermined(std::vector<std::vector<Rat>> A,
                                                      std::vector<Rat> b) {
    size_t rows = A.size();
    size_t cols = rows ? A[0].size() : 0;
    std::vector<int> pivot_col(rows, -1);
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && A[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(A[p], A[r]);
        std::swap(b[p], b[r]);
        Rat inv = 1 / A[r][c];
        for (size_t cc = c; cc < cols; ++cc) A[r][cc] *= inv;
        b[r] *= inv;
        for (size_t rr = 0; rr < rows; ++rr) {
            if (rr == r || A[rr][c] == 0) continue;
            Rat f = A[rr][c];
            for (size_t cc = c; cc < cols; ++cc) A[rr][cc] -= f * A[r][cc];
            b[rr] -= f * b[r];
        }
        pivot_col[r] = static_cast<int>(c);
        ++r;
    }
    for (size_t rr = r; rr < rows; ++rr)
        if (b[rr] != 0) return std::nullopt;
    std::vector<Rat> x(cols, Rat(0));
    for (size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

}  // namespace

ExtRat ThresholdMechanism::threshold(int i, const Profile& prof) const {
    const auto& m = thresholds[i];
    auto it = m.find(prof);
    return it == m.end() ? ExtRat::inf() : it->second;
}

void ThresholdMechanism::set(int i, Profile prof, ExtRat t) {
    thresholds[i][std::move(prof)] = std::move(t);
}

Rat FeeSchedule::fee(int i, const Profile& prof) const {
    const auto& m = fees[i];
    auto it = m.find(prof);
    return it == m.end() ? Rat(0) : it->second;
}

void FeeSchedule::set(int i, Profile prof, Rat c) { fees[i][std::move(prof)] = std::move(c); }

std::optional<int> allocation(const ThresholdMechanism& mech, const Instance& v) {
    auto out = outcome_of(mech, v);
    if (!out) return std::nullopt;
    return out->winner;
}

std::vector<std::string> check_feasible(const ThresholdMechanism& mech,
                                        const JointDistribution& d) {
    std::vector<std::string> issues;
    for (size_t k = 0; k < d.support.size(); ++k) {
        const Instance& v = d.support[k].values;
        int winners = 0;
        for (int i = 0; i < mech.n; ++i) {
            ExtRat t = mech.threshold(i, profile_without(v, i));
            if (!t.is_inf && v[i] >= t.value) ++winners;
        }
        if (winners > 1)
            issues.push_back("instance " + std::to_string(k) + " has " +
                             std::to_string(winners) + " winners");
    }
    return issues;
}

Rat expost_revenue(const ThresholdMechanism& mech, const JointDistribution& d) {
    Rat rev = 0;
    for (const auto& w : d.support)
        if (auto out = outcome_of(mech, w.values)) rev += w.prob * out->payment;
    return rev;
}

ProfitVector profit_vector(const ThresholdMechanism& mech, const JointDistribution& d) {
    ProfitVector pv;
    pv.per_player.resize(d.n);
    std::vector<std::map<Rat, Rat>> valmass(d.n);
    for (const auto& w : d.support)
        for (int i = 0; i < d.n; ++i) {
            valmass[i][w.values[i]] += w.prob;
            pv.per_player[i].try_emplace(w.values[i], 0);
        }
    for (const auto& w : d.support)
        if (auto out = outcome_of(mech, w.values))
            pv.per_player[out->winner][w.values[out->winner]] +=
                w.prob * (w.values[out->winner] - out->payment);
    for (int i = 0; i < d.n; ++i)
        for (auto& [value, profit] : pv.per_player[i]) profit /= valmass[i][value];
    return pv;
}

std::vector<std::string> check_interim_ir(const ThresholdMechanism& mech,
                                          const FeeSchedule& fees,
                                          const JointDistribution& d) {
    std::vector<std::string> issues;
    ProfitVector pv = profit_vector(mech, d);
    for (int i = 0; i < d.n; ++i) {
        CPMatrix cp = cp_matrix(d, i);
        for (size_t k = 0; k < cp.values.size(); ++k) {
            Rat expected_fee = 0;
            for (size_t j = 0; j < cp.profiles.size(); ++j) {
                if (cp.rows[k][j] == 0) continue;
                expected_fee += cp.rows[k][j] * fees.fee(i, cp.profiles[j]);
            }
            if (expected_fee > pv.per_player[i].at(cp.values[k]))
                issues.push_back("player " + std::to_string(i) + " at value " +
                                 format_rational(cp.values[k]) + ": expected fee " +
                                 format_rational(expected_fee) + " exceeds profit " +
                                 format_rational(pv.per_player[i].at(cp.values[k])));
        }
    }
    return issues;
}

Rat interim_revenue(const ThresholdMechanism& mech, const FeeSchedule& fees,
                    const JointDistribution& d) {
    Rat rev = expost_revenue(mech, d);
    for (int i = 0; i < d.n; ++i) {
        if (fees.fees[i].empty()) continue;
        std::map<Profile, Rat, LexLess> pmarg;
        for (const auto& w : d.support) pmarg[profile_without(w.values, i)] += w.prob;
        for (const auto& [prof, c] : fees.fees[i]) {
            auto it = pmarg.find(prof);
            if (it != pmarg.end()) rev += it->second * c;
        }
    }
    return rev;
}

AgreementResult agreement_ratio(const ThresholdMechanism& mech, const MDivisibleSet& s) {
    AgreementResult res;
    long long matches = 0;
    long long total = 0;
    for (int j = 0; j < s.m; ++j)
        for (int i : s.active_sets[j]) {
            Instance v = s.base_vectors[j];
            v[i] = s.threshold(j, i);
            bool agrees = false;
            if (auto win = allocation(mech, v)) agrees = (*win == i);
            res.chi[{j, i}] = agrees;
            matches += agrees ? 1 : 0;
            ++total;
        }
    res.x = Rat(static_cast<long>(matches)) / static_cast<long>(total);
    return res;
}

ThresholdMechanism lookahead(const JointDistribution& d) {
    ThresholdMechanism mech(d.n);
    for (int i = 0; i < d.n; ++i) {
        std::map<Profile, std::map<Rat, Rat>, LexLess> winmass;
        for (const auto& w : d.support)
            if (top_index(w.values) == i)
                winmass[profile_without(w.values, i)][w.values[i]] += w.prob;
        for (const auto& [prof, mass] : winmass) {
            // Evaluate every candidate price by its conditional sale mass;
            // scanning prices descending lets the tail accumulate. Ties go
            // to the lower price, hence >= when replacing.
            Rat tail = 0;
            Rat best_value;
            Rat best_price;
            bool first = true;
            for (auto it = mass.rbegin(); it != mass.rend(); ++it) {
                tail += it->second;
                Rat value = it->first * tail;
                if (first || value >= best_value) {
                    best_value = value;
                    best_price = it->first;
                    first = false;
                }
            }
            mech.set(i, prof, ExtRat(best_price));
        }
    }
    return mech;
}

CMResult cm_fees(const JointDistribution& d) {
    CMResult res;
    res.mech = ThresholdMechanism(d.n);
    res.fees = FeeSchedule(d.n);

    std::vector<std::vector<Rat>> grid(d.n);  // sorted distinct values per player
    for (int i = 0; i < d.n; ++i)
        for (const auto& [value, prob] : marginal(d, i)) grid[i].push_back(value);

    // Efficient allocation in threshold form. Facing v_{-i}, player i must
    // beat the top opposing bid M, strictly when a lower-indexed opponent
    // holds M. The threshold is that cutoff rounded up to i's own value
    // grid, so the winner's payment stays at or below his value.
    for (int i = 0; i < d.n; ++i) {
        std::map<Profile, bool, LexLess> seen;
        for (const auto& w : d.support) {
            Profile prof = profile_without(w.values, i);
            if (!seen.emplace(prof, true).second) continue;
            Rat M = *std::max_element(prof.begin(), prof.end());
            bool wins_tie = false;  // does i beat the first opponent holding M?
            for (int j = 0; j < d.n; ++j) {
                if (j == i) continue;
                if (prof[j < i ? j : j - 1] == M) {
                    wins_tie = (i < j);
                    break;
                }
            }
            const auto& vals = grid[i];
            auto it = wins_tie ? std::lower_bound(vals.begin(), vals.end(), M)
                               : std::upper_bound(vals.begin(), vals.end(), M);
            if (it != vals.end()) res.mech.set(i, std::move(prof), ExtRat(*it));
        }
    }

    RankReport rank = full_rank_check(d);
    if (!rank.full_rank) {
        for (int i = 0; i < d.n; ++i)
            if (rank.ranks[i] != rank.value_counts[i]) {
                res.error = "rank deficient (player " + std::to_string(i) + ")";
                break;
            }
        return res;
    }

    ProfitVector pv = profit_vector(res.mech, d);
    for (int i = 0; i < d.n; ++i) {
        CPMatrix cp = cp_matrix(d, i);
        std::vector<Rat> target;
        target.reserve(cp.values.size());
        for (const Rat& value : cp.values) target.push_back(pv.per_player[i].at(value));
        auto sol = solve_underdetermined(cp.rows, target);
        if (!sol) {
            res.error = "system inconsistent (player " + std::to_string(i) + ")";
            return res;
        }
        for (size_t j = 0; j < sol->size(); ++j)
            if ((*sol)[j] != 0) res.fees.set(i, cp.profiles[j], (*sol)[j]);
    }
    res.ok = true;
    return res;
}

}  // namespace corrigid
