// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/distribution.hpp"
#include "corrigid/divisible.hpp"
#include "corrigid/rational.hpp"

namespace corrigid {

// A deterministic truthful auction in threshold form: facing opponents
// v_{-i}, player i receives the item iff v_i >= t_i(v_{-i}) and then pays
// t_i(v_{-i}). Profiles not present in the map have an infinite threshold
// (never sell). Feasibility, at most one winner per instance, is a property
// relative to a distribution's support and is checked separately.
struct ThresholdMechanism {
    int n = 0;
    std::vector<std::map<Profile, ExtRat, LexLess>> thresholds;

    ThresholdMechanism() = default;
    explicit ThresholdMechanism(int players) : n(players), thresholds(players) {}

    ExtRat threshold(int i, const Profile& prof) const;
    void set(int i, Profile prof, ExtRat t);
};

// Per-player entry fees c_i(v_{-i}) collected regardless of allocation.
// Unlisted profiles carry fee 0. Fees may be negative (a rebate); the
// interim participation check below is what constrains them.
struct FeeSchedule {
    std::vector<std::map<Profile, Rat, LexLess>> fees;

    FeeSchedule() = default;
    explicit FeeSchedule(int players) : fees(players) {}

    Rat fee(int i, const Profile& prof) const;
    void set(int i, Profile prof, Rat c);
};

// profit[i] maps each value of player i to the expected profit (value minus
// payment on wins) conditioned on holding that value.
struct ProfitVector {
    std::vector<std::map<Rat, Rat>> per_player;
};

// Winner of one instance, or nullopt when nobody clears a threshold.
// Throws std::runtime_error when two players clear at once.
std::optional<int> allocation(const ThresholdMechanism& mech, const Instance& v);

// Empty result means feasible: no support instance has two winners.
std::vector<std::string> check_feasible(const ThresholdMechanism& mech,
                                        const JointDistribution& d);

// Expected winner payment over d. Requires feasibility.
Rat expost_revenue(const ThresholdMechanism& mech, const JointDistribution& d);

ProfitVector profit_vector(const ThresholdMechanism& mech, const JointDistribution& d);

// The participation constraint for fees: for every player i and value v_i,
// the expected fee conditioned on v_i must not exceed the expected profit,
//   sum_j Pr(v_{-i}^j | v_i) * c_i(v_{-i}^j) <= profit_i(v_i),
// compared exactly. Empty result means every constraint holds.
std::vector<std::string> check_interim_ir(const ThresholdMechanism& mech,
                                          const FeeSchedule& fees,
                                          const JointDistribution& d);

// Ex-post revenue plus expected fee income.
Rat interim_revenue(const ThresholdMechanism& mech, const FeeSchedule& fees,
                    const JointDistribution& d);

// How much of a plan's allocations a mechanism reproduces: for each winning
// instance (u(j,i) for player i, round-j base values for the rest), chi is 1
// when the mechanism indeed sells to player i there. x is the fraction of
// pairs with chi = 1.
struct AgreementResult {
    Rat x;
    std::map<std::pair<int, int>, bool> chi;  // (round j, player i) -> agrees
};

AgreementResult agreement_ratio(const ThresholdMechanism& mech, const MDivisibleSet& s);

// Sells only to the highest bidder (ties to the lowest index): facing
// v_{-i}, player i is offered the revenue-maximizing posted price among the
// values of v_i that make i the tie-broken maximum, price ties broken low.
// Always feasible.
ThresholdMechanism lookahead(const JointDistribution& d);

// Full-surplus extraction on priors whose conditional matrices all have
// full row rank: an efficient allocation (highest bidder wins, paying the
// second-highest bid rounded up to his own value grid) plus fees solving
//   CP_i * c_i = profit_i
// exactly, which drives every player's expected net utility to zero and the
// seller's interim revenue to the full expected welfare.
struct CMResult {
    bool ok = false;
    std::string error;  // set when !ok, names the failing player
    ThresholdMechanism mech;
    FeeSchedule fees;
};

CMResult cm_fees(const JointDistribution& d);

}  // namespace corrigid
