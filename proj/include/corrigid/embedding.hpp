// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
//
// Lift an m-divisible set into a correlated joint prior whose near-optimal
// mechanisms are forced to reproduce the set's allocation.  The prior mixes
// five ingredient families:
//
//   ladders     per active player, an equal-revenue price ladder supported on
//               his winning values plus a floor and a cap value,
//   bases       the set's base vectors themselves,
//   deviations  a single player raised to (or just below) his threshold,
//   guards      instances giving a player a tiny value against a column that
//               would otherwise admit fees,
//   filler      one tiny-valued instance absorbing the leftover mass.
//
// All constants are resolved by a deterministic half-the-bound schedule, so
// two builds of the same set are bit-identical.

#pragma once

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "corrigid/distribution.hpp"
#include "corrigid/divisible.hpp"
#include "corrigid/mechanism.hpp"

namespace corrigid {

struct EmbeddingConstants {
    Rat delta;     // 1/10; ladders carry 1 - delta of the total mass
    Rat omega;     // 1/20; slack granted to every downstream bound
    Rat eps_dev;   // budget for nudging interior deviation values
    Rat eps_win;   // offset added to base values to form winning thresholds
    Rat mu_hat;    // provisional ceiling for tiny values (pre-ladder)
    Rat mu;        // final ceiling; every guard value sits strictly below it
    Rat e;         // common product y_{i,0} * d_i shared by all ladders
    Rat xi;        // probability of each deviation and guard instance
    Rat filler_mass;
    long long guard_count = 0;  // number of instances carrying mass xi

    std::map<int, Rat> y0;     // ladder floor per active player
    std::map<int, Rat> y_top;  // ladder cap per active player
    // ladder[i][r] for r = 0..k_i+1: floor, winning values ascending, cap
    std::map<int, std::vector<Rat>> ladder;
    std::map<int, std::vector<Rat>> q;  // ladder masses, same indexing

    std::vector<Rat> gapfull;       // per round: min threshold margin u - v
    std::vector<Rat> gap;           // per round: fee charged at the base column
    std::vector<Rat> round_mass;    // per round: probability of the base vector
    std::vector<Rat> alpha_budget;  // per round: cap on eps nudges (keeps the
                                    // fee margin within omega of the full one)

    std::map<std::pair<int, int>, Rat> u_bar;    // (round, player) -> threshold
    std::map<std::pair<int, int>, Rat> u_prime;  // (round, player) -> interior
                                                 // deviation value, < u_bar

    std::map<int, Rat> rho;         // opponents' value inside a ladder column
    std::map<int, Rat> eta_single;  // guard value at a player's ladder column
    // (round, tiny holder, deviating player) -> tiny holder's value
    std::map<std::tuple<int, int, int>, Rat> eta_pair;
    std::map<std::tuple<int, int, int>, Rat> eta_pair_prime;
    std::vector<Rat> filler_values;  // one fresh tiny value per player
};

struct InstanceTag {
    enum class Kind { Ladder, Base, Deviation, Guard, GuardPair, Filler };
    Kind kind = Kind::Filler;
    int player = -1;   // ladder owner, deviator, or tiny holder of a guard
    int round = -1;    // base round for Base/Deviation/GuardPair
    int partner = -1;  // raised player inside a GuardPair
    int rank = -1;     // ladder position 0..k_i+1
    // Deviation/GuardPair: raised value is the threshold itself rather than
    // the interior point just below it.
    bool at_threshold = false;
};

struct Embedding {
    MDivisibleSet set;
    SetParameters params;
    EmbeddingConstants constants;
    JointDistribution distribution;
    std::map<Instance, InstanceTag, LexLess> tags;
};

// Masses that make every ladder price yield the same revenue: given values
// [y_0, y_1, ..., y_top] (ascending, y_0 > 0), returns q with
// sum(q) = 1 and y_r * (q_r + ... + q_top) = y_0 for every r >= 1.
std::vector<Rat> equal_revenue_masses(const std::vector<Rat>& ladder);

// Deterministic constant schedule.  Requires a valid set; asserts every
// internal inequality it relies on.
EmbeddingConstants resolve_constants(const MDivisibleSet& s,
                                     const SetParameters& p);

// Full pipeline: validate, resolve constants, assemble the distribution and
// the per-instance tags.  Throws std::invalid_argument on an invalid set.
Embedding build_embedding(const MDivisibleSet& s);

// Feasible mechanism extracting fee revenue |S| * e(1-delta)/a: thresholds
// v_{i,j} + eps at each base column for active i, a zero threshold at each
// ladder column, and a fee of gap_j at each base column.
std::pair<ThresholdMechanism, FeeSchedule> reference_mechanism(
    const Embedding& emb);

// Stronger baseline: posted price y_{i,0} at each ladder column, the highest
// player pays his value at each base vector, and base-column fees derived
// from min{(y_sigma - y_0) q_sigma, e}.  Its interim revenue is the
// denominator used by the rigidity checks.
std::pair<ThresholdMechanism, FeeSchedule> reference_mechanism_almost_linear(
    const Embedding& emb);

}  // namespace corrigid
