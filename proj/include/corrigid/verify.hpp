// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
//
// The auditing layer: exact fee optimization against a fixed mechanism,
// brute-force revenue baselines, the closed-form revenue ceiling for
// embedded priors, and the rigidity sweep that compares every candidate
// mechanism against both ceilings.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/distribution.hpp"
#include "corrigid/divisible.hpp"
#include "corrigid/embedding.hpp"
#include "corrigid/mechanism.hpp"

namespace corrigid {

// Best fee schedule against a fixed mechanism: per player, maximize the
// expected fee subject to the interim participation constraints
//   CP_i * c_i <= profit_i   (componentwise, c_i unrestricted in sign).
// Solved exactly. The matrix decomposes into connected components of the
// value/profile incidence graph; single-value components collapse to a
// closed form and the rest go through the rational simplex.
struct FeeOptimum {
    FeeSchedule fees;
    Rat total;
};

FeeOptimum optimal_fees(const ThresholdMechanism& mech,
                        const JointDistribution& d);

// Same optimum, restricted to mechanisms whose finite thresholds live only
// on ladder columns and base columns of an embedded prior. The guard rows
// pin every other fee variable at zero, which splits the per-player program
// into independent per-round pieces with closed-form optima; see the notes
// in verify.cpp. Exact, and cross-checked against optimal_fees in tests.
FeeOptimum embedded_fee_optimum(const ThresholdMechanism& mech,
                                const Embedding& emb);

// Revenue ceiling for a mechanism over an embedded prior, assembled from
// the ladder tail the mechanism actually prices, the base-vector sales, and
// the per-pair fee allowance gated by agreement:
//   sum_i t_i * (tail mass above t_i) * (1-delta)/a
//   + sum_j round_mass_j * max_i v_{i,j}
//   + sum_{(i,j)} chi_{i,j} * F_{i,j} * (1-delta)/a,
// where t_i is the player's ladder-column threshold and
// F_{i,j} = min{ max(0, y_{i,sigma} - t_i) * q_{i,sigma}, e }.
struct BoundDiagnostics {
    Rat value;
    std::map<int, ExtRat> ladder_threshold;              // t_i per active player
    std::map<std::pair<int, int>, ExtRat> base_threshold;  // (j,i) -> t at base col
    std::map<std::pair<int, int>, bool> undercut;  // (j,i) -> t strictly below v
    std::map<std::pair<int, int>, Rat> fee_cap;    // (j,i) active -> F_{i,j}
    std::map<std::pair<int, int>, bool> agree;     // (j,i) active -> chi
};

BoundDiagnostics upper_bound_formula(const ThresholdMechanism& mech,
                                     const Embedding& emb);

// Exhaustive search for the best feasible threshold mechanism by ex-post
// revenue. Candidate thresholds per (player, opponent profile) cell are the
// player's co-occurring values plus "never sell"; top_k > 0 keeps only
// values whose instance ranks the player among its k highest bidders (ties
// to the lower index). Instances sharing no cell are optimized separately.
// Throws std::runtime_error("enumeration cap exceeded (size N)") when the
// candidate product outgrows the cap.
struct ExpostOptResult {
    ThresholdMechanism mech;
    Rat revenue;
    std::uint64_t enumerated = 0;
};

ExpostOptResult brute_force_expost_opt(const JointDistribution& d,
                                       int top_k = 0,
                                       std::uint64_t cap = 2'000'000);

// Best expost + optimal-fee revenue over the same candidate grid. Fee
// optima could not be split across components, so the full product is
// enumerated; above the cap the search degrades to a seeded uniform sample
// over the grid and says so in the result.
struct InterimOptResult {
    ThresholdMechanism mech;
    FeeSchedule fees;
    Rat revenue;
    bool exhaustive = true;
    std::uint64_t evaluated = 0;
};

InterimOptResult brute_force_interim_opt(const JointDistribution& d,
                                         std::uint64_t cap = 2'000'000,
                                         std::uint64_t seed = 1,
                                         std::uint64_t sample_count = 4096);

// One audited mechanism inside a rigidity report. Both ceilings are checked
// against the interim revenue under LP-optimal fees:
//   revenue <= (min{c_S + x, 1} + slack) * rev_ref     (agreement ceiling)
//   revenue <= formula + slack                          (structural ceiling)
// "ok" flags use the slack; "strict" flags don't, so an entry can pass
// within tolerance while failing strictly.
struct RigidityEntry {
    std::string label;
    Rat x;
    Rat revenue;
    Rat agreement_bound;  // min{c_S + x, 1} * rev_ref, before slack
    Rat formula_bound;    // upper_bound_formula value, before slack
    bool agreement_ok = true;
    bool agreement_strict = true;
    bool formula_ok = true;
    bool formula_strict = true;
};

struct RigidityReport {
    bool pass = true;  // no entry beyond tolerance on either ceiling
    std::string mode;  // "full" or "sampled"
    Rat rev_ref;
    Rat c_S;
    Rat slack;
    std::uint64_t evaluated = 0;
    std::uint64_t infeasible_skipped = 0;
    std::uint64_t agreement_failures = 0;
    std::uint64_t formula_failures = 0;
    std::uint64_t tolerance_only = 0;  // strict fail but within slack
    Rat max_ratio;                     // max revenue / rev_ref seen
    std::int64_t runtime_ms = 0;
    std::uint64_t seed = 0;            // sampled mode only
    // Every failing entry (up to a cap recorded below), plus the named
    // baseline mechanisms for context.
    std::vector<RigidityEntry> entries;
    bool entries_truncated = false;
};

struct RigidityOptions {
    bool sampled = false;
    std::uint64_t sample_count = 10'000;
    std::uint64_t seed = 1;
    std::optional<Rat> slack;          // default: the embedding's omega
    std::uint64_t full_cap = 2'000'000;
    std::size_t max_entries = 1'000;
};

RigidityReport rigidity_check(const Embedding& emb, const RigidityOptions& opt);

// Degrade the strong baseline by deleting a growing fraction of its
// base-column thresholds (a fixed seeded order, so prefixes nest), refit
// fees by LP, and report revenue against the agreement ceiling at the
// measured x.
struct CurvePoint {
    Rat fraction;   // requested corruption fraction f
    Rat x;          // measured agreement of the corrupted mechanism
    Rat ratio;      // interim revenue / rev_ref
    Rat bound;      // min{c_S + x, 1}
};

std::vector<CurvePoint> corruption_curve(const Embedding& emb,
                                         const std::vector<Rat>& fractions,
                                         std::uint64_t seed);

// Compact transcript of a deterministic allocation plan: one token per
// support instance, 1 + winner index, or 0 for "keep". Order cm sorts
// instances by (tie-broken argmax, then lexicographic); order lex is purely
// lexicographic. Tokens concatenate when n <= 9, otherwise they join with
// commas. decode inverts encode for the same distribution and order.
enum class StringOrder { CM, Lex };

using AllocationPlan = std::map<Instance, std::optional<int>, LexLess>;

std::string allocation_string(const JointDistribution& d,
                              const AllocationPlan& plan, StringOrder order);

AllocationPlan decode_allocation_string(const JointDistribution& d,
                                        const std::string& text,
                                        StringOrder order);

// The counting inequality k / C(r,g) > n^t * C(g, floor(x*g)) * n^floor(x*g),
// evaluated exactly over the integers.
struct KCResult {
    bool holds = false;
    Rat lhs;
    Rat rhs;
};

KCResult kc_inequality(long long k, long long r, long long g, long long n,
                       long long t, const Rat& x);

}  // namespace corrigid
