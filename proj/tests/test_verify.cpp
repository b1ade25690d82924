// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/embedding.hpp"
#include "corrigid/generators.hpp"
#include "corrigid/verify.hpp"

using corrigid::Embedding;
using corrigid::ExtRat;
using corrigid::FeeSchedule;
using corrigid::Instance;
using corrigid::InstanceTag;
using corrigid::JointDistribution;
using corrigid::Profile;
using corrigid::Rat;
using corrigid::ThresholdMechanism;

namespace {

JointDistribution two_by_two() {
    JointDistribution d;
    d.n = 2;
    d.support = {
        {{Rat(1), Rat(1)}, Rat(1, 4)},
        {{Rat(1), Rat(2)}, Rat(1, 4)},
        {{Rat(2), Rat(1)}, Rat(1, 8)},
        {{Rat(2), Rat(2)}, Rat(3, 8)},
    };
    return d;
}

Embedding reference_embedding() {
    return corrigid::build_embedding(corrigid::gen_k_excluded(4, 1, 1, Rat(1, 10)));
}

// Ladder thresholds y_{i,0} for every active player, base columns left free
// so the extra fee revenue has nowhere to show up in the ceiling formula.
ThresholdMechanism floor_only_mech(const Embedding& emb) {
    ThresholdMechanism mech(emb.set.n);
    for (int i : emb.params.active_players) {
        Instance pattern(emb.set.n, emb.constants.rho.at(i));
        mech.set(i, corrigid::profile_without(pattern, i),
                 ExtRat(emb.constants.y0.at(i)));
    }
    // The excluded player still clears his base value.
    const Instance& base = emb.set.base_vectors[0];
    mech.set(3, corrigid::profile_without(base, 3), ExtRat(base[3]));
    return mech;
}

}  // namespace

// ---------------------------------------------------------------------------
// optimal_fees
// ---------------------------------------------------------------------------

TEST_CASE("optimal fees transfer the whole budget on a single-value row") {
    JointDistribution d;
    d.n = 2;
    d.support = {{{Rat(2), Rat(1)}, Rat(1, 2)}, {{Rat(3), Rat(1)}, Rat(1, 2)}};
    ThresholdMechanism mech(2);
    mech.set(0, {Rat(1)}, ExtRat(Rat(1)));

    // Player 0 profits 1 at value 2 and 2 at value 3, but both rows share
    // the single column, so the fee is capped by the tighter row.
    auto opt = corrigid::optimal_fees(mech, d);
    CHECK(opt.total == Rat(1));
    CHECK(opt.fees.fee(0, {Rat(1)}) == Rat(1));
    CHECK(corrigid::check_interim_ir(mech, opt.fees, d).empty());
}

TEST_CASE("optimal fees split across disconnected components") {
    JointDistribution d;
    d.n = 2;
    d.support = {
        {{Rat(1), Rat(5)}, Rat(1, 4)},
        {{Rat(2), Rat(5)}, Rat(1, 4)},
        {{Rat(4), Rat(7)}, Rat(1, 2)},
    };
    ThresholdMechanism mech(2);
    mech.set(0, {Rat(5)}, ExtRat(Rat(1)));
    mech.set(0, {Rat(7)}, ExtRat(Rat(3)));

    // Component {1,2}x{(5)}: budgets 0 and 1/4, fee capped at 0 by the
    // value-1 row. Component {4}x{(7)}: single row, budget transfers.
    auto opt = corrigid::optimal_fees(mech, d);
    CHECK(opt.total == Rat(1, 2));
    CHECK(opt.fees.fee(0, {Rat(5)}) == Rat(0));
    CHECK(opt.fees.fee(0, {Rat(7)}) == Rat(1));
}

TEST_CASE("optimal fees reach full surplus against the efficient mechanism") {
    JointDistribution d = two_by_two();
    auto cm = corrigid::cm_fees(d);
    REQUIRE(cm.ok);
    auto opt = corrigid::optimal_fees(cm.mech, d);
    // The efficient allocation leaves 1/8 of expected profit on the table;
    // full-rank conditionals let the fees claim exactly that much.
    CHECK(opt.total == Rat(1, 8));
    CHECK(corrigid::expost_revenue(cm.mech, d) + opt.total ==
          corrigid::expected_welfare(d));
}

TEST_CASE("optimal fees against never-sell are zero") {
    auto opt = corrigid::optimal_fees(ThresholdMechanism(2), two_by_two());
    CHECK(opt.total == Rat(0));
}

TEST_CASE("optimal fees reject malformed inputs") {
    CHECK_THROWS_AS(corrigid::optimal_fees(ThresholdMechanism(2), JointDistribution{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(corrigid::optimal_fees(ThresholdMechanism(3), two_by_two()),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// embedded_fee_optimum
// ---------------------------------------------------------------------------

TEST_CASE("embedded fee shortcut matches the general solver on grid mechanisms") {
    Embedding emb = reference_embedding();

    std::vector<std::pair<std::string, ThresholdMechanism>> mechs;
    mechs.emplace_back("never-sell", ThresholdMechanism(4));
    mechs.emplace_back("almost-linear reference",
                       corrigid::reference_mechanism_almost_linear(emb).first);
    mechs.emplace_back("floor prices, free base columns", floor_only_mech(emb));

    {
        // Ladder caps everywhere, base columns selling at the thresholds.
        ThresholdMechanism m(4);
        for (int i : {0, 1, 2}) {
            Instance pat(4, emb.constants.rho.at(i));
            m.set(i, corrigid::profile_without(pat, i),
                  ExtRat(emb.constants.y_top.at(i)));
            m.set(i, corrigid::profile_without(emb.set.base_vectors[0], i),
                  ExtRat(emb.constants.u_bar.at({0, i})));
        }
        mechs.emplace_back("caps and thresholds", std::move(m));
    }
    {
        // Guard-value ladder price for one player, mixed base choices.
        ThresholdMechanism m(4);
        Instance pat(4, emb.constants.rho.at(1));
        m.set(1, corrigid::profile_without(pat, 1),
              ExtRat(emb.constants.eta_single.at(1)));
        m.set(0, corrigid::profile_without(emb.set.base_vectors[0], 0),
              ExtRat(emb.constants.u_prime.at({0, 0})));
        m.set(2, corrigid::profile_without(emb.set.base_vectors[0], 2),
              ExtRat(Rat(1)));
        mechs.emplace_back("guard price and mixed bases", std::move(m));
    }

    for (auto& [label, mech] : mechs) {
        CAPTURE(label);
        auto fast = corrigid::embedded_fee_optimum(mech, emb);
        auto slow = corrigid::optimal_fees(mech, emb.distribution);
        CHECK(fast.total == slow.total);
        CHECK(corrigid::check_interim_ir(mech, fast.fees, emb.distribution).empty());
    }
}

TEST_CASE("embedded fee shortcut covers one- and two-active rounds") {
    // One active player.
    corrigid::MDivisibleSet solo;
    solo.n = 3;
    solo.m = 1;
    solo.base_vectors = {{Rat(5), Rat(1), Rat(1, 2)}};
    solo.active_sets = {{1}};
    solo.thresholds[{0, 1}] = Rat(2);
    Embedding emb1 = corrigid::build_embedding(solo);

    // Two active players across two rounds.
    corrigid::MDivisibleSet duo;
    duo.n = 3;
    duo.m = 2;
    duo.base_vectors = {{Rat(1), Rat(2), Rat(5)}, {Rat(4), Rat(3), Rat(6)}};
    duo.active_sets = {{0, 1}, {0, 2}};
    duo.thresholds[{0, 0}] = Rat(2);
    duo.thresholds[{0, 1}] = Rat(7, 2);
    duo.thresholds[{1, 0}] = Rat(9, 2);
    duo.thresholds[{1, 2}] = Rat(8);
    Embedding emb2 = corrigid::build_embedding(duo);

    for (const Embedding* emb : {&emb1, &emb2}) {
        std::vector<ThresholdMechanism> mechs;
        mechs.push_back(ThresholdMechanism(3));
        mechs.push_back(corrigid::reference_mechanism_almost_linear(*emb).first);
        {
            ThresholdMechanism m(3);
            for (int i : emb->params.active_players) {
                Instance pat(3, emb->constants.rho.at(i));
                m.set(i, corrigid::profile_without(pat, i),
                      ExtRat(emb->constants.y0.at(i)));
            }
            for (int j = 0; j < emb->set.m; ++j)
                for (int i : emb->set.active_sets[j])
                    m.set(i, corrigid::profile_without(emb->set.base_vectors[j], i),
                          ExtRat(emb->constants.u_prime.at({j, i})));
            mechs.push_back(std::move(m));
        }
        for (const auto& mech : mechs) {
            auto fast = corrigid::embedded_fee_optimum(mech, *emb);
            auto slow = corrigid::optimal_fees(mech, emb->distribution);
            CHECK(fast.total == slow.total);
        }
    }
}

TEST_CASE("aliased value rows fall back to the general solver") {
    // Player 0's round-1 threshold equals his ladder cap 4 / (1 - 3/4), so
    // two participation rows merge and the closed form must not run.
    corrigid::MDivisibleSet s;
    s.n = 3;
    s.m = 2;
    s.base_vectors = {{Rat(1), Rat(2), Rat(5)}, {Rat(4), Rat(3), Rat(6)}};
    s.active_sets = {{0, 1}, {0, 2}};
    s.thresholds[{0, 0}] = Rat(2);
    s.thresholds[{0, 1}] = Rat(7, 2);
    s.thresholds[{1, 0}] = Rat(16);
    s.thresholds[{1, 2}] = Rat(8);
    Embedding emb = corrigid::build_embedding(s);
    CHECK(emb.constants.y_top.at(0) == Rat(16));

    auto [mech, fees] = corrigid::reference_mechanism_almost_linear(emb);
    auto fast = corrigid::embedded_fee_optimum(mech, emb);
    auto slow = corrigid::optimal_fees(mech, emb.distribution);
    CHECK(fast.total == slow.total);
}

TEST_CASE("embedded fee shortcut rejects off-grid thresholds") {
    Embedding emb = reference_embedding();

    // Below the guard value on a ladder column.
    ThresholdMechanism low(4);
    Instance pat(4, emb.constants.rho.at(0));
    low.set(0, corrigid::profile_without(pat, 0), ExtRat(Rat(0)));
    CHECK_THROWS_AS(corrigid::embedded_fee_optimum(low, emb), std::invalid_argument);

    // On a guard-pair column.
    ThresholdMechanism off(4);
    for (const auto& [inst, tag] : emb.tags) {
        if (tag.kind != InstanceTag::Kind::GuardPair) continue;
        int bystander = -1;
        for (int i : {0, 1, 2})
            if (i != tag.player && i != tag.partner) bystander = i;
        off.set(bystander, corrigid::profile_without(inst, bystander), ExtRat(Rat(1)));
        break;
    }
    CHECK_THROWS_AS(corrigid::embedded_fee_optimum(off, emb), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// upper_bound_formula
// ---------------------------------------------------------------------------

TEST_CASE("revenue ceiling of the almost-linear reference") {
    Embedding emb = reference_embedding();
    auto [mech, fees] = corrigid::reference_mechanism_almost_linear(emb);
    auto diag = corrigid::upper_bound_formula(mech, emb);

    // Ladder part 3 * (1/2)(3/10), base part 12.1/146, fee part 3 * (1/8)(3/10).
    CHECK(diag.value == Rat(9, 20) + Rat(121, 1460) + Rat(9, 80));
    for (int i : {0, 1, 2}) {
        CHECK(diag.ladder_threshold.at(i) == ExtRat(Rat(1, 2)));
        CHECK(diag.agree.at({0, i}));
        CHECK(diag.fee_cap.at({0, i}) == Rat(1, 8));
        CHECK_FALSE(diag.undercut.at({0, i}));
    }
    CHECK_FALSE(diag.undercut.at({0, 3}));
}

TEST_CASE("revenue ceiling drops the fee term without agreement") {
    Embedding emb = reference_embedding();
    ThresholdMechanism mech = floor_only_mech(emb);
    auto diag = corrigid::upper_bound_formula(mech, emb);

    // Base columns of the active players never sell, so no pair agrees and
    // the fee allowance vanishes even though the caps themselves are live.
    CHECK(diag.value == Rat(9, 20) + Rat(121, 1460));
    for (int i : {0, 1, 2}) {
        CHECK_FALSE(diag.agree.at({0, i}));
        CHECK(diag.fee_cap.at({0, i}) == Rat(1, 8));
    }

    // The fee optimum still extracts the ladder profit at the base values,
    // which is exactly the leak the ceiling misses.
    auto opt = corrigid::embedded_fee_optimum(mech, emb);
    CHECK(opt.total == Rat(9, 80));
    Rat revenue = corrigid::expost_revenue(mech, emb.distribution) + opt.total;
    CHECK(revenue == diag.value + Rat(9, 80));
}

TEST_CASE("revenue ceiling of never-sell is the base-vector term") {
    Embedding emb = reference_embedding();
    auto diag = corrigid::upper_bound_formula(ThresholdMechanism(4), emb);
    CHECK(diag.value == Rat(121, 1460));
    for (int i : {0, 1, 2}) CHECK(diag.ladder_threshold.at(i).is_inf);
}

TEST_CASE("undercut flags thresholds strictly below the base value") {
    Embedding emb = reference_embedding();
    ThresholdMechanism mech(4);
    mech.set(0, corrigid::profile_without(emb.set.base_vectors[0], 0),
             ExtRat(Rat(1, 2)));
    auto diag = corrigid::upper_bound_formula(mech, emb);
    CHECK(diag.undercut.at({0, 0}));
    CHECK_FALSE(diag.undercut.at({0, 1}));
}

// ---------------------------------------------------------------------------
// brute force searches
// ---------------------------------------------------------------------------

TEST_CASE("expost brute force finds the hand optimum") {
    auto res = corrigid::brute_force_expost_opt(two_by_two());
    CHECK(res.revenue == Rat(13, 8));
    CHECK(res.enumerated > 0);
    CHECK(corrigid::check_feasible(res.mech, two_by_two()).empty());
    CHECK(corrigid::expost_revenue(res.mech, two_by_two()) == res.revenue);
}

TEST_CASE("top-k restriction keeps the optimum reachable here") {
    auto res = corrigid::brute_force_expost_opt(two_by_two(), 1);
    CHECK(res.revenue == Rat(13, 8));
}

TEST_CASE("expost brute force throws past the cap") {
    CHECK_THROWS_WITH_AS(corrigid::brute_force_expost_opt(two_by_two(), 0, 10),
                         "enumeration cap exceeded (size 81)", std::runtime_error);
}

TEST_CASE("interim brute force reaches full surplus on the 2x2 prior") {
    auto res = corrigid::brute_force_interim_opt(two_by_two());
    CHECK(res.exhaustive);
    CHECK(res.revenue == Rat(7, 4));  // expected welfare
    CHECK(res.evaluated > 0);
    CHECK(corrigid::check_feasible(res.mech, two_by_two()).empty());
    CHECK(corrigid::check_interim_ir(res.mech, res.fees, two_by_two()).empty());
    CHECK(corrigid::interim_revenue(res.mech, res.fees, two_by_two()) ==
          res.revenue);
}

TEST_CASE("interim brute force degrades to seeded sampling past the cap") {
    auto res = corrigid::brute_force_interim_opt(two_by_two(), 10, 7, 60);
    CHECK_FALSE(res.exhaustive);
    CHECK(res.revenue <= Rat(7, 4));
    CHECK(res.revenue >= Rat(0));

    auto res2 = corrigid::brute_force_interim_opt(two_by_two(), 10, 7, 60);
    CHECK(res2.revenue == res.revenue);  // same seed, same draws
}

TEST_CASE("lookahead earns at least half the expost optimum here") {
    JointDistribution d = two_by_two();
    auto opt = corrigid::brute_force_expost_opt(d);
    Rat la = corrigid::expost_revenue(corrigid::lookahead(d), d);
    CHECK(2 * la >= opt.revenue);
    CHECK(la == Rat(13, 8));  // lookahead happens to be optimal on this prior
}

// ---------------------------------------------------------------------------
// rigidity_check and corruption_curve
// ---------------------------------------------------------------------------

TEST_CASE("rigidity report carries the reference revenue and baselines") {
    Embedding emb = reference_embedding();
    corrigid::RigidityOptions opt;
    opt.sampled = true;
    opt.sample_count = 40;
    opt.seed = 5;
    auto rep = corrigid::rigidity_check(emb, opt);

    CHECK(rep.mode == "sampled");
    CHECK(rep.c_S == Rat(71, 30));
    CHECK(rep.slack == Rat(1, 20));
    auto [ref, fees] = corrigid::reference_mechanism_almost_linear(emb);
    CHECK(rep.rev_ref == corrigid::interim_revenue(ref, fees, emb.distribution));
    CHECK(rep.evaluated == 4 + 40);

    REQUIRE(rep.entries.size() >= 4);
    CHECK(rep.entries[0].label == "reference");
    CHECK(rep.entries[1].label == "reference-almost-linear");
    CHECK(rep.entries[2].label == "never-sell");
    CHECK(rep.entries[3].label == "reference-almost-linear, set thresholds removed");

    // The yardstick mechanism under refit fees earns at least its hand
    // schedule, and both of its checks clear.
    CHECK(rep.entries[1].revenue >= rep.rev_ref);
    CHECK(rep.entries[1].agreement_ok);
    CHECK(rep.entries[1].formula_ok);
    CHECK(rep.entries[2].revenue < rep.rev_ref / 2);
    CHECK(rep.max_ratio >= 1);

    // Same options, same report.
    auto rep2 = corrigid::rigidity_check(emb, opt);
    CHECK(rep2.evaluated == rep.evaluated);
    CHECK(rep2.max_ratio == rep.max_ratio);
    CHECK(rep2.agreement_failures == rep.agreement_failures);
    CHECK(rep2.formula_failures == rep.formula_failures);
}

TEST_CASE("rigidity full mode degrades to sampling past the cap") {
    Embedding emb = reference_embedding();
    corrigid::RigidityOptions opt;
    opt.full_cap = 100;  // the 4-player grid holds 16000 mechanisms
    opt.sample_count = 25;
    opt.seed = 11;
    auto rep = corrigid::rigidity_check(emb, opt);
    CHECK(rep.mode == "sampled");
    CHECK(rep.seed == 11);
    CHECK(rep.evaluated == 4 + 25);
}

TEST_CASE("slack override changes what counts as a failure") {
    Embedding emb = reference_embedding();
    corrigid::RigidityOptions opt;
    opt.sampled = true;
    opt.sample_count = 200;
    opt.seed = 3;
    auto strict = opt;
    strict.slack = Rat(0);
    auto loose = opt;
    loose.slack = Rat(1000);

    auto rep_strict = corrigid::rigidity_check(emb, strict);
    auto rep_loose = corrigid::rigidity_check(emb, loose);
    CHECK(rep_loose.agreement_failures == 0);
    CHECK(rep_loose.formula_failures == 0);
    CHECK(rep_loose.pass);
    CHECK(rep_strict.agreement_failures + rep_strict.formula_failures >=
          rep_loose.agreement_failures + rep_loose.formula_failures);
}

TEST_CASE("corruption curve walks agreement down to zero") {
    Embedding emb = reference_embedding();
    std::vector<Rat> fracs = {Rat(0), Rat(1, 3), Rat(2, 3), Rat(1)};
    auto curve = corrigid::corruption_curve(emb, fracs, 42);
    REQUIRE(curve.size() == 4);

    for (size_t k = 0; k < 4; ++k) {
        CHECK(curve[k].fraction == fracs[k]);
        CHECK(curve[k].x == 1 - fracs[k]);  // 3 pairs, integral cuts
        CHECK(curve[k].bound ==
              std::min(Rat(emb.params.c_S + curve[k].x), Rat(1)));
    }
    // The uncorrupted start point beats the hand-tuned reference fees.
    CHECK(curve[0].ratio >= 1);
    // Revenue only falls as thresholds disappear.
    for (size_t k = 1; k < 4; ++k) CHECK(curve[k].ratio <= curve[k - 1].ratio);

    auto again = corrigid::corruption_curve(emb, fracs, 42);
    for (size_t k = 0; k < 4; ++k) CHECK(again[k].ratio == curve[k].ratio);

    CHECK_THROWS_AS(corrigid::corruption_curve(emb, {Rat(2)}, 1),
                    std::invalid_argument);
}

// ---------------------------------------------------------------------------
// allocation strings and the counting inequality
// ---------------------------------------------------------------------------

TEST_CASE("allocation strings follow the chosen instance order") {
    JointDistribution d = two_by_two();
    corrigid::AllocationPlan plan;
    plan[{Rat(1), Rat(1)}] = 0;
    plan[{Rat(1), Rat(2)}] = 1;
    plan[{Rat(2), Rat(1)}] = std::nullopt;
    plan[{Rat(2), Rat(2)}] = 0;

    // Argmax order groups player-0-wins first: (1,1), (2,1), (2,2), (1,2).
    CHECK(corrigid::allocation_string(d, plan, corrigid::StringOrder::CM) == "1012");
    // Lexicographic order: (1,1), (1,2), (2,1), (2,2).
    CHECK(corrigid::allocation_string(d, plan, corrigid::StringOrder::Lex) == "1201");
}

TEST_CASE("allocation strings round-trip in both orders") {
    JointDistribution d = two_by_two();
    for (auto order : {corrigid::StringOrder::CM, corrigid::StringOrder::Lex}) {
        corrigid::AllocationPlan plan;
        plan[{Rat(1), Rat(1)}] = 1;
        plan[{Rat(1), Rat(2)}] = std::nullopt;
        plan[{Rat(2), Rat(1)}] = 0;
        plan[{Rat(2), Rat(2)}] = 1;
        std::string text = corrigid::allocation_string(d, plan, order);
        auto back = corrigid::decode_allocation_string(d, text, order);
        CHECK(back == plan);
    }
}

TEST_CASE("allocation string rejects bad plans and bad text") {
    JointDistribution d = two_by_two();
    corrigid::AllocationPlan partial;
    partial[{Rat(1), Rat(1)}] = 0;
    CHECK_THROWS_AS(corrigid::allocation_string(d, partial, corrigid::StringOrder::CM),
                    std::invalid_argument);

    corrigid::AllocationPlan bad;
    bad[{Rat(1), Rat(1)}] = 7;
    bad[{Rat(1), Rat(2)}] = 0;
    bad[{Rat(2), Rat(1)}] = 0;
    bad[{Rat(2), Rat(2)}] = 0;
    CHECK_THROWS_AS(corrigid::allocation_string(d, bad, corrigid::StringOrder::CM),
                    std::invalid_argument);

    CHECK_THROWS_AS(corrigid::decode_allocation_string(d, "101", corrigid::StringOrder::CM),
                    std::invalid_argument);
    CHECK_THROWS_AS(corrigid::decode_allocation_string(d, "10x2", corrigid::StringOrder::CM),
                    std::invalid_argument);
    CHECK_THROWS_AS(corrigid::decode_allocation_string(d, "1039", corrigid::StringOrder::CM),
                    std::invalid_argument);
}

TEST_CASE("counting inequality evaluates both sides exactly") {
    auto res = corrigid::kc_inequality(1, 2, 1, 2, 1, Rat(1));
    CHECK(res.lhs == Rat(1, 2));
    CHECK(res.rhs == Rat(4));
    CHECK_FALSE(res.holds);

    res = corrigid::kc_inequality(100, 2, 1, 1, 0, Rat(0));
    CHECK(res.lhs == Rat(50));
    CHECK(res.rhs == Rat(1));
    CHECK(res.holds);

    // Fractional x floors the exponent: floor(3 * 1/2) = 1.
    res = corrigid::kc_inequality(5, 4, 3, 2, 2, Rat(1, 2));
    CHECK(res.lhs == Rat(5, 4));
    CHECK(res.rhs == Rat(4 * 3 * 2));
    CHECK_FALSE(res.holds);

    CHECK_THROWS_AS(corrigid::kc_inequality(1, 2, 3, 2, 1, Rat(1)),
                    std::invalid_argument);  // g > r
    CHECK_THROWS_AS(corrigid::kc_inequality(1, 2, 1, 2, 1, Rat(2)),
                    std::invalid_argument);  // x > 1
}
