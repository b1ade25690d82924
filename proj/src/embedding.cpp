// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0

#include "corrigid/embedding.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace corrigid {

namespace {

// Internal invariants of the constant schedule. These hold for every valid
// set by construction; a failure means the schedule itself is broken, so we
// throw rather than assert to keep the check in release builds.
void require(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("embedding invariant: ") + what);
}

Rat min_of(const std::vector<Rat>& xs) {
    return *std::min_element(xs.begin(), xs.end());
}

}  // namespace

std::vector<Rat> equal_revenue_masses(const std::vector<Rat>& ladder) {
    const size_t len = ladder.size();
    if (len < 2) throw std::invalid_argument("ladder needs at least two values");
    const Rat& y0 = ladder[0];
    std::vector<Rat> q(len);
    q[0] = 1 - y0 / ladder[1];
    for (size_t r = 1; r + 1 < len; ++r)
        q[r] = y0 / ladder[r] - y0 / ladder[r + 1];
    q[len - 1] = y0 / ladder[len - 1];
    return q;
}

EmbeddingConstants resolve_constants(const MDivisibleSet& s,
                                     const SetParameters& p) {
    EmbeddingConstants c;
    c.delta = Rat(1, 10);
    c.omega = Rat(1, 20);

    const long n = s.n;
    const long m = s.m;
    const long a = p.a;
    const long size = static_cast<long>(p.size);

    // Scan the set: smallest base value, largest coordinate that can appear
    // outside a ladder, and the per-round threshold margins.
    Rat min_base = s.base_vectors[0][0];
    Rat big = s.base_vectors[0][0];
    std::vector<Rat> max_base(m);
    c.gapfull.resize(m);
    for (int j = 0; j < m; ++j) {
        max_base[j] = s.base_vectors[j][0];
        for (int i = 0; i < n; ++i) {
            const Rat& v = s.base_vectors[j][i];
            if (v < min_base) min_base = v;
            if (max_base[j] < v) max_base[j] = v;
        }
        if (big < max_base[j]) big = max_base[j];
        bool first = true;
        for (int i : s.active_sets[j]) {
            Rat margin = s.threshold(j, i) - s.base_vectors[j][i];
            if (first || margin < c.gapfull[j]) c.gapfull[j] = margin;
            first = false;
            if (big < s.threshold(j, i)) big = s.threshold(j, i);
        }
    }

    // Cap on how far the deviation values and the winning offset may drift
    // below the full margin. Sized so that the fee gap_j differs from the
    // full margin by at most a factor costing omega/17 in the aggregated
    // round score, which keeps the corruption-curve endpoint within omega.
    c.alpha_budget.resize(m);
    for (int j = 0; j < m; ++j) {
        Rat rev_budget = Rat(c.omega * size * c.gapfull[j] * c.gapfull[j]) /
                         Rat(8 * m * max_base[j]);
        c.alpha_budget[j] = std::min(Rat(c.gapfull[j] / 2), rev_budget);
    }

    Rat min_gapfull = min_of(c.gapfull);
    c.eps_dev =
        Rat(std::min(std::min(c.omega, min_of(c.alpha_budget)), Rat(2 * min_gapfull))) /
        2;

    // Interior deviation values: u' = v + gapfull_j - nudge, each nudge
    // distinct, shrunk further if the candidate collides with one of the
    // player's existing values.
    std::map<int, std::set<Rat>> taken;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) taken[i].insert(s.base_vectors[j][i]);
    for (const auto& [key, u] : s.thresholds) taken[key.second].insert(u);
    // The ladder cap is already determined by the set, so keep the deviation
    // values clear of it as well; a hit would merge two value rows of the
    // conditional-probability matrix.
    for (int i : p.active_players)
        taken[i].insert(Rat(p.sorted_values.at(i).back() / (1 - p.d.at(i))));

    long idx = 0;
    for (int j = 0; j < m; ++j) {
        for (int i : s.active_sets[j]) {
            c.u_bar[{j, i}] = s.threshold(j, i);
            Rat nudge =
                Rat(std::min(c.eps_dev, c.alpha_budget[j])) / (4 * (idx + 2));
            const Rat& v = s.base_vectors[j][i];
            Rat cand = v + c.gapfull[j] - nudge;
            while (taken[i].count(cand)) {
                nudge /= 2;
                cand = v + c.gapfull[j] - nudge;
            }
            taken[i].insert(cand);
            c.u_prime[{j, i}] = cand;
            ++idx;
        }
    }

    // Winning offset and per-round fee.
    bool first = true;
    Rat min_margin;
    for (const auto& [key, up] : c.u_prime) {
        Rat margin = up - s.base_vectors[key.first][key.second];
        if (first || margin < min_margin) min_margin = margin;
        first = false;
    }
    c.eps_win =
        std::min(Rat(min_margin / 2), Rat(min_of(c.alpha_budget) / 4));

    c.gap.resize(m);
    for (int j = 0; j < m; ++j) {
        bool f = true;
        for (int i : s.active_sets[j]) {
            Rat margin = c.u_prime.at({j, i}) - s.base_vectors[j][i];
            if (f || margin < c.gap[j]) c.gap[j] = margin;
            f = false;
        }
        c.gap[j] -= c.eps_win;
        require(c.gap[j] > 0, "fee margin positive");
    }

    // Tiny-value ceiling, first pass: depends only on the set.
    c.mu_hat = Rat(std::min(
                   Rat(c.omega / (5 * n * m + 3 * n + n * n + n * n * m)),
                   min_base)) /
               2;

    // Ladder floor product e. Two ceilings: every round mass must fit under
    // (delta - mu_hat)/m, and every floor must sit below half the player's
    // lowest winning value.
    Rat e_cap = Rat((c.delta - c.mu_hat) * a * min_of(c.gap)) /
                Rat(m * (1 - c.delta));
    for (int i : p.active_players) {
        Rat lowest = Rat(p.d.at(i) * p.sorted_values.at(i).front());
        if (lowest < e_cap) e_cap = lowest;
    }
    c.e = e_cap / 2;
    require(c.e > 0, "ladder product positive");

    // A ladder floor e/d_i sits below every winning value of its owner, but
    // it could still land exactly on one of the player's values from rounds
    // where he is passive. Shrink e until every floor is fresh; any smaller
    // positive e satisfies the same ceilings.
    for (bool moved = true; moved;) {
        moved = false;
        for (int i : p.active_players) {
            if (taken[i].count(Rat(c.e / p.d.at(i)))) {
                c.e = Rat(c.e * 8) / 9;
                moved = true;
            }
        }
    }

    // Ladders and their equal-revenue masses.
    for (int i : p.active_players) {
        const Rat& d = p.d.at(i);
        const std::vector<Rat>& ys = p.sorted_values.at(i);
        Rat y0 = c.e / d;
        Rat y_top = ys.back() / (1 - d);
        std::vector<Rat> lad;
        lad.reserve(ys.size() + 2);
        lad.push_back(y0);
        lad.insert(lad.end(), ys.begin(), ys.end());
        lad.push_back(y_top);
        require(y0 < ys.front(), "ladder floor below lowest winning value");
        std::vector<Rat> q = equal_revenue_masses(lad);
        Rat total(0);
        for (size_t r = 0; r < q.size(); ++r) {
            require(q[r] > 0 && q[r] < 1, "ladder mass in (0,1)");
            total += q[r];
            if (r >= 1 && r + 1 < q.size())
                require(c.e <= Rat(lad[r] * q[r]), "fee cap below price mass");
        }
        require(total == 1, "ladder masses sum to one");
        c.y0[i] = y0;
        c.y_top[i] = y_top;
        c.ladder[i] = std::move(lad);
        c.q[i] = std::move(q);
    }

    c.mu = c.mu_hat;
    for (const auto& [i, y0] : c.y0)
        c.mu = std::min(c.mu, Rat(y0 / 2));

    // Base-vector masses.
    c.round_mass.resize(m);
    Rat mass_sum(0);
    for (int j = 0; j < m; ++j) {
        c.round_mass[j] = Rat((1 - c.delta) * c.e) / Rat(a * c.gap[j]);
        mass_sum += c.round_mass[j];
    }
    require(mass_sum <= Rat(c.delta - 2 * c.mu), "round masses fit under delta");

    // Count of instances that will carry mass xi.
    long pair_count = 0;
    for (int j = 0; j < m; ++j) {
        long aj = static_cast<long>(s.active_sets[j].size());
        pair_count += aj * (aj - 1);
    }
    const long guards = 2 * size + a + 2 * pair_count;
    c.guard_count = guards;

    // xi: below the tiny ceiling relative to the largest coordinate, inside
    // the omega welfare budget both absolutely and relative to the closed
    // form fee revenue, and small enough that all guards fit in delta/4.
    Rat closed_form = Rat(size * c.e) * Rat((1 - c.delta)) / a;
    std::vector<Rat> xi_caps = {
        Rat(c.mu / big),
        Rat(c.mu / (4 * n * n * m)),
        Rat(c.omega / Rat(2 * n * m * big + c.mu * (n + n * m + n * n * m))),
        Rat(Rat(c.delta / 4) / guards),
        Rat(c.mu / 2),
        Rat(Rat(c.omega * closed_form) / Rat(2 * guards * big)),
    };
    c.xi = min_of(xi_caps) / 2;
    require(c.xi > 0, "guard mass positive");

    // Tiny values from one shared grid strictly below mu. Order: ladder
    // opponents, single guards, pair guards (round-major), filler.
    const long tiny_count = 2 * a + 2 * pair_count + n;
    Rat unit = c.mu / (2 * tiny_count);
    long t = 0;
    auto next_tiny = [&]() { return Rat(++t * unit); };
    for (int i : p.active_players) c.rho[i] = next_tiny();
    for (int i : p.active_players) c.eta_single[i] = next_tiny();
    for (int j = 0; j < m; ++j)
        for (int i : s.active_sets[j])
            for (int k : s.active_sets[j]) {
                if (i == k) continue;
                c.eta_pair[{j, i, k}] = next_tiny();
                c.eta_pair_prime[{j, i, k}] = next_tiny();
            }
    c.filler_values.resize(n);
    for (int i = 0; i < n; ++i) c.filler_values[i] = next_tiny();
    require(t == tiny_count, "tiny grid fully used");

    c.filler_mass = 1 - (1 - c.delta) - mass_sum - Rat(guards * c.xi);
    require(c.filler_mass > 0, "filler mass positive");
    return c;
}

Embedding build_embedding(const MDivisibleSet& s) {
    {
        std::vector<std::string> errs = validate_set(s);
        if (!errs.empty())
            throw std::invalid_argument("invalid set: " + errs.front());
    }
    Embedding emb;
    emb.set = s;
    emb.params = parameters(s);
    emb.constants = resolve_constants(s, emb.params);
    const EmbeddingConstants& c = emb.constants;
    const int n = s.n;

    emb.distribution.n = n;
    auto push = [&](Instance v, Rat mass, InstanceTag tag) {
        emb.tags.emplace(v, tag);
        emb.distribution.support.push_back({std::move(v), std::move(mass)});
    };

    // Ladders: player i at y_{i,r}, everyone else at rho_i.
    const Rat ladder_share = Rat(1 - c.delta) / emb.params.a;
    for (int i : emb.params.active_players) {
        const std::vector<Rat>& lad = c.ladder.at(i);
        const std::vector<Rat>& q = c.q.at(i);
        for (size_t r = 0; r < lad.size(); ++r) {
            Instance v(n, c.rho.at(i));
            v[i] = lad[r];
            InstanceTag tag;
            tag.kind = InstanceTag::Kind::Ladder;
            tag.player = i;
            tag.rank = static_cast<int>(r);
            push(std::move(v), Rat(q[r] * ladder_share), tag);
        }
    }

    // Base vectors.
    for (int j = 0; j < s.m; ++j) {
        InstanceTag tag;
        tag.kind = InstanceTag::Kind::Base;
        tag.round = j;
        push(s.base_vectors[j], c.round_mass[j], tag);
    }

    // Deviations: player i raised to u' (interior) and to u (the threshold).
    for (int j = 0; j < s.m; ++j) {
        for (int i : s.active_sets[j]) {
            Instance lo = s.base_vectors[j];
            lo[i] = c.u_prime.at({j, i});
            InstanceTag tag;
            tag.kind = InstanceTag::Kind::Deviation;
            tag.player = i;
            tag.round = j;
            push(std::move(lo), c.xi, tag);

            Instance hi = s.base_vectors[j];
            hi[i] = c.u_bar.at({j, i});
            tag.at_threshold = true;
            push(std::move(hi), c.xi, tag);
        }
    }

    // Single guards: tiny value against the player's own ladder column.
    for (int i : emb.params.active_players) {
        Instance v(n, c.rho.at(i));
        v[i] = c.eta_single.at(i);
        InstanceTag tag;
        tag.kind = InstanceTag::Kind::Guard;
        tag.player = i;
        push(std::move(v), c.xi, tag);
    }

    // Pair guards: tiny holder i against partner k raised to u' or u.
    for (int j = 0; j < s.m; ++j) {
        for (int i : s.active_sets[j]) {
            for (int k : s.active_sets[j]) {
                if (i == k) continue;
                InstanceTag tag;
                tag.kind = InstanceTag::Kind::GuardPair;
                tag.player = i;
                tag.round = j;
                tag.partner = k;

                Instance lo = s.base_vectors[j];
                lo[i] = c.eta_pair.at({j, i, k});
                lo[k] = c.u_prime.at({j, k});
                push(std::move(lo), c.xi, tag);

                Instance hi = s.base_vectors[j];
                hi[i] = c.eta_pair_prime.at({j, i, k});
                hi[k] = c.u_bar.at({j, k});
                tag.at_threshold = true;
                push(std::move(hi), c.xi, tag);
            }
        }
    }

    {
        InstanceTag tag;
        tag.kind = InstanceTag::Kind::Filler;
        push(c.filler_values, c.filler_mass, tag);
    }

    {
        std::vector<std::string> errs = validate_distribution(emb.distribution);
        require(errs.empty(), "assembled distribution is valid");
    }
    long long bound = 5 * emb.params.size + s.m;
    for (int j = 0; j < s.m; ++j) {
        long long aj = static_cast<long long>(s.active_sets[j].size());
        bound += 2 * aj * aj;
    }
    require(static_cast<long long>(emb.distribution.support.size()) <= bound,
            "support size within bound");
    return emb;
}

std::pair<ThresholdMechanism, FeeSchedule> reference_mechanism(
    const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    const EmbeddingConstants& c = emb.constants;
    ThresholdMechanism mech(s.n);
    FeeSchedule fees(s.n);
    for (int i : emb.params.active_players) {
        Profile others(static_cast<size_t>(s.n) - 1, c.rho.at(i));
        mech.set(i, std::move(others), ExtRat(Rat(0)));
    }
    for (int j = 0; j < s.m; ++j) {
        for (int i : s.active_sets[j]) {
            Profile prof = profile_without(s.base_vectors[j], i);
            mech.set(i, prof, ExtRat(Rat(s.base_vectors[j][i] + c.eps_win)));
            fees.set(i, std::move(prof), c.gap[j]);
        }
    }
    return {std::move(mech), std::move(fees)};
}

std::pair<ThresholdMechanism, FeeSchedule> reference_mechanism_almost_linear(
    const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    const EmbeddingConstants& c = emb.constants;
    ThresholdMechanism mech(s.n);
    FeeSchedule fees(s.n);
    for (int i : emb.params.active_players) {
        Profile others(static_cast<size_t>(s.n) - 1, c.rho.at(i));
        mech.set(i, std::move(others), ExtRat(c.y0.at(i)));
    }
    for (int j = 0; j < s.m; ++j) {
        const Instance& base = s.base_vectors[j];
        int high = 0;
        for (int i = 1; i < s.n; ++i)
            if (base[i] > base[high]) high = i;
        mech.set(high, profile_without(base, high), ExtRat(base[high]));

        for (int i : s.active_sets[j]) {
            Profile prof = profile_without(base, i);
            if (i != high)
                mech.set(i, prof, ExtRat(Rat(base[i] + c.eps_win)));
            int rank = emb.params.sigma.at({i, j});
            Rat fstar = std::min(
                Rat((c.ladder.at(i)[rank] - c.y0.at(i)) * c.q.at(i)[rank]),
                c.e);
            Rat fee = Rat((1 - c.delta) * fstar) /
                      Rat(emb.params.a * c.round_mass[j]);
            fees.set(i, std::move(prof), std::move(fee));
        }
    }
    return {std::move(mech), std::move(fees)};
}

}  // namespace corrigid
