// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0

#include "corrigid/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/lp.hpp"
#include "corrigid/rng.hpp"

namespace corrigid {

namespace {

[[noreturn]] void fail_arg(const std::string& msg) {
    throw std::invalid_argument(msg);
}

void ensure(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("verify invariant: ") + what);
}

// ---------------------------------------------------------------------------
// optimal_fees
// ---------------------------------------------------------------------------

// Per-player view of the support: distinct opponent profiles ("columns"),
// distinct own values ("rows"), and the instance mass connecting them. All
// row constraints are kept unnormalized, sum_cols mass * c <= budget with
// budget = sum of win profits weighted by instance mass; scaling a row by
// the positive marginal Pr(v_i) recovers the conditional form, so the
// feasible fee set is identical.
struct FeeGraph {
    std::vector<Profile> cols;
    std::vector<Rat> col_mass;
    std::vector<Rat> row_value;   // player's values, ascending
    std::vector<Rat> row_budget;  // sum of mass * profit over the row
    // entry list per row: (col index, instance mass)
    std::vector<std::vector<std::pair<int, Rat>>> row_entries;
};

FeeGraph build_fee_graph(const ThresholdMechanism& mech,
                         const JointDistribution& d, int player) {
    FeeGraph g;
    std::map<Profile, int, LexLess> col_index;
    std::map<Rat, int> row_index;
    for (const WeightedInstance& wi : d.support) {
        const Rat& v = wi.values[player];
        if (!row_index.count(v)) row_index[v] = 0;
    }
    int r = 0;
    for (auto& [v, idx] : row_index) idx = r++;
    g.row_value.resize(row_index.size());
    g.row_budget.assign(row_index.size(), Rat(0));
    g.row_entries.resize(row_index.size());
    for (const auto& [v, idx] : row_index) g.row_value[idx] = v;

    for (const WeightedInstance& wi : d.support) {
        Profile prof = profile_without(wi.values, player);
        auto [it, fresh] = col_index.try_emplace(prof, static_cast<int>(g.cols.size()));
        if (fresh) {
            g.cols.push_back(prof);
            g.col_mass.push_back(Rat(0));
        }
        int c = it->second;
        int row = row_index.at(wi.values[player]);
        g.col_mass[c] += wi.prob;
        g.row_entries[row].emplace_back(c, wi.prob);
        std::optional<int> w = allocation(mech, wi.values);
        if (w && *w == player) {
            ExtRat t = mech.threshold(player, prof);
            ensure(!t.is_inf, "winner faces a finite threshold");
            g.row_budget[row] += Rat(wi.prob * (wi.values[player] - t.value));
        }
    }
    return g;
}

// Union-find over rows and columns of one fee graph.
struct Unions {
    std::vector<int> parent;
    explicit Unions(int k) : parent(k) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

FeeOptimum optimal_fees(const ThresholdMechanism& mech,
                        const JointDistribution& d) {
    if (d.n <= 0 || d.support.empty()) fail_arg("optimal_fees: empty distribution");
    if (mech.n != d.n) fail_arg("optimal_fees: player count mismatch");

    FeeOptimum out;
    out.fees = FeeSchedule(d.n);
    out.total = 0;

    for (int i = 0; i < d.n; ++i) {
        FeeGraph g = build_fee_graph(mech, d, i);
        const int rows = static_cast<int>(g.row_value.size());
        const int cols = static_cast<int>(g.cols.size());

        Unions uf(rows + cols);
        for (int r = 0; r < rows; ++r)
            for (const auto& [c, mass] : g.row_entries[r]) uf.join(r, rows + c);

        std::map<int, std::vector<int>> comp_rows, comp_cols;
        for (int r = 0; r < rows; ++r) comp_rows[uf.find(r)].push_back(r);
        for (int c = 0; c < cols; ++c) comp_cols[uf.find(rows + c)].push_back(c);

        for (const auto& [root, rlist] : comp_rows) {
            const std::vector<int>& clist = comp_cols.at(root);
            if (rlist.size() == 1) {
                // One value against these profiles: the fee objective equals
                // the single constraint row, so the whole budget transfers.
                int r = rlist.front();
                if (g.row_budget[r] > 0) {
                    const auto& [c, mass] = g.row_entries[r].front();
                    out.fees.set(i, g.cols[c], Rat(g.row_budget[r] / mass));
                    out.total += g.row_budget[r];
                }
                continue;
            }
            std::map<int, int> col_var;
            for (size_t k = 0; k < clist.size(); ++k) col_var[clist[k]] = static_cast<int>(k);
            LPProblem lp;
            lp.objective.resize(clist.size());
            for (size_t k = 0; k < clist.size(); ++k)
                lp.objective[k] = g.col_mass[clist[k]];
            for (int r : rlist) {
                std::vector<Rat> row(clist.size(), Rat(0));
                for (const auto& [c, mass] : g.row_entries[r]) row[col_var.at(c)] += mass;
                lp.a.push_back(std::move(row));
                lp.rhs.push_back(g.row_budget[r]);
            }
            LPResult res = lp_max(lp);
            ensure(res.status == LPStatus::Optimal, "fee program is bounded and feasible");
            for (size_t k = 0; k < clist.size(); ++k)
                if (res.x[k] != 0) out.fees.set(i, g.cols[clist[k]], res.x[k]);
            out.total += res.value;
        }
    }

    ensure(check_interim_ir(mech, out.fees, d).empty(),
           "optimal fee schedule satisfies participation");
    return out;
}

// ---------------------------------------------------------------------------
// embedded_fee_optimum
// ---------------------------------------------------------------------------

namespace {

// Column descriptors of an embedded prior, built once per call.
struct EmbeddedIndex {
    std::map<int, Profile> ladder_col;                 // active player -> column
    std::vector<std::vector<Profile>> base_col;        // [j][i]
    // Picked fee carriers per (round, player): an opponent profile whose only
    // co-occurrence with the player is the named value row.
    std::map<std::pair<int, int>, Profile> carrier_v;       // guard-pair columns,
    std::map<std::pair<int, int>, Profile> carrier_dev;     // tiny partner at u'
    std::map<std::pair<int, int>, Profile> carrier_dev_bar; // tiny partner at u
};

EmbeddedIndex build_embedded_index(const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    EmbeddedIndex ix;
    for (int i : emb.params.active_players) {
        Instance pattern(s.n, emb.constants.rho.at(i));
        ix.ladder_col[i] = profile_without(pattern, i);
    }
    ix.base_col.resize(s.m);
    for (int j = 0; j < s.m; ++j) {
        ix.base_col[j].resize(s.n);
        for (int i = 0; i < s.n; ++i)
            ix.base_col[j][i] = profile_without(s.base_vectors[j], i);
    }
    for (const auto& [inst, tag] : emb.tags) {
        if (tag.kind != InstanceTag::Kind::GuardPair) continue;
        std::pair<int, int> dev_key{tag.round, tag.partner};
        if (!tag.at_threshold && !ix.carrier_dev.count(dev_key))
            ix.carrier_dev[dev_key] = profile_without(inst, tag.partner);
        if (tag.at_threshold && !ix.carrier_dev_bar.count(dev_key))
            ix.carrier_dev_bar[dev_key] = profile_without(inst, tag.partner);
        // A third active player sees this instance purely through his base
        // value row, which makes it a direct carrier for that row's budget.
        for (int i : s.active_sets[tag.round]) {
            if (i == tag.player || i == tag.partner) continue;
            std::pair<int, int> key{tag.round, i};
            if (!ix.carrier_v.count(key)) ix.carrier_v[key] = profile_without(inst, i);
        }
    }
    return ix;
}

}  // namespace

// How this stays exact without a simplex call: fix a player i and scale each
// participation row by its marginal, so row v reads
//   sum_instances mass * c_i(profile) <= budget(v) = sum mass * profit.
// Summing every row of i shows the expected fee equals the sum of row
// left-hand sides. Rows whose budget is provably zero under the grid
// restriction (the tiny guard rows, the ladder floor/cap rows, values seen
// only against unset columns) contribute nonpositively, so the optimum is at
// most the sum of the remaining budgets: per active pair (i,j) the rows at
// v_{i,j}, u'_{i,j}, u_{i,j}, and per passive pair the row at v_{i,j}. Each
// of those budgets is achievable: guard-pair columns touch exactly one row
// of a bystander, so they carry its budget directly, and when round j has
// only two active players the base column is loaded and the tiny-partner
// columns of the two deviation rows absorb the overflow. Matching upper and
// lower bounds give the optimum. Two schedule facts back the "nonpositive"
// step for columns shared across rows (the ladder column and the deviation
// columns): the floor mass satisfies q_{i,0} >= 1/2 and xi <= round_mass/2,
// both asserted below.
FeeOptimum embedded_fee_optimum(const ThresholdMechanism& mech,
                                const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    const EmbeddingConstants& cs = emb.constants;
    const JointDistribution& d = emb.distribution;
    if (mech.n != s.n) fail_arg("embedded_fee_optimum: player count mismatch");

    for (int i : emb.params.active_players)
        ensure(cs.q.at(i)[0] * 2 >= 1, "ladder floor holds half the ladder mass");
    for (int j = 0; j < s.m; ++j)
        ensure(cs.xi * 2 <= cs.round_mass[j], "guard mass below half the base mass");

    // The closed form treats each priced value of a player as its own
    // participation row. A set may still alias two of them (say a threshold
    // from one round equal to a base value in another); those rows merge and
    // the shortcut would double-count, so hand such priors to the solver.
    for (int i = 0; i < s.n; ++i) {
        std::set<Rat> slots;
        bool aliased = false;
        auto claim = [&](const Rat& v) { aliased |= !slots.insert(v).second; };
        for (int j = 0; j < s.m && !aliased; ++j) {
            claim(s.base_vectors[j][i]);
            if (s.is_active(j, i)) {
                claim(cs.u_prime.at({j, i}));
                claim(cs.u_bar.at({j, i}));
            }
        }
        if (!aliased && cs.y0.count(i)) {
            claim(cs.y0.at(i));
            claim(cs.y_top.at(i));
        }
        if (aliased) return optimal_fees(mech, emb.distribution);
    }

    EmbeddedIndex ix = build_embedded_index(emb);

    // Contract: finite thresholds only on ladder columns (at or above the
    // guard value) and base columns. Anything else needs the general solver.
    for (int i = 0; i < s.n; ++i) {
        for (const auto& [prof, t] : mech.thresholds[i]) {
            if (t.is_inf) continue;
            auto lad = ix.ladder_col.find(i);
            if (lad != ix.ladder_col.end() && prof == lad->second) {
                if (t.value < cs.eta_single.at(i))
                    fail_arg("embedded_fee_optimum: ladder threshold below the guard value");
                continue;
            }
            bool on_base = false;
            for (int j = 0; j < s.m && !on_base; ++j)
                on_base = (prof == ix.base_col[j][i]);
            if (!on_base)
                fail_arg("embedded_fee_optimum: threshold off the ladder/base grid");
        }
    }

    // Row budgets: mass-weighted win profit per (player, value).
    std::vector<std::map<Rat, Rat>> budget(s.n);
    for (const WeightedInstance& wi : d.support) {
        std::optional<int> w = allocation(mech, wi.values);
        if (!w) continue;
        ExtRat t = mech.threshold(*w, profile_without(wi.values, *w));
        budget[*w][wi.values[*w]] += Rat(wi.prob * (wi.values[*w] - t.value));
    }
    auto row_budget = [&](int i, const Rat& v) {
        auto it = budget[i].find(v);
        return it == budget[i].end() ? Rat(0) : it->second;
    };

    FeeOptimum out;
    out.fees = FeeSchedule(s.n);
    out.total = 0;

    for (int j = 0; j < s.m; ++j) {
        const std::vector<int>& act = s.active_sets[j];
        const Rat& dj = cs.round_mass[j];
        for (int i = 0; i < s.n; ++i) {
            const Rat& v = s.base_vectors[j][i];
            if (!s.is_active(j, i)) {
                Rat bv = row_budget(i, v);
                if (bv > 0) {
                    out.fees.set(i, ix.base_col[j][i], Rat(bv / dj));
                    out.total += bv;
                }
                continue;
            }
            Rat bv = row_budget(i, v);
            Rat bu_prime = row_budget(i, cs.u_prime.at({j, i}));
            Rat bu_bar = row_budget(i, cs.u_bar.at({j, i}));
            if (act.size() == 1) {
                Rat cap = std::min(Rat(bv / dj),
                                   Rat(std::min(bu_prime, bu_bar) / cs.xi));
                if (cap > 0) {
                    out.fees.set(i, ix.base_col[j][i], cap);
                    out.total += Rat(cap * (dj + 2 * cs.xi));
                }
                continue;
            }
            out.total += Rat(bv + bu_prime + bu_bar);
            std::pair<int, int> key{j, i};
            if (act.size() >= 3) {
                if (bv > 0) out.fees.set(i, ix.carrier_v.at(key), Rat(bv / cs.xi));
                if (bu_prime > 0)
                    out.fees.set(i, ix.carrier_dev.at(key), Rat(bu_prime / cs.xi));
                if (bu_bar > 0)
                    out.fees.set(i, ix.carrier_dev_bar.at(key), Rat(bu_bar / cs.xi));
            } else {
                // Two active players: route the base row's budget through the
                // base column and let the tiny-partner columns of the two
                // deviation rows take up the slack, which may push their fees
                // negative. Participation still binds row by row.
                Rat cb = Rat(bv / dj);
                if (cb != 0) out.fees.set(i, ix.base_col[j][i], cb);
                Rat f1 = Rat(bu_prime / cs.xi - cb);
                Rat f2 = Rat(bu_bar / cs.xi - cb);
                if (f1 != 0) out.fees.set(i, ix.carrier_dev.at(key), f1);
                if (f2 != 0) out.fees.set(i, ix.carrier_dev_bar.at(key), f2);
            }
        }
    }

    ensure(check_interim_ir(mech, out.fees, d).empty(),
           "embedded fee schedule satisfies participation");
    return out;
}

// ---------------------------------------------------------------------------
// upper_bound_formula
// ---------------------------------------------------------------------------

BoundDiagnostics upper_bound_formula(const ThresholdMechanism& mech,
                                     const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    const EmbeddingConstants& cs = emb.constants;
    if (mech.n != s.n) fail_arg("upper_bound_formula: player count mismatch");

    BoundDiagnostics diag;
    diag.value = 0;
    Rat w = Rat(1 - cs.delta) / emb.params.a;

    for (int i : emb.params.active_players) {
        Instance pattern(s.n, cs.rho.at(i));
        ExtRat t = mech.threshold(i, profile_without(pattern, i));
        diag.ladder_threshold[i] = t;
        if (t.is_inf) continue;
        const std::vector<Rat>& lad = cs.ladder.at(i);
        const std::vector<Rat>& q = cs.q.at(i);
        Rat tail(0);
        for (size_t r = 0; r < lad.size(); ++r)
            if (!(lad[r] < t.value)) tail += q[r];
        diag.value += Rat(t.value * tail * w);
    }

    for (int j = 0; j < s.m; ++j) {
        Rat top = s.base_vectors[j][0];
        for (int i = 1; i < s.n; ++i)
            if (top < s.base_vectors[j][i]) top = s.base_vectors[j][i];
        diag.value += Rat(cs.round_mass[j] * top);

        for (int i = 0; i < s.n; ++i) {
            ExtRat t = mech.threshold(i, profile_without(s.base_vectors[j], i));
            diag.base_threshold[{j, i}] = t;
            diag.undercut[{j, i}] = !t.is_inf && t.value < s.base_vectors[j][i];
        }

        for (int i : s.active_sets[j]) {
            Instance dev = s.base_vectors[j];
            dev[i] = cs.u_bar.at({j, i});
            std::optional<int> winner = allocation(mech, dev);
            bool chi = winner && *winner == i;
            diag.agree[{j, i}] = chi;

            Rat cap(0);
            ExtRat t = diag.ladder_threshold.at(i);
            if (!t.is_inf) {
                int sigma = emb.params.sigma.at({i, j});
                Rat margin = Rat(cs.ladder.at(i)[sigma] - t.value);
                if (margin > 0)
                    cap = std::min(Rat(margin * cs.q.at(i)[sigma]), cs.e);
            }
            diag.fee_cap[{j, i}] = cap;
            if (chi) diag.value += Rat(cap * w);
        }
    }
    return diag;
}

// ---------------------------------------------------------------------------
// brute-force searches
// ---------------------------------------------------------------------------

namespace {

struct Cell {
    int player;
    Profile prof;
    std::vector<Rat> cands;            // finite candidates, ascending
    std::vector<int> insts;            // support indices seen through this cell
};

// Candidate cells for a distribution: one per (player, opponent profile),
// listing the player's co-occurring values. top_k keeps a value only when
// its instance ranks the player among the k highest bids (ties low).
std::vector<Cell> build_cells(const JointDistribution& d, int top_k) {
    std::map<std::pair<int, Profile>, std::set<Rat>,
             bool (*)(const std::pair<int, Profile>&, const std::pair<int, Profile>&)>
        sets([](const std::pair<int, Profile>& a, const std::pair<int, Profile>& b) {
            if (a.first != b.first) return a.first < b.first;
            return lex_less(a.second, b.second);
        });
    for (const WeightedInstance& wi : d.support) {
        for (int i = 0; i < d.n; ++i) {
            if (top_k > 0) {
                int ahead = 0;
                for (int l = 0; l < d.n; ++l) {
                    if (wi.values[l] > wi.values[i]) ++ahead;
                    else if (l < i && wi.values[l] == wi.values[i]) ++ahead;
                }
                if (ahead >= top_k) continue;
            }
            sets[{i, profile_without(wi.values, i)}].insert(wi.values[i]);
        }
    }
    std::vector<Cell> cells;
    for (auto& [key, vals] : sets) {
        Cell c;
        c.player = key.first;
        c.prof = key.second;
        c.cands.assign(vals.begin(), vals.end());
        cells.push_back(std::move(c));
    }
    for (size_t k = 0; k < cells.size(); ++k) {
        for (int t = 0; t < static_cast<int>(d.support.size()); ++t) {
            const Instance& v = d.support[t].values;
            if (profile_without(v, cells[k].player) == cells[k].prof)
                cells[k].insts.push_back(t);
        }
    }
    return cells;
}

[[noreturn]] void throw_cap(const Int& size) {
    throw std::runtime_error("enumeration cap exceeded (size " + size.get_str() + ")");
}

// Depth-first search over one component's cells, tracking per-instance
// winners and pruning as soon as an instance would sell twice.
struct ComponentSearch {
    const JointDistribution& d;
    const std::vector<Cell>& cells;
    std::vector<int> order;                 // cell indices of this component
    std::vector<int> winner;                // per support index, -1 free
    std::vector<std::pair<int, ExtRat>> pick;  // (cell, threshold) of the best
    Rat best = Rat(-1);
    Rat running = Rat(0);
    std::vector<std::pair<int, ExtRat>> current;
    std::uint64_t leaves = 0;

    ComponentSearch(const JointDistribution& dd, const std::vector<Cell>& cc)
        : d(dd), cells(cc), winner(dd.support.size(), -1) {}

    void dfs(size_t depth) {
        if (depth == order.size()) {
            ++leaves;
            if (running > best) {
                best = running;
                pick = current;
            }
            return;
        }
        const Cell& cell = cells[order[depth]];
        // Finite candidates ascending, then "never sell".
        for (size_t k = 0; k <= cell.cands.size(); ++k) {
            bool inf = (k == cell.cands.size());
            std::vector<int> taken;
            bool ok = true;
            Rat gain(0);
            if (!inf) {
                const Rat& t = cell.cands[k];
                for (int idx : cell.insts) {
                    if (d.support[idx].values[cell.player] < t) continue;
                    if (winner[idx] != -1) { ok = false; break; }
                    winner[idx] = cell.player;
                    taken.push_back(idx);
                    gain += Rat(d.support[idx].prob * t);
                }
            }
            if (ok) {
                running += gain;
                current.emplace_back(order[depth],
                                     inf ? ExtRat::inf() : ExtRat(cell.cands[k]));
                dfs(depth + 1);
                current.pop_back();
                running -= gain;
            }
            for (int idx : taken) winner[idx] = -1;
        }
    }
};

}  // namespace

ExpostOptResult brute_force_expost_opt(const JointDistribution& d, int top_k,
                                       std::uint64_t cap) {
    if (d.n <= 0 || d.support.empty())
        fail_arg("brute_force_expost_opt: empty distribution");
    if (top_k < 0) fail_arg("brute_force_expost_opt: negative top_k");

    std::vector<Cell> cells = build_cells(d, top_k);

    // Group instances sharing a cell; components are optimized separately.
    Unions uf(static_cast<int>(d.support.size()));
    for (const Cell& c : cells)
        for (size_t k = 1; k < c.insts.size(); ++k) uf.join(c.insts[0], c.insts[k]);

    std::map<int, std::vector<int>> comp_cells;
    for (size_t k = 0; k < cells.size(); ++k)
        comp_cells[uf.find(cells[k].insts[0])].push_back(static_cast<int>(k));

    Int size(0);
    for (const auto& [root, list] : comp_cells) {
        Int prod(1);
        for (int k : list) prod *= Int(static_cast<long>(cells[k].cands.size()) + 1);
        size += prod;
    }
    if (size > Int(static_cast<unsigned long>(cap))) throw_cap(size);

    ExpostOptResult res;
    res.mech = ThresholdMechanism(d.n);
    res.revenue = 0;
    for (const auto& [root, list] : comp_cells) {
        ComponentSearch search(d, cells);
        search.order = list;
        search.dfs(0);
        res.enumerated += search.leaves;
        res.revenue += search.best;
        for (const auto& [cell, t] : search.pick)
            if (!t.is_inf) res.mech.set(cells[cell].player, cells[cell].prof, t);
    }
    return res;
}

InterimOptResult brute_force_interim_opt(const JointDistribution& d,
                                         std::uint64_t cap, std::uint64_t seed,
                                         std::uint64_t sample_count) {
    if (d.n <= 0 || d.support.empty())
        fail_arg("brute_force_interim_opt: empty distribution");

    std::vector<Cell> cells = build_cells(d, 0);
    Int size(1);
    for (const Cell& c : cells) size *= Int(static_cast<long>(c.cands.size()) + 1);

    InterimOptResult res;
    res.revenue = Rat(-1);

    auto consider = [&](const std::vector<size_t>& choice) {
        ThresholdMechanism mech(d.n);
        for (size_t k = 0; k < cells.size(); ++k)
            if (choice[k] < cells[k].cands.size())
                mech.set(cells[k].player, cells[k].prof, ExtRat(cells[k].cands[choice[k]]));
        if (!check_feasible(mech, d).empty()) return;
        ++res.evaluated;
        FeeOptimum opt = optimal_fees(mech, d);
        Rat total = Rat(expost_revenue(mech, d) + opt.total);
        if (total > res.revenue) {
            res.revenue = total;
            res.mech = std::move(mech);
            res.fees = std::move(opt.fees);
        }
    };

    if (size <= Int(static_cast<unsigned long>(cap))) {
        res.exhaustive = true;
        std::vector<size_t> choice(cells.size(), 0);
        for (;;) {
            consider(choice);
            size_t k = 0;
            while (k < cells.size() && ++choice[k] > cells[k].cands.size()) {
                choice[k] = 0;
                ++k;
            }
            if (k == cells.size()) break;
        }
    } else {
        res.exhaustive = false;
        SplitMix64 rng(seed);
        std::vector<size_t> choice(cells.size());
        for (std::uint64_t t = 0; t < sample_count; ++t) {
            for (size_t k = 0; k < cells.size(); ++k)
                choice[k] = static_cast<size_t>(rng.below(cells[k].cands.size() + 1));
            consider(choice);
        }
        if (res.revenue < 0) {
            // Every draw collided; fall back to the always-feasible idle
            // mechanism so the result is well defined.
            consider(std::vector<size_t>(cells.size(),
                                         std::numeric_limits<size_t>::max()));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// rigidity_check
// ---------------------------------------------------------------------------

namespace {

// The revenue-relevant cells of an embedded prior: each active player's
// ladder column (candidates: ladder prices, the guard value, never sell) and
// every base column (candidates: the base value and, for active players, the
// two deviation prices). All other cells only ever see tiny values, so any
// finite threshold there prices a guard instance and both ceilings gain at
// least as much as the revenue does; restricting the sweep to this grid is
// what makes full enumeration tractable.
struct PrunedCell {
    int player;
    int round;        // -1 for a ladder cell
    Profile prof;
    std::vector<ExtRat> cands;
    std::string name;
};

std::vector<PrunedCell> pruned_cells(const Embedding& emb) {
    const MDivisibleSet& s = emb.set;
    const EmbeddingConstants& cs = emb.constants;
    std::vector<PrunedCell> cells;
    for (int i : emb.params.active_players) {
        PrunedCell c;
        c.player = i;
        c.round = -1;
        Instance pattern(s.n, cs.rho.at(i));
        c.prof = profile_without(pattern, i);
        for (const Rat& y : cs.ladder.at(i)) c.cands.emplace_back(y);
        c.cands.emplace_back(cs.eta_single.at(i));
        c.cands.push_back(ExtRat::inf());
        c.name = "L" + std::to_string(i);
        cells.push_back(std::move(c));
    }
    for (int j = 0; j < s.m; ++j) {
        for (int i = 0; i < s.n; ++i) {
            PrunedCell c;
            c.player = i;
            c.round = j;
            c.prof = profile_without(s.base_vectors[j], i);
            c.cands.emplace_back(s.base_vectors[j][i]);
            if (s.is_active(j, i)) {
                c.cands.emplace_back(cs.u_prime.at({j, i}));
                c.cands.emplace_back(cs.u_bar.at({j, i}));
            }
            c.cands.push_back(ExtRat::inf());
            c.name = "B" + std::to_string(j) + ":" + std::to_string(i);
            cells.push_back(std::move(c));
        }
    }
    return cells;
}

struct RigidityScan {
    const Embedding& emb;
    RigidityReport& rep;
    Rat slack;

    void evaluate(const std::string& label, const ThresholdMechanism& mech,
                  bool embedded_path) {
        FeeOptimum fees = embedded_path ? embedded_fee_optimum(mech, emb)
                                        : optimal_fees(mech, emb.distribution);
        Rat revenue = Rat(expost_revenue(mech, emb.distribution) + fees.total);
        AgreementResult agr = agreement_ratio(mech, emb.set);
        BoundDiagnostics diag = upper_bound_formula(mech, emb);

        RigidityEntry e;
        e.label = label;
        e.x = agr.x;
        e.revenue = revenue;
        Rat factor = std::min(Rat(rep.c_S + agr.x), Rat(1));
        e.agreement_bound = Rat(factor * rep.rev_ref);
        e.formula_bound = diag.value;
        e.agreement_strict = !(revenue > e.agreement_bound);
        e.agreement_ok = !(revenue > Rat((factor + slack) * rep.rev_ref));
        e.formula_strict = !(revenue > diag.value);
        e.formula_ok = !(revenue > Rat(diag.value + slack));

        ++rep.evaluated;
        if (!e.agreement_ok) ++rep.agreement_failures;
        if (!e.formula_ok) ++rep.formula_failures;
        if ((!e.agreement_strict && e.agreement_ok) ||
            (!e.formula_strict && e.formula_ok))
            ++rep.tolerance_only;
        Rat ratio = Rat(revenue / rep.rev_ref);
        if (ratio > rep.max_ratio) rep.max_ratio = ratio;

        bool keep = !label.empty() || !e.agreement_ok || !e.formula_ok;
        if (keep) {
            if (rep.entries.size() < max_entries)
                rep.entries.push_back(std::move(e));
            else
                rep.entries_truncated = true;
        }
    }

    std::size_t max_entries = 1000;
};

std::string describe(const std::vector<PrunedCell>& cells,
                     const std::vector<size_t>& choice) {
    std::string out;
    for (size_t k = 0; k < cells.size(); ++k) {
        if (!out.empty()) out += ' ';
        out += cells[k].name + "=" + format_ext(cells[k].cands[choice[k]]);
    }
    return out;
}

}  // namespace

RigidityReport rigidity_check(const Embedding& emb, const RigidityOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    const MDivisibleSet& s = emb.set;

    RigidityReport rep;
    rep.c_S = emb.params.c_S;
    rep.slack = opt.slack.value_or(emb.constants.omega);
    rep.max_ratio = 0;

    auto [ref_mech, ref_fees] = reference_mechanism_almost_linear(emb);
    rep.rev_ref = interim_revenue(ref_mech, ref_fees, emb.distribution);

    RigidityScan scan{emb, rep, rep.slack};
    scan.max_entries = opt.max_entries;

    // Named baselines, all through the general fee solver: the plain
    // reference prices ladders at zero, which is off the embedded grid.
    auto [plain_mech, plain_fees] = reference_mechanism(emb);
    scan.evaluate("reference", plain_mech, false);
    scan.evaluate("reference-almost-linear", ref_mech, false);
    scan.evaluate("never-sell", ThresholdMechanism(s.n), false);
    {
        ThresholdMechanism gutted = ref_mech;
        for (int j = 0; j < s.m; ++j)
            for (int i : s.active_sets[j])
                gutted.thresholds[i].erase(profile_without(s.base_vectors[j], i));
        scan.evaluate("reference-almost-linear, set thresholds removed", gutted, false);
    }

    std::vector<PrunedCell> cells = pruned_cells(emb);

    // Feasibility among grid mechanisms can only break at a base vector
    // (every other support instance meets at most one finite cell), so it
    // reduces to: at most one player per round may clear his base value.
    auto base_conflict = [&](const ThresholdMechanism& mech, int j) {
        int winners = 0;
        for (int i = 0; i < s.n; ++i) {
            ExtRat t = mech.threshold(i, profile_without(s.base_vectors[j], i));
            if (!t.is_inf && !(s.base_vectors[j][i] < t.value)) ++winners;
        }
        return winners > 1;
    };

    auto assemble = [&](const std::vector<size_t>& choice) {
        ThresholdMechanism mech(s.n);
        for (size_t k = 0; k < cells.size(); ++k)
            if (!cells[k].cands[choice[k]].is_inf)
                mech.set(cells[k].player, cells[k].prof, cells[k].cands[choice[k]]);
        return mech;
    };

    // Full mode degrades to sampling past the cap; the mode field records
    // which one actually ran, so the caller can tell proof from probing.
    bool sampled = opt.sampled;
    if (!sampled) {
        Int size(1);
        for (const PrunedCell& c : cells) size *= Int(static_cast<long>(c.cands.size()));
        if (size > Int(static_cast<unsigned long>(opt.full_cap))) sampled = true;
    }
    rep.mode = sampled ? "sampled" : "full";
    if (sampled) rep.seed = opt.seed;

    if (!sampled) {
        std::vector<size_t> choice(cells.size(), 0);
        for (;;) {
            ThresholdMechanism mech = assemble(choice);
            bool feasible = true;
            for (int j = 0; j < s.m && feasible; ++j) feasible = !base_conflict(mech, j);
            if (feasible)
                scan.evaluate(std::string(), mech, true);
            else
                ++rep.infeasible_skipped;
            // Failures are kept with an empty label; attach the signature.
            if (feasible && !rep.entries.empty() && rep.entries.back().label.empty() &&
                (!rep.entries.back().agreement_ok || !rep.entries.back().formula_ok))
                rep.entries.back().label = describe(cells, choice);
            size_t k = 0;
            while (k < cells.size() && ++choice[k] == cells[k].cands.size()) {
                choice[k] = 0;
                ++k;
            }
            if (k == cells.size()) break;
        }
    }
    if (sampled) {
        SplitMix64 rng(opt.seed);
        std::vector<size_t> choice(cells.size());
        for (std::uint64_t t = 0; t < opt.sample_count; ++t) {
            for (size_t k = 0; k < cells.size(); ++k)
                choice[k] = static_cast<size_t>(rng.below(cells[k].cands.size()));
            ThresholdMechanism mech = assemble(choice);
            // Repair collisions instead of rejecting: keep the lowest-index
            // winner of each base vector and silence the rest.
            for (int j = 0; j < s.m; ++j) {
                bool seen = false;
                for (int i = 0; i < s.n; ++i) {
                    Profile prof = profile_without(s.base_vectors[j], i);
                    ExtRat t2 = mech.threshold(i, prof);
                    if (t2.is_inf || s.base_vectors[j][i] < t2.value) continue;
                    if (seen) mech.thresholds[i].erase(prof);
                    seen = true;
                }
            }
            scan.evaluate(std::string(), mech, true);
            if (!rep.entries.empty() && rep.entries.back().label.empty() &&
                (!rep.entries.back().agreement_ok || !rep.entries.back().formula_ok))
                rep.entries.back().label = "sample " + std::to_string(t);
        }
    }

    rep.pass = (rep.agreement_failures == 0 && rep.formula_failures == 0);
    rep.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

// ---------------------------------------------------------------------------
// corruption_curve
// ---------------------------------------------------------------------------

std::vector<CurvePoint> corruption_curve(const Embedding& emb,
                                         const std::vector<Rat>& fractions,
                                         std::uint64_t seed) {
    const MDivisibleSet& s = emb.set;
    for (const Rat& f : fractions)
        if (f < 0 || f > 1) fail_arg("corruption_curve: fraction outside [0, 1]");

    auto [ref_mech, ref_fees] = reference_mechanism_almost_linear(emb);
    Rat rev_ref = interim_revenue(ref_mech, ref_fees, emb.distribution);

    std::vector<std::pair<int, int>> pairs;  // (round, player)
    for (int j = 0; j < s.m; ++j)
        for (int i : s.active_sets[j]) pairs.emplace_back(j, i);
    SplitMix64 rng(seed);
    for (size_t k = pairs.size(); k > 1; --k)
        std::swap(pairs[k - 1], pairs[rng.below(k)]);

    std::vector<CurvePoint> curve;
    for (const Rat& f : fractions) {
        Int cut = ceil_rat(Rat(f * static_cast<long>(pairs.size())));
        long count = cut.get_si();
        ThresholdMechanism mech = ref_mech;
        for (long k = 0; k < count; ++k) {
            auto [j, i] = pairs[static_cast<size_t>(k)];
            mech.thresholds[i].erase(profile_without(s.base_vectors[j], i));
        }
        FeeOptimum fees = embedded_fee_optimum(mech, emb);
        Rat revenue = Rat(expost_revenue(mech, emb.distribution) + fees.total);
        CurvePoint p;
        p.fraction = f;
        p.x = agreement_ratio(mech, emb.set).x;
        p.ratio = Rat(revenue / rev_ref);
        p.bound = std::min(Rat(emb.params.c_S + p.x), Rat(1));
        curve.push_back(std::move(p));
    }
    return curve;
}

// ---------------------------------------------------------------------------
// allocation strings
// ---------------------------------------------------------------------------

namespace {

std::vector<int> instance_order(const JointDistribution& d, StringOrder order) {
    std::vector<int> idx(d.support.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto argmax = [&](int t) {
        const Instance& v = d.support[t].values;
        int best = 0;
        for (int i = 1; i < d.n; ++i)
            if (v[i] > v[best]) best = i;
        return best;
    };
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (order == StringOrder::CM) {
            int ma = argmax(a), mb = argmax(b);
            if (ma != mb) return ma < mb;
        }
        return lex_less(d.support[a].values, d.support[b].values);
    });
    return idx;
}

}  // namespace

std::string allocation_string(const JointDistribution& d,
                              const AllocationPlan& plan, StringOrder order) {
    std::vector<int> idx = instance_order(d, order);
    std::vector<std::string> tokens;
    for (int t : idx) {
        auto it = plan.find(d.support[t].values);
        if (it == plan.end())
            fail_arg("allocation_string: plan does not cover the support");
        if (it->second && (*it->second < 0 || *it->second >= d.n))
            fail_arg("allocation_string: winner out of range");
        tokens.push_back(std::to_string(it->second ? *it->second + 1 : 0));
    }
    std::string out;
    for (size_t k = 0; k < tokens.size(); ++k) {
        if (d.n > 9 && k > 0) out += ',';
        out += tokens[k];
    }
    return out;
}

AllocationPlan decode_allocation_string(const JointDistribution& d,
                                        const std::string& text,
                                        StringOrder order) {
    std::vector<int> winners;
    if (d.n <= 9) {
        for (char ch : text) {
            if (ch < '0' || ch > '9')
                fail_arg("decode_allocation_string: unexpected character");
            winners.push_back(ch - '0');
        }
    } else {
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ','))
            winners.push_back(std::stoi(tok));
    }
    if (winners.size() != d.support.size())
        fail_arg("decode_allocation_string: token count differs from support size");
    AllocationPlan plan;
    std::vector<int> idx = instance_order(d, order);
    for (size_t k = 0; k < idx.size(); ++k) {
        int w = winners[k];
        if (w < 0 || w > d.n)
            fail_arg("decode_allocation_string: winner out of range");
        plan[d.support[idx[k]].values] =
            w == 0 ? std::optional<int>() : std::optional<int>(w - 1);
    }
    return plan;
}

// ---------------------------------------------------------------------------
// kc_inequality
// ---------------------------------------------------------------------------

KCResult kc_inequality(long long k, long long r, long long g, long long n,
                       long long t, const Rat& x) {
    if (k < 0 || r < 0 || g < 0 || g > r || n < 1 || t < 0)
        fail_arg("kc_inequality: arguments out of range");
    if (x < 0 || x > 1) fail_arg("kc_inequality: x outside [0, 1]");

    Int choose_rg = binomial(Int(static_cast<long>(r)), Int(static_cast<long>(g)));
    ensure(choose_rg > 0, "binomial positive for g <= r");
    Int fx = floor_rat(Rat(x * static_cast<long>(g)));
    KCResult res;
    res.lhs = Rat(Int(static_cast<long>(k))) / Rat(choose_rg);
    Int rhs = int_pow(Int(static_cast<long>(n)), static_cast<unsigned long>(t));
    rhs *= binomial(Int(static_cast<long>(g)), fx);
    rhs *= int_pow(Int(static_cast<long>(n)), fx.get_ui());
    res.rhs = Rat(rhs);
    res.holds = res.lhs > res.rhs;
    return res;
}

}  // namespace corrigid
