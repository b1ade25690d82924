// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0

#include "corrigid/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace corrigid {

namespace {

[[noreturn]] void bad(const std::string& ctx, const std::string& msg) {
    throw std::invalid_argument(ctx + ": " + msg);
}

const ordered_json& member(const ordered_json& j, const char* key,
                           const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) bad(ctx, std::string("missing \"") + key + "\"");
    return *it;
}

long get_long(const ordered_json& j, const char* key, const std::string& ctx) {
    const ordered_json& v = member(j, key, ctx);
    if (!v.is_number_integer()) bad(ctx, std::string("\"") + key + "\" must be an integer");
    return v.get<long>();
}

Rat get_rat(const ordered_json& v, const std::string& ctx) {
    if (!v.is_string()) bad(ctx, "rational values must be \"p/q\" strings");
    try {
        return parse_rational(v.get<std::string>());
    } catch (const std::exception& e) {
        bad(ctx, e.what());
    }
}

ExtRat get_ext(const ordered_json& v, const std::string& ctx) {
    if (!v.is_string()) bad(ctx, "threshold values must be \"p/q\" or \"inf\"");
    try {
        return parse_ext(v.get<std::string>());
    } catch (const std::exception& e) {
        bad(ctx, e.what());
    }
}

ordered_json rat_array(const std::vector<Rat>& xs) {
    ordered_json out = ordered_json::array();
    for (const Rat& x : xs) out.push_back(format_rational(x));
    return out;
}

std::vector<Rat> rats_from(const ordered_json& v, const std::string& ctx) {
    if (!v.is_array()) bad(ctx, "expected an array of rationals");
    std::vector<Rat> out;
    out.reserve(v.size());
    for (const ordered_json& x : v) out.push_back(get_rat(x, ctx));
    return out;
}

const char* kind_name(InstanceTag::Kind k) {
    switch (k) {
        case InstanceTag::Kind::Ladder: return "ladder";
        case InstanceTag::Kind::Base: return "base";
        case InstanceTag::Kind::Deviation: return "deviation";
        case InstanceTag::Kind::Guard: return "guard";
        case InstanceTag::Kind::GuardPair: return "guard-pair";
        case InstanceTag::Kind::Filler: return "filler";
    }
    return "filler";
}

}  // namespace

#ifndef CORRIGID_VERSION
#define CORRIGID_VERSION "0.0.0-dev"
#endif

std::string library_version() { return std::string("corrigid ") + CORRIGID_VERSION; }

ordered_json distribution_to_json(const JointDistribution& d) {
    ordered_json j;
    j["n"] = d.n;
    ordered_json support = ordered_json::array();
    for (const WeightedInstance& wi : d.support) {
        ordered_json row;
        row["values"] = rat_array(wi.values);
        row["prob"] = format_rational(wi.prob);
        support.push_back(std::move(row));
    }
    j["support"] = std::move(support);
    return j;
}

JointDistribution distribution_from_json(const ordered_json& j) {
    const std::string ctx = "distribution";
    JointDistribution d;
    d.n = static_cast<int>(get_long(j, "n", ctx));
    const ordered_json& support = member(j, "support", ctx);
    if (!support.is_array()) bad(ctx, "\"support\" must be an array");
    for (const ordered_json& row : support) {
        WeightedInstance wi;
        wi.values = rats_from(member(row, "values", ctx), ctx + ".values");
        if (static_cast<int>(wi.values.size()) != d.n)
            bad(ctx, "instance length differs from n");
        wi.prob = get_rat(member(row, "prob", ctx), ctx + ".prob");
        d.support.push_back(std::move(wi));
    }
    return d;
}

ordered_json set_to_json(const MDivisibleSet& s) {
    ordered_json j;
    j["n"] = s.n;
    j["m"] = s.m;
    ordered_json bases = ordered_json::array();
    for (const Instance& b : s.base_vectors) bases.push_back(rat_array(b));
    j["base_vectors"] = std::move(bases);
    j["active_sets"] = s.active_sets;
    ordered_json th = ordered_json::array();
    for (const auto& [key, u] : s.thresholds) {
        ordered_json row;
        row["j"] = key.first;
        row["i"] = key.second;
        row["u"] = format_rational(u);
        th.push_back(std::move(row));
    }
    j["thresholds"] = std::move(th);
    return j;
}

MDivisibleSet set_from_json(const ordered_json& j) {
    const std::string ctx = "set";
    MDivisibleSet s;
    s.n = static_cast<int>(get_long(j, "n", ctx));
    s.m = static_cast<int>(get_long(j, "m", ctx));
    const ordered_json& bases = member(j, "base_vectors", ctx);
    if (!bases.is_array()) bad(ctx, "\"base_vectors\" must be an array");
    for (const ordered_json& b : bases) {
        s.base_vectors.push_back(rats_from(b, ctx + ".base_vectors"));
        if (static_cast<int>(s.base_vectors.back().size()) != s.n)
            bad(ctx, "base vector length differs from n");
    }
    const ordered_json& act = member(j, "active_sets", ctx);
    if (!act.is_array()) bad(ctx, "\"active_sets\" must be an array");
    for (const ordered_json& a : act) {
        if (!a.is_array()) bad(ctx, "each active set must be an array");
        std::vector<int> players;
        for (const ordered_json& p : a) {
            if (!p.is_number_integer()) bad(ctx, "active players must be integers");
            players.push_back(p.get<int>());
        }
        s.active_sets.push_back(std::move(players));
    }
    const ordered_json& th = member(j, "thresholds", ctx);
    if (!th.is_array()) bad(ctx, "\"thresholds\" must be an array");
    for (const ordered_json& row : th) {
        int round = static_cast<int>(get_long(row, "j", ctx + ".thresholds"));
        int player = static_cast<int>(get_long(row, "i", ctx + ".thresholds"));
        Rat u = get_rat(member(row, "u", ctx + ".thresholds"), ctx + ".thresholds.u");
        s.thresholds[{round, player}] = std::move(u);
    }
    return s;
}

ordered_json mechanism_to_json(const ThresholdMechanism& mech,
                               const FeeSchedule& fees) {
    ordered_json j;
    j["n"] = mech.n;
    ordered_json th = ordered_json::array();
    for (int i = 0; i < mech.n; ++i) {
        for (const auto& [prof, t] : mech.thresholds[i]) {
            ordered_json row;
            row["i"] = i;
            row["profile"] = rat_array(prof);
            row["t"] = format_ext(t);
            th.push_back(std::move(row));
        }
    }
    j["thresholds"] = std::move(th);
    ordered_json fee = ordered_json::array();
    for (size_t i = 0; i < fees.fees.size(); ++i) {
        for (const auto& [prof, c] : fees.fees[i]) {
            ordered_json row;
            row["i"] = static_cast<int>(i);
            row["profile"] = rat_array(prof);
            row["c"] = format_rational(c);
            fee.push_back(std::move(row));
        }
    }
    j["fees"] = std::move(fee);
    return j;
}

std::pair<ThresholdMechanism, FeeSchedule> mechanism_from_json(
    const ordered_json& j) {
    const std::string ctx = "mechanism";
    const ordered_json& th = member(j, "thresholds", ctx);
    const ordered_json& fee = member(j, "fees", ctx);
    if (!th.is_array() || !fee.is_array())
        bad(ctx, "\"thresholds\" and \"fees\" must be arrays");

    int n = -1;
    if (j.contains("n")) n = static_cast<int>(get_long(j, "n", ctx));
    auto learn_n = [&](size_t profile_len) {
        int implied = static_cast<int>(profile_len) + 1;
        if (n < 0) n = implied;
        if (n != implied) bad(ctx, "inconsistent profile lengths");
    };

    std::vector<std::tuple<int, Profile, ExtRat>> parsed_t;
    for (const ordered_json& row : th) {
        int i = static_cast<int>(get_long(row, "i", ctx + ".thresholds"));
        Profile prof = rats_from(member(row, "profile", ctx), ctx + ".profile");
        learn_n(prof.size());
        ExtRat t = get_ext(member(row, "t", ctx), ctx + ".t");
        parsed_t.emplace_back(i, std::move(prof), std::move(t));
    }
    std::vector<std::tuple<int, Profile, Rat>> parsed_c;
    for (const ordered_json& row : fee) {
        int i = static_cast<int>(get_long(row, "i", ctx + ".fees"));
        Profile prof = rats_from(member(row, "profile", ctx), ctx + ".profile");
        learn_n(prof.size());
        Rat c = get_rat(member(row, "c", ctx), ctx + ".c");
        parsed_c.emplace_back(i, std::move(prof), std::move(c));
    }
    if (n < 0) bad(ctx, "cannot infer player count from an empty mechanism");

    ThresholdMechanism mech(n);
    FeeSchedule fees(n);
    for (auto& [i, prof, t] : parsed_t) {
        if (i < 0 || i >= n) bad(ctx, "player index out of range");
        if (!t.is_inf) mech.set(i, std::move(prof), std::move(t));
    }
    for (auto& [i, prof, c] : parsed_c) {
        if (i < 0 || i >= n) bad(ctx, "player index out of range");
        fees.set(i, std::move(prof), std::move(c));
    }
    return {std::move(mech), std::move(fees)};
}

ordered_json params_to_json(const SetParameters& p) {
    ordered_json j;
    j["active_players"] = p.active_players;
    j["a"] = p.a;
    j["size"] = p.size;
    ordered_json values = ordered_json::array();
    for (const auto& [i, ys] : p.sorted_values) {
        ordered_json row;
        row["i"] = i;
        row["values"] = rat_array(ys);
        values.push_back(std::move(row));
    }
    j["sorted_values"] = std::move(values);
    auto per_player = [](const std::map<int, Rat>& m) {
        ordered_json arr = ordered_json::array();
        for (const auto& [i, x] : m) {
            ordered_json row;
            row["i"] = i;
            row["value"] = format_rational(x);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    j["d"] = per_player(p.d);
    j["g"] = per_player(p.g);
    ordered_json sigma = ordered_json::array();
    for (const auto& [key, rank] : p.sigma) {
        ordered_json row;
        row["i"] = key.first;
        row["j"] = key.second;
        row["rank"] = rank;
        sigma.push_back(std::move(row));
    }
    j["sigma"] = std::move(sigma);
    ordered_json alpha = ordered_json::array();
    for (const auto& [round, x] : p.alpha) {
        ordered_json row;
        row["j"] = round;
        row["value"] = format_rational(x);
        alpha.push_back(std::move(row));
    }
    j["alpha"] = std::move(alpha);
    j["g_avg"] = format_rational(p.g_avg);
    j["alpha_avg"] = format_rational(p.alpha_avg);
    j["c_S"] = format_rational(p.c_S);
    return j;
}

ordered_json embedding_to_json(const Embedding& emb) {
    const EmbeddingConstants& c = emb.constants;
    ordered_json j;
    j["set"] = set_to_json(emb.set);

    ordered_json cj;
    cj["delta"] = format_rational(c.delta);
    cj["omega"] = format_rational(c.omega);
    cj["eps_dev"] = format_rational(c.eps_dev);
    cj["eps_win"] = format_rational(c.eps_win);
    cj["mu_hat"] = format_rational(c.mu_hat);
    cj["mu"] = format_rational(c.mu);
    cj["e"] = format_rational(c.e);
    cj["xi"] = format_rational(c.xi);
    cj["filler_mass"] = format_rational(c.filler_mass);
    cj["guard_count"] = c.guard_count;
    auto per_player = [](const std::map<int, Rat>& m) {
        ordered_json arr = ordered_json::array();
        for (const auto& [i, x] : m) {
            ordered_json row;
            row["i"] = i;
            row["value"] = format_rational(x);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    cj["y0"] = per_player(c.y0);
    cj["y_top"] = per_player(c.y_top);
    auto ladder_like = [](const std::map<int, std::vector<Rat>>& m) {
        ordered_json arr = ordered_json::array();
        for (const auto& [i, xs] : m) {
            ordered_json row;
            row["i"] = i;
            row["values"] = rat_array(xs);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    cj["ladder"] = ladder_like(c.ladder);
    cj["q"] = ladder_like(c.q);
    cj["gapfull"] = rat_array(c.gapfull);
    cj["gap"] = rat_array(c.gap);
    cj["round_mass"] = rat_array(c.round_mass);
    cj["alpha_budget"] = rat_array(c.alpha_budget);
    auto per_pair = [](const std::map<std::pair<int, int>, Rat>& m) {
        ordered_json arr = ordered_json::array();
        for (const auto& [key, x] : m) {
            ordered_json row;
            row["j"] = key.first;
            row["i"] = key.second;
            row["value"] = format_rational(x);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    cj["u_bar"] = per_pair(c.u_bar);
    cj["u_prime"] = per_pair(c.u_prime);
    cj["rho"] = per_player(c.rho);
    cj["eta_single"] = per_player(c.eta_single);
    auto per_triple = [](const std::map<std::tuple<int, int, int>, Rat>& m) {
        ordered_json arr = ordered_json::array();
        for (const auto& [key, x] : m) {
            ordered_json row;
            row["j"] = std::get<0>(key);
            row["i"] = std::get<1>(key);
            row["k"] = std::get<2>(key);
            row["value"] = format_rational(x);
            arr.push_back(std::move(row));
        }
        return arr;
    };
    cj["eta_pair"] = per_triple(c.eta_pair);
    cj["eta_pair_prime"] = per_triple(c.eta_pair_prime);
    cj["filler_values"] = rat_array(c.filler_values);
    j["constants"] = std::move(cj);

    j["distribution"] = distribution_to_json(emb.distribution);

    ordered_json tags = ordered_json::array();
    for (const auto& [inst, tag] : emb.tags) {
        ordered_json row;
        row["values"] = rat_array(inst);
        row["kind"] = kind_name(tag.kind);
        row["player"] = tag.player;
        row["round"] = tag.round;
        row["partner"] = tag.partner;
        row["rank"] = tag.rank;
        row["at_threshold"] = tag.at_threshold;
        tags.push_back(std::move(row));
    }
    j["tags"] = std::move(tags);
    return j;
}

Embedding embedding_from_json(const ordered_json& j) {
    const std::string ctx = "embedding";
    MDivisibleSet s = set_from_json(member(j, "set", ctx));
    Embedding emb = build_embedding(s);

    // The remaining sections are derived data; trust nothing, rebuild and
    // compare. A mismatch means the bundle was edited or written by a build
    // with a different schedule.
    JointDistribution stored =
        distribution_from_json(member(j, "distribution", ctx));
    bool same = stored.n == emb.distribution.n &&
                stored.support.size() == emb.distribution.support.size();
    for (size_t k = 0; same && k < stored.support.size(); ++k) {
        same = stored.support[k].values == emb.distribution.support[k].values &&
               stored.support[k].prob == emb.distribution.support[k].prob;
    }
    if (!same) bad(ctx, "stored distribution disagrees with its set; re-run embed");
    return emb;
}

ordered_json report_to_json(const RigidityReport& rep) {
    ordered_json j;
    j["pass"] = rep.pass;
    j["mode"] = rep.mode;
    if (rep.mode == "sampled") j["seed"] = rep.seed;
    j["rev_ref"] = format_rational(rep.rev_ref);
    j["c_S"] = format_rational(rep.c_S);
    j["slack"] = format_rational(rep.slack);
    j["evaluated"] = rep.evaluated;
    j["infeasible_skipped"] = rep.infeasible_skipped;
    j["agreement_failures"] = rep.agreement_failures;
    j["formula_failures"] = rep.formula_failures;
    j["within_tolerance"] = rep.tolerance_only;
    j["max_ratio"] = format_rational(rep.max_ratio);
    j["runtime_ms"] = rep.runtime_ms;
    ordered_json entries = ordered_json::array();
    for (const RigidityEntry& e : rep.entries) {
        ordered_json row;
        row["label"] = e.label;
        row["x"] = format_rational(e.x);
        row["revenue"] = format_rational(e.revenue);
        row["agreement_bound"] = format_rational(e.agreement_bound);
        row["formula_bound"] = format_rational(e.formula_bound);
        row["agreement_ok"] = e.agreement_ok;
        row["agreement_strict"] = e.agreement_strict;
        row["formula_ok"] = e.formula_ok;
        row["formula_strict"] = e.formula_strict;
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    j["entries_truncated"] = rep.entries_truncated;
    return j;
}

std::string curve_to_csv(const std::vector<CurvePoint>& points,
                         const std::vector<std::string>& comments) {
    std::ostringstream out;
    for (const std::string& line : comments) out << "# " << line << "\n";
    out << "fraction,x,revenue_ratio,bound\n";
    for (const CurvePoint& p : points) {
        out << format_rational(p.fraction) << ',' << format_rational(p.x) << ','
            << format_rational(p.ratio) << ',' << format_rational(p.bound)
            << "\n";
    }
    return out.str();
}

AllocationPlan plan_from_json(const ordered_json& j) {
    const std::string ctx = "allocation plan";
    if (!j.is_array()) bad(ctx, "expected an array of {values, winner} rows");
    AllocationPlan plan;
    for (const ordered_json& row : j) {
        Instance values = rats_from(member(row, "values", ctx), ctx + ".values");
        const ordered_json& w = member(row, "winner", ctx);
        std::optional<int> winner;
        if (!w.is_null()) {
            if (!w.is_number_integer()) bad(ctx, "\"winner\" must be an integer or null");
            winner = w.get<int>();
        }
        plan[std::move(values)] = winner;
    }
    return plan;
}

ordered_json plan_to_json(const AllocationPlan& plan) {
    ordered_json j = ordered_json::array();
    for (const auto& [values, winner] : plan) {
        ordered_json row;
        row["values"] = rat_array(values);
        if (winner)
            row["winner"] = *winner;
        else
            row["winner"] = nullptr;
        j.push_back(std::move(row));
    }
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed on " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed on " + path);
}

ordered_json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx, md, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        out.push_back(hex[md[k] >> 4]);
        out.push_back(hex[md[k] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    return sha256_hex(read_text_file(path));
}

}  // namespace corrigid
