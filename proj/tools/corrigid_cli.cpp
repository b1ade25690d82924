// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
//
// corrigid: generate allocation sets, embed them into correlated priors,
// and audit mechanisms against the rigidity ceilings.
//
// Exit codes: 0 success, 1 failed verdict (rigidity FAIL, check FAIL,
// cm on a rank-deficient prior), 2 usage or input error. Errors print a
// one-line JSON object on stderr so pipelines can parse them.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrigid/embedding.hpp"
#include "corrigid/generators.hpp"
#include "corrigid/json_io.hpp"
#include "corrigid/mechanism.hpp"
#include "corrigid/verify.hpp"

namespace {

using corrigid::ordered_json;
using corrigid::Rat;

Rat parse_value(const std::string& text, const std::string& flag) {
    try {
        return corrigid::parse_rational(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(flag + ": " + e.what());
    }
}

std::vector<Rat> parse_value_list(const std::string& text, const std::string& flag) {
    std::vector<Rat> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(parse_value(tok, flag));
    if (out.empty()) throw std::invalid_argument(flag + ": empty list");
    return out;
}

std::vector<std::vector<int>> parse_pattern(const std::string& text) {
    std::vector<std::vector<int>> rounds;
    std::stringstream ss(text);
    std::string round;
    while (std::getline(ss, round, ';')) {
        std::vector<int> players;
        std::stringstream rs(round);
        std::string tok;
        while (std::getline(rs, tok, ',')) {
            size_t used = 0;
            players.push_back(std::stoi(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument("--pattern: bad player index '" + tok + "'");
        }
        rounds.push_back(std::move(players));
    }
    if (rounds.empty()) throw std::invalid_argument("--pattern: empty pattern");
    return rounds;
}

ordered_json input_stamp(const std::string& path) {
    ordered_json j;
    j["path"] = path;
    j["sha256"] = corrigid::sha256_file(path);
    return j;
}

ordered_json load(const std::string& path) {
    return corrigid::parse_json_text(corrigid::read_text_file(path), path);
}

void emit(const ordered_json& j, std::ostream& os = std::cout) {
    os << j.dump(2) << "\n";
}

void write_artifact(const std::string& path, const ordered_json& j) {
    corrigid::write_text_file(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string method;
    int n = 0, m = 0, k = 0;
    std::string eps, pattern, out;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int run_gen(const GenArgs& a) {
    corrigid::MDivisibleSet set;
    bool randomized = false;
    if (a.method == "rhv") {
        if (!a.seed_given) throw std::invalid_argument("gen rhv: --seed is required");
        set = corrigid::gen_random_high_values(a.n, a.m, a.seed);
        randomized = true;
    } else if (a.method == "geo") {
        if (!a.seed_given) throw std::invalid_argument("gen geo: --seed is required");
        set = corrigid::gen_geometric(a.n, a.m, a.seed);
        randomized = true;
    } else if (a.method == "kexcluded") {
        if (a.k <= 0) throw std::invalid_argument("gen kexcluded: --k is required");
        if (a.eps.empty()) throw std::invalid_argument("gen kexcluded: --eps is required");
        set = corrigid::gen_k_excluded(a.n, a.k, a.m, parse_value(a.eps, "--eps"));
    } else if (a.method == "family") {
        if (!a.seed_given) throw std::invalid_argument("gen family: --seed is required");
        if (a.pattern.empty()) throw std::invalid_argument("gen family: --pattern is required");
        set = corrigid::gen_family_member(a.n, a.m, parse_pattern(a.pattern), a.seed);
        randomized = true;
    } else {
        throw std::invalid_argument("gen: unknown --method '" + a.method + "'");
    }

    ordered_json j;
    j["version"] = corrigid::library_version();
    j["method"] = a.method;
    if (randomized) j["seed"] = a.seed;
    if (a.method == "kexcluded") {
        j["k"] = a.k;
        j["eps"] = corrigid::format_rational(parse_value(a.eps, "--eps"));
    }
    ordered_json body = corrigid::set_to_json(set);
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
    write_artifact(a.out, j);
    return 0;
}

int run_check(const std::string& kind, const std::vector<std::string>& files,
              const std::string& dist_path) {
    std::optional<corrigid::JointDistribution> against;
    if (!dist_path.empty())
        against = corrigid::distribution_from_json(load(dist_path));

    ordered_json checks = ordered_json::array();
    bool all_ok = true;
    for (const std::string& path : files) {
        std::vector<std::string> errors;
        ordered_json doc = load(path);
        if (kind == "dist") {
            errors = corrigid::validate_distribution(
                corrigid::distribution_from_json(doc));
        } else if (kind == "set") {
            errors = corrigid::validate_set(corrigid::set_from_json(doc));
        } else if (kind == "mech") {
            auto [mech, fees] = corrigid::mechanism_from_json(doc);
            if (against) {
                errors = corrigid::check_feasible(mech, *against);
                auto ir = corrigid::check_interim_ir(mech, fees, *against);
                errors.insert(errors.end(), ir.begin(), ir.end());
            }
        } else {
            throw std::invalid_argument("check: kind must be dist, set, or mech");
        }
        ordered_json row;
        row["path"] = path;
        row["kind"] = kind;
        row["ok"] = errors.empty();
        row["errors"] = errors;
        checks.push_back(std::move(row));
        all_ok = all_ok && errors.empty();
    }
    ordered_json j;
    j["version"] = corrigid::library_version();
    j["checks"] = std::move(checks);
    emit(j);
    return all_ok ? 0 : 1;
}

int run_rigidity(const std::string& input, const std::string& mode,
                 std::uint64_t count, std::uint64_t seed,
                 const std::string& slack, std::uint64_t cap,
                 const std::string& out) {
    corrigid::Embedding emb = corrigid::embedding_from_json(load(input));
    corrigid::RigidityOptions opt;
    opt.sampled = (mode == "sampled");
    opt.sample_count = count;
    opt.seed = seed;
    opt.full_cap = cap;
    if (!slack.empty()) opt.slack = parse_value(slack, "--slack");
    corrigid::RigidityReport rep = corrigid::rigidity_check(emb, opt);

    ordered_json j;
    j["version"] = corrigid::library_version();
    j["input"] = input_stamp(input);
    ordered_json body = corrigid::report_to_json(rep);
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
    write_artifact(out, j);
    return rep.pass ? 0 : 1;
}

int run_curve(const std::string& input, const std::string& fractions,
              std::uint64_t seed, const std::string& out) {
    corrigid::Embedding emb = corrigid::embedding_from_json(load(input));
    std::vector<Rat> fs = parse_value_list(fractions, "--fractions");
    std::vector<corrigid::CurvePoint> points =
        corrigid::corruption_curve(emb, fs, seed);
    std::ostringstream meta;
    meta << corrigid::library_version() << " seed=" << seed
         << " input_sha256=" << corrigid::sha256_file(input);
    corrigid::write_text_file(out, corrigid::curve_to_csv(points, {meta.str()}));
    return 0;
}

int run_bruteforce(const std::string& input, const std::string& ir, int topk,
                   std::uint64_t cap, std::uint64_t seed, std::uint64_t count) {
    corrigid::JointDistribution d = corrigid::distribution_from_json(load(input));
    ordered_json j;
    j["version"] = corrigid::library_version();
    j["input"] = input_stamp(input);
    if (ir == "expost") {
        corrigid::ExpostOptResult res =
            corrigid::brute_force_expost_opt(d, topk, cap);
        j["restriction"] = topk > 0 ? "top-" + std::to_string(topk) : "none";
        j["revenue"] = corrigid::format_rational(res.revenue);
        j["enumerated"] = res.enumerated;
        j["mechanism"] =
            corrigid::mechanism_to_json(res.mech, corrigid::FeeSchedule(d.n));
    } else if (ir == "interim") {
        if (topk > 0)
            throw std::invalid_argument("bruteforce: --topk applies to --ir expost");
        corrigid::InterimOptResult res =
            corrigid::brute_force_interim_opt(d, cap, seed, count);
        j["revenue"] = corrigid::format_rational(res.revenue);
        j["exhaustive"] = res.exhaustive;
        if (!res.exhaustive) j["seed"] = seed;
        j["evaluated"] = res.evaluated;
        j["mechanism"] = corrigid::mechanism_to_json(res.mech, res.fees);
    } else {
        throw std::invalid_argument("bruteforce: --ir must be expost or interim");
    }
    emit(j);
    return 0;
}

int run_lookahead(const std::string& input) {
    corrigid::JointDistribution d = corrigid::distribution_from_json(load(input));
    corrigid::ThresholdMechanism mech = corrigid::lookahead(d);
    ordered_json j;
    j["version"] = corrigid::library_version();
    j["input"] = input_stamp(input);
    j["revenue"] = corrigid::format_rational(corrigid::expost_revenue(mech, d));
    j["mechanism"] = corrigid::mechanism_to_json(mech, corrigid::FeeSchedule(d.n));
    emit(j);
    return 0;
}

int run_cm(const std::string& input) {
    corrigid::JointDistribution d = corrigid::distribution_from_json(load(input));
    corrigid::CMResult res = corrigid::cm_fees(d);
    ordered_json j;
    j["version"] = corrigid::library_version();
    j["input"] = input_stamp(input);
    j["ok"] = res.ok;
    if (!res.ok) {
        j["error"] = res.error;
        emit(j);
        return 1;
    }
    j["revenue"] = corrigid::format_rational(
        corrigid::interim_revenue(res.mech, res.fees, d));
    j["welfare"] = corrigid::format_rational(corrigid::expected_welfare(d));
    j["mechanism"] = corrigid::mechanism_to_json(res.mech, res.fees);
    emit(j);
    return 0;
}

int run_encode(const std::string& dist_path, const std::string& alloc_path,
               const std::string& order) {
    corrigid::JointDistribution d = corrigid::distribution_from_json(load(dist_path));
    corrigid::AllocationPlan plan = corrigid::plan_from_json(load(alloc_path));
    corrigid::StringOrder ord = order == "lex" ? corrigid::StringOrder::Lex
                                               : corrigid::StringOrder::CM;
    std::cout << corrigid::allocation_string(d, plan, ord) << "\n";
    return 0;
}

int run_kc(long long k, long long r, long long g, long long n, long long t,
           const std::string& x) {
    corrigid::KCResult res = corrigid::kc_inequality(k, r, g, n, t,
                                                     parse_value(x, "--x"));
    ordered_json j;
    j["holds"] = res.holds;
    j["lhs"] = corrigid::format_rational(res.lhs);
    j["rhs"] = corrigid::format_rational(res.rhs);
    emit(j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rigid correlated-prior auction toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* c_gen = app.add_subcommand("gen", "generate an allocation set");
    c_gen->add_option("--method", gen.method, "rhv | geo | kexcluded | family")
        ->required();
    c_gen->add_option("--n", gen.n, "players")->required();
    c_gen->add_option("--m", gen.m, "rounds")->required();
    c_gen->add_option("--k", gen.k, "excluded players (kexcluded)");
    c_gen->add_option("--eps", gen.eps, "margin parameter (kexcluded)");
    c_gen->add_option("--pattern", gen.pattern,
                      "active sets per round, e.g. 1,2;2,3 (family)");
    c_gen->add_option("--seed", gen.seed, "64-bit seed (randomized methods)")
        ->each([&gen](const std::string&) { gen.seed_given = true; });
    c_gen->add_option("-o,--out", gen.out, "output set JSON")->required();

    std::string params_in;
    CLI::App* c_params = app.add_subcommand("params", "derived set parameters");
    c_params->add_option("set", params_in, "set JSON")->required();

    std::string embed_in, embed_out;
    CLI::App* c_embed = app.add_subcommand("embed", "build the correlated prior");
    c_embed->add_option("set", embed_in, "set JSON")->required();
    c_embed->add_option("-o,--out", embed_out, "output bundle JSON")->required();

    std::string check_kind, check_dist;
    std::vector<std::string> check_files;
    CLI::App* c_check = app.add_subcommand("check", "validate artifacts");
    c_check->add_option("kind", check_kind, "dist | set | mech")->required();
    c_check->add_option("files", check_files, "files to validate")->required();
    c_check->add_option("--dist", check_dist,
                        "distribution context for mech checks");

    std::string rig_in, rig_mode = "full", rig_slack, rig_out;
    std::uint64_t rig_count = 10'000, rig_seed = 1, rig_cap = 2'000'000;
    CLI::App* c_rig = app.add_subcommand("rigidity", "audit mechanisms on a bundle");
    c_rig->add_option("embedding", rig_in, "embedding bundle JSON")->required();
    c_rig->add_option("--mode", rig_mode, "full | sampled")
        ->check(CLI::IsMember({"full", "sampled"}));
    c_rig->add_option("--count", rig_count, "sample count (sampled mode)");
    c_rig->add_option("--seed", rig_seed, "sample seed (sampled mode)");
    c_rig->add_option("--slack", rig_slack, "tolerance override, rational");
    c_rig->add_option("--cap", rig_cap, "full-mode enumeration cap");
    c_rig->add_option("-o,--out", rig_out, "output report JSON")->required();

    std::string curve_in, curve_fracs, curve_out;
    std::uint64_t curve_seed = 1;
    CLI::App* c_curve = app.add_subcommand("curve", "corruption revenue curve");
    c_curve->add_option("embedding", curve_in, "embedding bundle JSON")->required();
    c_curve->add_option("--fractions", curve_fracs, "comma-separated fractions")
        ->required();
    c_curve->add_option("--seed", curve_seed, "corruption order seed");
    c_curve->add_option("-o,--out", curve_out, "output CSV")->required();

    std::string bf_in, bf_ir = "expost";
    int bf_topk = 0;
    std::uint64_t bf_cap = 2'000'000, bf_seed = 1, bf_count = 4096;
    CLI::App* c_bf = app.add_subcommand("bruteforce", "optimal mechanism search");
    c_bf->add_option("dist", bf_in, "distribution JSON")->required();
    c_bf->add_option("--ir", bf_ir, "expost | interim");
    c_bf->add_option("--topk", bf_topk, "restrict winners to the top k bids");
    c_bf->add_option("--cap", bf_cap, "enumeration cap");
    c_bf->add_option("--seed", bf_seed, "sampling seed past the cap (interim)");
    c_bf->add_option("--count", bf_count, "sample count past the cap (interim)");

    std::string la_in;
    CLI::App* c_la = app.add_subcommand("lookahead", "highest-bidder posted prices");
    c_la->add_option("dist", la_in, "distribution JSON")->required();

    std::string cm_in;
    CLI::App* c_cm = app.add_subcommand("cm", "full-surplus fee construction");
    c_cm->add_option("dist", cm_in, "distribution JSON")->required();

    std::string enc_dist, enc_alloc, enc_order = "cm";
    CLI::App* c_enc = app.add_subcommand("encode", "allocation plan to string");
    c_enc->add_option("dist", enc_dist, "distribution JSON")->required();
    c_enc->add_option("alloc", enc_alloc, "allocation plan JSON")->required();
    c_enc->add_option("--order", enc_order, "cm | lex")
        ->check(CLI::IsMember({"cm", "lex"}));

    long long kc_k = 0, kc_r = 0, kc_g = 0, kc_n = 0, kc_t = 0;
    std::string kc_x;
    CLI::App* c_kc = app.add_subcommand("kc-check", "counting inequality");
    c_kc->add_option("--k", kc_k)->required();
    c_kc->add_option("--r", kc_r)->required();
    c_kc->add_option("--g", kc_g)->required();
    c_kc->add_option("--n", kc_n)->required();
    c_kc->add_option("--t", kc_t)->required();
    c_kc->add_option("--x", kc_x, "rational in [0,1]")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_gen) return run_gen(gen);
        if (*c_params) {
            ordered_json j = corrigid::params_to_json(
                corrigid::parameters(corrigid::set_from_json(load(params_in))));
            emit(j);
            return 0;
        }
        if (*c_embed) {
            corrigid::Embedding emb = corrigid::build_embedding(
                corrigid::set_from_json(load(embed_in)));
            ordered_json j;
            j["version"] = corrigid::library_version();
            j["input"] = input_stamp(embed_in);
            ordered_json body = corrigid::embedding_to_json(emb);
            for (auto& [key, value] : body.items()) j[key] = std::move(value);
            write_artifact(embed_out, j);
            return 0;
        }
        if (*c_check) return run_check(check_kind, check_files, check_dist);
        if (*c_rig)
            return run_rigidity(rig_in, rig_mode, rig_count, rig_seed, rig_slack,
                                rig_cap, rig_out);
        if (*c_curve) return run_curve(curve_in, curve_fracs, curve_seed, curve_out);
        if (*c_bf)
            return run_bruteforce(bf_in, bf_ir, bf_topk, bf_cap, bf_seed, bf_count);
        if (*c_la) return run_lookahead(la_in);
        if (*c_cm) return run_cm(cm_in);
        if (*c_enc) return run_encode(enc_dist, enc_alloc, enc_order);
        if (*c_kc) return run_kc(kc_k, kc_r, kc_g, kc_n, kc_t, kc_x);
    } catch (const std::invalid_argument& e) {
        ordered_json err;
        err["error"] = e.what();
        emit(err, std::cerr);
        return 2;
    } catch (const std::exception& e) {
        ordered_json err;
        err["error"] = e.what();
        emit(err, std::cerr);
        return 2;
    }
    return 2;
}
