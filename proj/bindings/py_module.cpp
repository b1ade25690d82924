// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
//
// Python face of the library. Every structured argument and result is a
// JSON string in exactly the artifact formats the CLI reads and writes, so
// the bindings stay a thin shim: no duplicate schema, nothing to drift.
// The pythonic dict layer lives in python/corrigid/__init__.py.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corrigid/distribution.hpp"
#include "corrigid/divisible.hpp"
#include "corrigid/embedding.hpp"
#include "corrigid/generators.hpp"
#include "corrigid/json_io.hpp"
#include "corrigid/mechanism.hpp"
#include "corrigid/rational.hpp"
#include "corrigid/verify.hpp"

namespace py = pybind11;

namespace {

using corrigid::ordered_json;

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

corrigid::MDivisibleSet load_set(const std::string& text) {
    return corrigid::set_from_json(corrigid::parse_json_text(text, "set"));
}

corrigid::JointDistribution load_dist(const std::string& text) {
    return corrigid::distribution_from_json(
        corrigid::parse_json_text(text, "distribution"));
}

corrigid::Embedding load_embedding(const std::string& text) {
    return corrigid::embedding_from_json(
        corrigid::parse_json_text(text, "embedding"));
}

std::pair<corrigid::ThresholdMechanism, corrigid::FeeSchedule> load_mech(
    const std::string& text) {
    return corrigid::mechanism_from_json(
        corrigid::parse_json_text(text, "mechanism"));
}

corrigid::StringOrder order_of(const std::string& name) {
    if (name == "cm") return corrigid::StringOrder::CM;
    if (name == "lex") return corrigid::StringOrder::Lex;
    throw std::invalid_argument("order must be \"cm\" or \"lex\", got \"" +
                                name + "\"");
}

}  // namespace

PYBIND11_MODULE(_corrigid, m) {
    m.doc() =
        "Exact-rational auction toolkit: generators, embeddings, reference "
        "mechanisms and revenue audits. JSON-string calling convention.";

    m.def("version", &corrigid::library_version);

    // Generators. Each returns the set artifact the CLI's `gen` writes.
    m.def(
        "gen_random_high_values",
        [](int n, int mm, std::uint64_t seed) {
            return dump(
                corrigid::set_to_json(corrigid::gen_random_high_values(n, mm, seed)));
        },
        py::arg("n"), py::arg("m"), py::arg("seed"));
    m.def(
        "gen_geometric",
        [](int n, int mm, std::uint64_t seed) {
            return dump(corrigid::set_to_json(corrigid::gen_geometric(n, mm, seed)));
        },
        py::arg("n"), py::arg("m"), py::arg("seed"));
    m.def(
        "gen_k_excluded",
        [](int n, int k, int mm, const std::string& eps) {
            return dump(corrigid::set_to_json(
                corrigid::gen_k_excluded(n, k, mm, corrigid::parse_rational(eps))));
        },
        py::arg("n"), py::arg("k"), py::arg("m"), py::arg("eps"));
    m.def(
        "gen_family_member",
        [](int n, int mm, const std::vector<std::vector<int>>& pattern,
           std::uint64_t seed) {
            return dump(corrigid::set_to_json(
                corrigid::gen_family_member(n, mm, pattern, seed)));
        },
        py::arg("n"), py::arg("m"), py::arg("pattern"), py::arg("seed"));

    // Validation and derived quantities.
    m.def("validate_set", [](const std::string& set_json) {
        return corrigid::validate_set(load_set(set_json));
    });
    m.def("validate_distribution", [](const std::string& dist_json) {
        return corrigid::validate_distribution(load_dist(dist_json));
    });
    m.def("parameters", [](const std::string& set_json) {
        return dump(corrigid::params_to_json(corrigid::parameters(load_set(set_json))));
    });
    m.def("embed", [](const std::string& set_json) {
        return dump(
            corrigid::embedding_to_json(corrigid::build_embedding(load_set(set_json))));
    });

    // Mechanism evaluation against a prior.
    m.def(
        "reference_mechanism",
        [](const std::string& emb_json, bool almost_linear) {
            corrigid::Embedding emb = load_embedding(emb_json);
            auto [mech, fees] = almost_linear
                                    ? corrigid::reference_mechanism_almost_linear(emb)
                                    : corrigid::reference_mechanism(emb);
            return dump(corrigid::mechanism_to_json(mech, fees));
        },
        py::arg("embedding"), py::arg("almost_linear") = false);
    m.def("check_feasible",
          [](const std::string& mech_json, const std::string& dist_json) {
              return corrigid::check_feasible(load_mech(mech_json).first,
                                              load_dist(dist_json));
          });
    m.def("check_interim_ir",
          [](const std::string& mech_json, const std::string& dist_json) {
              auto [mech, fees] = load_mech(mech_json);
              return corrigid::check_interim_ir(mech, fees, load_dist(dist_json));
          });
    m.def("expost_revenue",
          [](const std::string& mech_json, const std::string& dist_json) {
              return corrigid::format_rational(corrigid::expost_revenue(
                  load_mech(mech_json).first, load_dist(dist_json)));
          });
    m.def("interim_revenue",
          [](const std::string& mech_json, const std::string& dist_json) {
              auto [mech, fees] = load_mech(mech_json);
              return corrigid::format_rational(
                  corrigid::interim_revenue(mech, fees, load_dist(dist_json)));
          });
    m.def("expected_welfare", [](const std::string& dist_json) {
        return corrigid::format_rational(corrigid::expected_welfare(load_dist(dist_json)));
    });
    m.def("full_rank", [](const std::string& dist_json) {
        return corrigid::full_rank_check(load_dist(dist_json)).full_rank;
    });

    // Named constructions.
    m.def("lookahead", [](const std::string& dist_json) {
        corrigid::JointDistribution d = load_dist(dist_json);
        return dump(corrigid::mechanism_to_json(corrigid::lookahead(d),
                                                corrigid::FeeSchedule{}));
    });
    m.def("cm_fees", [](const std::string& dist_json) {
        corrigid::JointDistribution d = load_dist(dist_json);
        corrigid::CMResult res = corrigid::cm_fees(d);
        ordered_json j;
        j["ok"] = res.ok;
        if (!res.ok) {
            j["error"] = res.error;
        } else {
            j["mechanism"] = corrigid::mechanism_to_json(res.mech, res.fees);
            j["interim_revenue"] = corrigid::format_rational(
                corrigid::interim_revenue(res.mech, res.fees, d));
            j["welfare"] = corrigid::format_rational(corrigid::expected_welfare(d));
        }
        return dump(j);
    });
    m.def("optimal_fees",
          [](const std::string& mech_json, const std::string& dist_json) {
              auto [mech, fees] = load_mech(mech_json);
              corrigid::FeeOptimum opt =
                  corrigid::optimal_fees(mech, load_dist(dist_json));
              ordered_json j;
              j["total"] = corrigid::format_rational(opt.total);
              j["mechanism"] = corrigid::mechanism_to_json(mech, opt.fees);
              return dump(j);
          });

    // Brute-force baselines.
    m.def(
        "brute_force_expost",
        [](const std::string& dist_json, int top, std::uint64_t cap) {
            corrigid::ExpostOptResult res =
                corrigid::brute_force_expost_opt(load_dist(dist_json), top, cap);
            ordered_json j;
            j["revenue"] = corrigid::format_rational(res.revenue);
            j["enumerated"] = res.enumerated;
            j["mechanism"] =
                corrigid::mechanism_to_json(res.mech, corrigid::FeeSchedule{});
            return dump(j);
        },
        py::arg("distribution"), py::arg("top") = 0,
        py::arg("cap") = std::uint64_t{2'000'000});
    m.def(
        "brute_force_interim",
        [](const std::string& dist_json, std::uint64_t cap, std::uint64_t seed,
           std::uint64_t count) {
            corrigid::InterimOptResult res = corrigid::brute_force_interim_opt(
                load_dist(dist_json), cap, seed, count);
            ordered_json j;
            j["revenue"] = corrigid::format_rational(res.revenue);
            j["exhaustive"] = res.exhaustive;
            j["evaluated"] = res.evaluated;
            j["mechanism"] = corrigid::mechanism_to_json(res.mech, res.fees);
            return dump(j);
        },
        py::arg("distribution"), py::arg("cap") = std::uint64_t{2'000'000},
        py::arg("seed") = std::uint64_t{1},
        py::arg("count") = std::uint64_t{4096});

    // Rigidity audits.
    m.def(
        "rigidity",
        [](const std::string& emb_json, bool sampled, std::uint64_t count,
           std::uint64_t seed, const std::string& slack, std::uint64_t full_cap) {
            corrigid::RigidityOptions opt;
            opt.sampled = sampled;
            opt.sample_count = count;
            opt.seed = seed;
            opt.full_cap = full_cap;
            if (!slack.empty()) opt.slack = corrigid::parse_rational(slack);
            return dump(corrigid::report_to_json(
                corrigid::rigidity_check(load_embedding(emb_json), opt)));
        },
        py::arg("embedding"), py::arg("sampled") = false,
        py::arg("count") = std::uint64_t{10'000}, py::arg("seed") = std::uint64_t{1},
        py::arg("slack") = std::string{},
        py::arg("full_cap") = std::uint64_t{2'000'000});
    m.def(
        "corruption_curve",
        [](const std::string& emb_json, const std::vector<std::string>& fractions,
           std::uint64_t seed) {
            std::vector<corrigid::Rat> fracs;
            fracs.reserve(fractions.size());
            for (const std::string& f : fractions)
                fracs.push_back(corrigid::parse_rational(f));
            std::vector<corrigid::CurvePoint> points =
                corrigid::corruption_curve(load_embedding(emb_json), fracs, seed);
            return corrigid::curve_to_csv(
                points,
                {corrigid::library_version(), "seed=" + std::to_string(seed)});
        },
        py::arg("embedding"), py::arg("fractions"), py::arg("seed") = std::uint64_t{1});

    // Transcripts and the counting predicate.
    m.def("allocation_string",
          [](const std::string& dist_json, const std::string& plan_json,
             const std::string& order) {
              return corrigid::allocation_string(
                  load_dist(dist_json),
                  corrigid::plan_from_json(
                      corrigid::parse_json_text(plan_json, "plan")),
                  order_of(order));
          });
    m.def("decode_allocation_string",
          [](const std::string& dist_json, const std::string& text,
             const std::string& order) {
              return dump(corrigid::plan_to_json(corrigid::decode_allocation_string(
                  load_dist(dist_json), text, order_of(order))));
          });
    m.def(
        "kc_inequality",
        [](long long k, long long r, long long g, long long n, long long t,
           const std::string& x) {
            corrigid::KCResult res =
                corrigid::kc_inequality(k, r, g, n, t, corrigid::parse_rational(x));
            ordered_json j;
            j["holds"] = res.holds;
            j["lhs"] = corrigid::format_rational(res.lhs);
            j["rhs"] = corrigid::format_rational(res.rhs);
            return dump(j);
        },
        py::arg("k"), py::arg("r"), py::arg("g"), py::arg("n"), py::arg("t"),
        py::arg("x"));

    m.def("sha256_hex", [](const std::string& bytes) {
        return corrigid::sha256_hex(bytes);
    });
}
