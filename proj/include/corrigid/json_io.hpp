// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats. Everything on disk is JSON except the curve, which is CSV.
// Rationals travel as canonical "p/q" strings so that artifacts round-trip
// exactly and byte-identically; players and rounds are 0-indexed on the
// wire. Parsers throw std::invalid_argument with a message naming the bad
// field; they never read half an object silently.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "corrigid/distribution.hpp"
#include "corrigid/divisible.hpp"
#include "corrigid/embedding.hpp"
#include "corrigid/mechanism.hpp"
#include "corrigid/verify.hpp"

namespace corrigid {

using ordered_json = nlohmann::ordered_json;

// Reported in artifacts so a stale file can be traced to the build that
// wrote it.
std::string library_version();

// {"n": …, "support": [{"values": ["p/q", …], "prob": "p/q"}, …]}
ordered_json distribution_to_json(const JointDistribution& d);
JointDistribution distribution_from_json(const ordered_json& j);

// {"n", "m", "base_vectors": [[…]], "active_sets": [[…]],
//  "thresholds": [{"j", "i", "u"}, …]} plus ignorable extras.
ordered_json set_to_json(const MDivisibleSet& s);
MDivisibleSet set_from_json(const ordered_json& j);

// {"n", "thresholds": [{"i", "profile", "t": "p/q" | "inf"}],
//  "fees": [{"i", "profile", "c"}]}. "n" is optional on input when at
// least one entry fixes the profile length.
ordered_json mechanism_to_json(const ThresholdMechanism& mech,
                               const FeeSchedule& fees);
std::pair<ThresholdMechanism, FeeSchedule> mechanism_from_json(
    const ordered_json& j);

ordered_json params_to_json(const SetParameters& p);

// The bundle written by `embed`: the set plus every derived section
// (constants, distribution, instance tags). Reading rebuilds the embedding
// from the set and cross-checks the stored distribution, so a bundle edited
// by hand or produced by a different build fails loudly.
ordered_json embedding_to_json(const Embedding& emb);
Embedding embedding_from_json(const ordered_json& j);

ordered_json report_to_json(const RigidityReport& rep);

// CSV with columns fraction, x, revenue_ratio, bound. Lines in `comments`
// are emitted first, each prefixed with "# ".
std::string curve_to_csv(const std::vector<CurvePoint>& points,
                         const std::vector<std::string>& comments = {});

// Allocation plans come in as an array of {"values": […], "winner": int or
// null}.
AllocationPlan plan_from_json(const ordered_json& j);
ordered_json plan_to_json(const AllocationPlan& plan);

// Small file helpers shared by the CLI and the tests. read/write throw
// std::runtime_error on I/O failure; parse wraps nlohmann's error into
// std::invalid_argument tagged with the source name.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
ordered_json parse_json_text(const std::string& text, const std::string& source);

// Hex-encoded SHA-256, for input fingerprint fields in reports.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

}  // namespace corrigid
