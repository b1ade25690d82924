// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/divisible.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace corrigid {

bool MDivisibleSet::is_active(int j, int i) const {
    const auto& a = active_sets[j];
    return std::binary_search(a.begin(), a.end(), i);
}

const Rat& MDivisibleSet::threshold(int j, int i) const {
    return thresholds.at({j, i});
}

std::vector<std::string> validate_set(const MDivisibleSet& s) {
    std::vector<std::string> issues;
    if (s.n <= 2) issues.push_back("player count must exceed 2");
    if (s.m < 1) issues.push_back("round count must be at least 1");
    if (static_cast<int>(s.base_vectors.size()) != s.m ||
        static_cast<int>(s.active_sets.size()) != s.m) {
        issues.push_back("base vector / active set counts do not match m");
        return issues;  // shape is broken; indexed checks below would misfire
    }

    auto cell = [](int j, int i) {
        return "round " + std::to_string(j) + ", player " + std::to_string(i);
    };

    for (int j = 0; j < s.m; ++j) {
        if (static_cast<int>(s.base_vectors[j].size()) != s.n)
            issues.push_back("base vector " + std::to_string(j) + " has wrong arity");
        for (const auto& v : s.base_vectors[j])
            if (v <= 0) {
                issues.push_back("base vector " + std::to_string(j) + " has a non-positive value");
                break;
            }
        const auto& act = s.active_sets[j];
        if (act.empty()) issues.push_back("active set " + std::to_string(j) + " is empty");
        if (!std::is_sorted(act.begin(), act.end()) ||
            std::adjacent_find(act.begin(), act.end()) != act.end())
            issues.push_back("active set " + std::to_string(j) + " is not sorted and distinct");
        for (int i : act) {
            if (i < 0 || i >= s.n) {
                issues.push_back("active set " + std::to_string(j) + " has an out-of-range player");
                continue;
            }
            auto it = s.thresholds.find({j, i});
            if (it == s.thresholds.end()) {
                issues.push_back("missing winning value at " + cell(j, i));
            } else if (static_cast<int>(s.base_vectors[j].size()) == s.n &&
                       it->second <= s.base_vectors[j][i]) {
                issues.push_back("winning value not above base value at " + cell(j, i));
            }
        }
    }
    for (const auto& [key, u] : s.thresholds) {
        auto [j, i] = key;
        if (j < 0 || j >= s.m || !s.is_active(j, i))
            issues.push_back("stray winning value at " + cell(j, i));
        if (u <= 0) issues.push_back("non-positive winning value at " + cell(j, i));
    }
    if (!issues.empty()) return issues;

    // No base value may repeat across rounds for the same player.
    for (int i = 0; i < s.n; ++i) {
        std::map<Rat, int> seen;
        for (int j = 0; j < s.m; ++j) {
            auto [it, fresh] = seen.try_emplace(s.base_vectors[j][i], j);
            if (!fresh)
                issues.push_back("player " + std::to_string(i) + " repeats base value " +
                                 format_rational(s.base_vectors[j][i]) + " in rounds " +
                                 std::to_string(it->second) + " and " + std::to_string(j));
        }
    }

    // Per player: winning values pairwise distinct and apart from every base value.
    for (int i = 0; i < s.n; ++i) {
        std::set<Rat> base;
        for (int j = 0; j < s.m; ++j) base.insert(s.base_vectors[j][i]);
        std::set<Rat> wins;
        for (int j = 0; j < s.m; ++j) {
            if (!s.is_active(j, i)) continue;
            const Rat& u = s.threshold(j, i);
            if (!wins.insert(u).second)
                issues.push_back("player " + std::to_string(i) + " repeats winning value " +
                                 format_rational(u));
            if (base.count(u))
                issues.push_back("winning value collides with a base value at " + cell(j, i));
        }
    }
    return issues;
}

SetParameters parameters(const MDivisibleSet& s) {
    auto issues = validate_set(s);
    if (!issues.empty()) throw std::invalid_argument("invalid set: " + issues.front());

    SetParameters p;
    std::set<int> act;
    for (int j = 0; j < s.m; ++j) {
        for (int i : s.active_sets[j]) act.insert(i);
        p.size += static_cast<long long>(s.active_sets[j].size());
    }
    p.active_players.assign(act.begin(), act.end());
    p.a = static_cast<int>(p.active_players.size());

    for (int i : p.active_players) {
        std::vector<Rat> ys;
        for (int j = 0; j < s.m; ++j)
            if (s.is_active(j, i)) ys.push_back(s.base_vectors[j][i]);
        std::sort(ys.begin(), ys.end());
        for (int j = 0; j < s.m; ++j)
            if (s.is_active(j, i)) {
                auto it = std::lower_bound(ys.begin(), ys.end(), s.base_vectors[j][i]);
                p.sigma[{i, j}] = static_cast<int>(it - ys.begin()) + 1;
            }
        Rat d;
        if (ys.size() == 1) {
            d = Rat(1, 2);
        } else {
            Rat worst = 0;  // ratios are in (0,1); larger means slower growth
            for (size_t r = 0; r + 1 < ys.size(); ++r) worst = std::max(worst, Rat(ys[r] / ys[r + 1]));
            d = 1 - worst;
        }
        p.sorted_values[i] = std::move(ys);
        p.d[i] = d;
        p.g[i] = 1 / d;
        p.g_avg += p.g[i];
    }
    p.g_avg /= p.a;

    for (int j = 0; j < s.m; ++j) {
        Rat top = *std::max_element(s.base_vectors[j].begin(), s.base_vectors[j].end());
        bool first = true;
        Rat margin;
        for (int i : s.active_sets[j]) {
            Rat gap = s.threshold(j, i) - s.base_vectors[j][i];
            if (first || gap < margin) margin = gap;
            first = false;
        }
        p.alpha[j] = top / margin;
        p.alpha_avg += p.alpha[j];
    }
    p.alpha_avg /= s.m;

    p.c_S = Rat(p.a * p.g_avg + s.m * p.alpha_avg) / static_cast<long>(p.size);
    return p;
}

}  // namespace corrigid
