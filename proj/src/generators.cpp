// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/generators.hpp"

#include <algorithm>
#include <stdexcept>

#include "corrigid/rng.hpp"

namespace corrigid {
namespace {

constexpr int kMaxAttempts = 64;

// b^e with e possibly negative.
Rat rpow(Rat b, long e) {
    if (e < 0) {
        b = 1 / b;
        e = -e;
    }
    Rat out = 1;
    while (e > 0) {
        if (e & 1) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

// Quarter of the smallest positive gap among the sampled values. Adding this
// to every raw winning value pushes it strictly off every sampled value
// without crossing any other one, so sampling collisions between winning and
// base values repair themselves.
Rat tie_offset(std::vector<Rat> vals) {
    std::sort(vals.begin(), vals.end());
    Rat best;
    bool found = false;
    for (size_t i = 0; i + 1 < vals.size(); ++i) {
        Rat gap = vals[i + 1] - vals[i];
        if (gap > 0 && (!found || gap < best)) {
            best = gap;
            found = true;
        }
    }
    return found ? Rat(best / 4) : Rat(1, 4);
}

Rat half() { return Rat(1, 2); }

}  // namespace

MDivisibleSet gen_random_high_values(int n, int m, std::uint64_t seed) {
    if (n <= 2 || m < 1) throw std::invalid_argument("need n > 2 and m >= 1");
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SplitMix64 rng = seeded_rng(seed, n, m, (1ULL << 32) | static_cast<std::uint64_t>(attempt));
        MDivisibleSet s;
        s.n = n;
        s.m = m;
        std::vector<Rat> last(n, Rat(1));  // value at each player's latest active round
        std::vector<Rat> pool;
        std::map<std::pair<int, int>, Rat> raw;
        for (int j = 0; j < m; ++j) {
            std::vector<int> act;
            for (int tries = 0; act.empty(); ++tries) {
                if (tries > 10000) throw std::runtime_error("generator stuck");
                for (int i = 0; i < n; ++i)
                    if (rng.coin()) act.push_back(i);
            }
            Instance base(n);
            for (int i = 0; i < n; ++i) {
                if (std::binary_search(act.begin(), act.end(), i)) {
                    base[i] = last[i] / rng.uniform(2, 4);
                    last[i] = base[i];
                } else {
                    base[i] = rng.uniform(half(), 1);
                }
                pool.push_back(base[i]);
            }
            for (int i : act) {
                // Lower end max(1/2, v + 1/4) keeps every winning margin at
                // least 1/4, which caps alpha_j at 4.
                Rat lo = std::max(half(), Rat(base[i] + Rat(1, 4)));
                raw[{j, i}] = rng.uniform(lo, 1);
                pool.push_back(raw[{j, i}]);
            }
            s.base_vectors.push_back(std::move(base));
            s.active_sets.push_back(std::move(act));
        }
        Rat tau = tie_offset(pool);
        for (auto& [key, u] : raw) s.thresholds[key] = u + tau;
        if (validate_set(s).empty()) return s;
    }
    throw std::runtime_error("generator stuck");
}

MDivisibleSet gen_geometric(int n, int m, std::uint64_t seed) {
    if (n <= 2 || m < 1) throw std::invalid_argument("need n > 2 and m >= 1");
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SplitMix64 rng = seeded_rng(seed, n, m, (2ULL << 32) | static_cast<std::uint64_t>(attempt));
        MDivisibleSet s;
        s.n = n;
        s.m = m;
        std::vector<Rat> pool;
        std::map<std::pair<int, int>, Rat> raw;
        Instance prev(n, Rat(1));
        for (int j = 0; j < m; ++j) {
            Instance base(n);
            std::vector<int> act(n);
            for (int i = 0; i < n; ++i) {
                base[i] = (j == 0) ? Rat(1) : Rat(prev[i] * rng.uniform(2, 4));
                act[i] = i;
                pool.push_back(base[i]);
            }
            for (int i = 0; i < n; ++i) {
                raw[{j, i}] = rng.uniform(Rat(2 * base[i]), Rat(4 * base[i]));
                pool.push_back(raw[{j, i}]);
            }
            prev = base;
            s.base_vectors.push_back(std::move(base));
            s.active_sets.push_back(std::move(act));
        }
        Rat tau = tie_offset(pool);
        for (auto& [key, u] : raw) s.thresholds[key] = u + tau;
        if (validate_set(s).empty()) return s;
    }
    throw std::runtime_error("generator stuck");
}

MDivisibleSet gen_k_excluded(int n, int k, int m, const Rat& eps) {
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must lie in (0, 1)");
    if (k < 1 || k + 2 >= n) throw std::invalid_argument("need 1 <= k and k + 2 < n");
    if (m < 1) throw std::invalid_argument("need m >= 1");
    MDivisibleSet s;
    s.n = n;
    s.m = m;
    for (int j = 1; j <= m; ++j) {
        Rat xj = rpow(eps, -j) * (1 + eps) + (1 + eps);
        Rat active_value = rpow(eps, 1 - j);
        Instance base(n);
        std::vector<int> act;
        for (int i = 0; i < n - k; ++i) {
            base[i] = active_value;
            act.push_back(i);
            s.thresholds[{j - 1, i}] = xj - eps;
        }
        for (int i = n - k; i < n; ++i) base[i] = xj;
        s.base_vectors.push_back(std::move(base));
        s.active_sets.push_back(std::move(act));
    }
    auto issues = validate_set(s);
    if (!issues.empty())
        throw std::invalid_argument("eps produces a colliding set: " + issues.front());
    return s;
}

MDivisibleSet gen_family_member(int n, int m, const std::vector<std::vector<int>>& pattern,
                                std::uint64_t seed) {
    if (n <= 2 || m < 1) throw std::invalid_argument("need n > 2 and m >= 1");
    if (static_cast<int>(pattern.size()) != m)
        throw std::invalid_argument("pattern must list one active set per round");
    size_t width = pattern.empty() ? 0 : pattern[0].size();
    for (const auto& p : pattern) {
        if (p.empty() || p.size() != width)
            throw std::invalid_argument("pattern rounds must share one nonempty size");
        for (int i : p)
            if (i < 1 || i >= n) throw std::invalid_argument("pattern players must lie in 1..n-1");
        if (!std::is_sorted(p.begin(), p.end()) ||
            std::adjacent_find(p.begin(), p.end()) != p.end())
            throw std::invalid_argument("pattern rounds must be sorted and distinct");
    }

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SplitMix64 rng = seeded_rng(seed, n, m, (3ULL << 32) | static_cast<std::uint64_t>(attempt));
        MDivisibleSet s;
        s.n = n;
        s.m = m;
        std::vector<Rat> last(n, Rat(1));
        std::vector<Rat> pool;
        std::map<std::pair<int, int>, Rat> raw;
        for (int j = 0; j < m; ++j) {
            const auto& act = pattern[j];
            Instance base(n);
            for (int i = 1; i < n; ++i) {
                if (std::binary_search(act.begin(), act.end(), i)) {
                    base[i] = last[i] / rng.uniform(2, 4);
                    last[i] = base[i];
                } else {
                    base[i] = rng.uniform(half(), 1);
                }
                pool.push_back(base[i]);
            }
            Rat ceiling = half();  // player 0 must top everything in the round
            for (int i : act) {
                Rat lo = std::max(half(), Rat(base[i] + Rat(1, 4)));
                raw[{j, i}] = rng.uniform(lo, 1);
                pool.push_back(raw[{j, i}]);
                ceiling = std::max(ceiling, raw[{j, i}]);
            }
            for (int i = 1; i < n; ++i) ceiling = std::max(ceiling, base[i]);
            base[0] = rng.uniform(ceiling, 1);
            pool.push_back(base[0]);
            s.base_vectors.push_back(std::move(base));
            s.active_sets.push_back(act);
        }
        Rat tau = tie_offset(pool);
        for (auto& [key, u] : raw) s.thresholds[key] = u + tau;
        if (!validate_set(s).empty()) continue;
        // Player 0 must strictly dominate every instance the set allocates.
        bool dominant = true;
        for (int j = 0; j < m && dominant; ++j) {
            for (int i : s.active_sets[j])
                if (s.threshold(j, i) >= s.base_vectors[j][0]) dominant = false;
            for (int i = 1; i < n; ++i)
                if (s.base_vectors[j][i] >= s.base_vectors[j][0]) dominant = false;
        }
        if (dominant) return s;
    }
    throw std::runtime_error("generator stuck");
}

}  // namespace corrigid
