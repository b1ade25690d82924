// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "corrigid/rational.hpp"

namespace corrigid {

// max c'x subject to Ax <= b, x free. Rows of `a` must all have the same
// length as `objective`; `rhs` entries may be negative.
struct LPProblem {
    std::vector<Rat> objective;
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> rhs;
};

enum class LPStatus { Optimal, Unbounded, Infeasible };

struct LPResult {
    LPStatus status = LPStatus::Optimal;
    Rat value;              // meaningful only when Optimal
    std::vector<Rat> x;     // primal solution when Optimal, else empty
};

// Exact two-phase simplex over rationals. Free variables are split into
// positive and negative parts, inequality rows get slack variables, and
// phase one introduces artificials only where the slack basis is not
// already feasible. Bland's rule (lowest eligible index enters and leaves)
// guarantees termination without a perturbation scheme.
LPResult lp_max(const LPProblem& p);

}  // namespace corrigid
