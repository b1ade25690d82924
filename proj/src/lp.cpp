// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0
#include "corrigid/lp.hpp"

#include <stdexcept>
#include <utility>

namespace corrigid {

namespace {

// Dense tableau in canonical form: every basic column is a unit column.
// `red` carries reduced costs for the current objective and `obj` the
// objective value of the current basic solution.
struct Tableau {
    std::vector<std::vector<Rat>> t;  // rows × (cols + 1); last entry is rhs
    std::vector<Rat> red;
    Rat obj;
    std::vector<int> basis;

    int rows() const { return static_cast<int>(t.size()); }
    int cols() const { return static_cast<int>(red.size()); }

    void pivot(int pr, int pc) {
        auto& prow = t[pr];
        const Rat inv = Rat(1) / prow[pc];
        for (auto& v : prow) v *= inv;
        prow[pc] = 1;  // exact, avoids p/p residue buildup
        for (int r = 0; r < rows(); ++r) {
            if (r == pr || t[r][pc] == 0) continue;
            const Rat f = t[r][pc];
            for (int c = 0; c <= cols(); ++c) t[r][c] -= Rat(f * prow[c]);
            t[r][pc] = 0;
        }
        if (red[pc] != 0) {
            const Rat f = red[pc];
            for (int c = 0; c < cols(); ++c) red[c] -= Rat(f * prow[c]);
            obj += Rat(f * prow[cols()]);
            red[pc] = 0;
        }
        basis[pr] = pc;
    }

    // Bland's rule: lowest-index improving column enters, and among the
    // rows tied in the ratio test the one whose basic variable has the
    // lowest column index leaves. Returns false when no column improves
    // (optimal) and throws nothing; unboundedness is reported by flag.
    enum class Step { Optimal, Pivoted, Unbounded };

    Step step() {
        int enter = -1;
        for (int c = 0; c < cols(); ++c) {
            if (red[c] > 0) { enter = c; break; }
        }
        if (enter < 0) return Step::Optimal;
        int leave = -1;
        Rat best;
        for (int r = 0; r < rows(); ++r) {
            if (t[r][enter] <= 0) continue;
            Rat ratio = Rat(t[r][cols()] / t[r][enter]);
            if (leave < 0 || ratio < best ||
                (ratio == best && basis[r] < basis[leave])) {
                leave = r;
                best = ratio;
            }
        }
        if (leave < 0) return Step::Unbounded;
        pivot(leave, enter);
        return Step::Pivoted;
    }

    Step run() {
        while (true) {
            Step s = step();
            if (s != Step::Pivoted) return s;
        }
    }
};

}  // namespace

LPResult lp_max(const LPProblem& p) {
    const int nvar = static_cast<int>(p.objective.size());
    const int nrow = static_cast<int>(p.a.size());
    if (p.rhs.size() != p.a.size())
        throw std::invalid_argument("lp: rhs length does not match row count");
    for (const auto& row : p.a)
        if (static_cast<int>(row.size()) != nvar)
            throw std::invalid_argument("lp: row width does not match objective");

    // Columns: x+ and x- interleaved (2*nvar), then one slack per row,
    // then artificials for rows whose rhs is negative.
    const int nsplit = 2 * nvar;
    int nart = 0;
    for (const auto& b : p.rhs)
        if (b < 0) ++nart;
    const int ncols = nsplit + nrow + nart;

    Tableau tab;
    tab.t.assign(nrow, std::vector<Rat>(ncols + 1, Rat(0)));
    tab.red.assign(ncols, Rat(0));
    tab.basis.assign(nrow, -1);

    int next_art = nsplit + nrow;
    for (int r = 0; r < nrow; ++r) {
        const bool flip = p.rhs[r] < 0;
        const Rat sign = flip ? Rat(-1) : Rat(1);
        auto& row = tab.t[r];
        for (int j = 0; j < nvar; ++j) {
            row[2 * j] = Rat(sign * p.a[r][j]);
            row[2 * j + 1] = Rat(-sign * p.a[r][j]);
        }
        row[nsplit + r] = sign;
        row[ncols] = Rat(sign * p.rhs[r]);
        if (flip) {
            row[next_art] = 1;
            tab.basis[r] = next_art++;
        } else {
            tab.basis[r] = nsplit + r;
        }
    }

    if (nart > 0) {
        // Phase one: maximize minus the sum of artificials. The initial
        // reduced costs fold in the artificial basis rows directly.
        for (int c = 0; c < ncols; ++c) {
            Rat rc = c >= nsplit + nrow ? Rat(-1) : Rat(0);
            for (int r = 0; r < nrow; ++r)
                if (tab.basis[r] >= nsplit + nrow) rc += tab.t[r][c];
            tab.red[c] = rc;
        }
        tab.obj = 0;
        for (int r = 0; r < nrow; ++r)
            if (tab.basis[r] >= nsplit + nrow) tab.obj -= tab.t[r][ncols];
        Tableau::Step s = tab.run();
        (void)s;  // phase one is always bounded: the objective is <= 0
        if (tab.obj != 0) {
            LPResult res;
            res.status = LPStatus::Infeasible;
            return res;
        }
        // Drive leftover artificials out of the basis; rows that cannot
        // pivot are redundant equalities and are dropped.
        for (int r = 0; r < tab.rows(); ++r) {
            if (tab.basis[r] < nsplit + nrow) continue;
            int pc = -1;
            for (int c = 0; c < nsplit + nrow; ++c)
                if (tab.t[r][c] != 0) { pc = c; break; }
            if (pc >= 0) tab.pivot(r, pc);
        }
        std::vector<std::vector<Rat>> kept_rows;
        std::vector<int> kept_basis;
        for (int r = 0; r < tab.rows(); ++r) {
            if (tab.basis[r] >= nsplit + nrow) continue;
            auto row = std::move(tab.t[r]);
            row.erase(row.begin() + (nsplit + nrow), row.begin() + ncols);
            kept_rows.push_back(std::move(row));
            kept_basis.push_back(tab.basis[r]);
        }
        tab.t = std::move(kept_rows);
        tab.basis = std::move(kept_basis);
        tab.red.assign(nsplit + nrow, Rat(0));
    }

    // Phase two objective on the split variables.
    const int pcols = tab.cols();
    std::vector<Rat> cost(pcols, Rat(0));
    for (int j = 0; j < nvar; ++j) {
        cost[2 * j] = p.objective[j];
        cost[2 * j + 1] = Rat(-p.objective[j]);
    }
    tab.obj = 0;
    for (int c = 0; c < pcols; ++c) tab.red[c] = cost[c];
    for (int r = 0; r < tab.rows(); ++r) {
        const Rat cb = cost[tab.basis[r]];
        if (cb == 0) continue;
        for (int c = 0; c < pcols; ++c) tab.red[c] -= Rat(cb * tab.t[r][c]);
        tab.obj += Rat(cb * tab.t[r][pcols]);
    }

    LPResult res;
    if (tab.run() == Tableau::Step::Unbounded) {
        res.status = LPStatus::Unbounded;
        return res;
    }
    res.status = LPStatus::Optimal;
    res.value = tab.obj;
    std::vector<Rat> split(pcols, Rat(0));
    for (int r = 0; r < tab.rows(); ++r)
        split[tab.basis[r]] = tab.t[r][pcols];
    res.x.resize(nvar);
    for (int j = 0; j < nvar; ++j)
        res.x[j] = Rat(split[2 * j] - split[2 * j + 1]);
    return res;
}

}  // namespace corrigid
