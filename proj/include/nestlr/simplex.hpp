#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nestlr/math.hpp"
#include "nestlr/parallel.hpp"

namespace nestlr {

// min c^T x  s.t.  A x >= b, x >= 0.  A is dense row-major (n_cons x n_vars).
// Infinite coefficients are the caller's problem: map them to 0 first.
struct LinearProgram {
    std::vector<double> c;
    std::vector<double> A;
    std::vector<double> b;
    std::size_t n_vars = 0;
    std::size_t n_cons = 0;

    double a(std::size_t i, std::size_t j) const { return A[i * n_vars + j]; }

    void validate() const {
        if (c.size() != n_vars || b.size() != n_cons || A.size() != n_vars * n_cons) {
            throw std::invalid_argument("LinearProgram: inconsistent dimensions");
        }
        for (double v : c)
            if (!std::isfinite(v)) throw std::invalid_argument("LinearProgram: non-finite cost");
        for (double v : b)
            if (!std::isfinite(v)) throw std::invalid_argument("LinearProgram: non-finite rhs");
        for (double v : A)
            if (!std::isfinite(v)) throw std::invalid_argument("LinearProgram: non-finite matrix");
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    std::vector<double> x;
    std::vector<double> dual;  // one multiplier per constraint
    double objective = 0.0;
    LpStatus status = LpStatus::Optimal;
    std::size_t iterations = 0;
};

namespace detail {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kDegenerateSwitch = 50;  // consecutive degenerate pivots before Bland

// Dense simplex tableau. Row layout: m constraint rows then the cost row;
// final column is the rhs. basis_[r] is the variable basic in row r.
class Tableau {
  public:
    Tableau(std::size_t m, std::size_t n_cols)
        : m_(m), width_(n_cols + 1), t_((m + 1) * (n_cols + 1), 0.0), basis_(m, 0) {}

    double* row(std::size_t r) { return t_.data() + r * width_; }
    const double* row(std::size_t r) const { return t_.data() + r * width_; }
    double* cost_row() { return row(m_); }
    double rhs(std::size_t r) const { return row(r)[width_ - 1]; }
    std::size_t n_cols() const { return width_ - 1; }
    std::size_t n_rows() const { return m_; }
    std::vector<std::size_t>& basis() { return basis_; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    double objective() const { return -row(m_)[width_ - 1]; }

    // Rebuild the cost row for costs `c` given the current basis.
    void set_costs(const std::vector<double>& c) {
        double* z = cost_row();
        for (std::size_t j = 0; j < width_; ++j) z[j] = j < c.size() ? c[j] : 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            double cb = basis_[r] < c.size() ? c[basis_[r]] : 0.0;
            if (cb == 0.0) continue;
            const double* tr = row(r);
            for (std::size_t j = 0; j < width_; ++j) z[j] -= cb * tr[j];
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        double* prow = row(pr);
        double inv = 1.0 / prow[pc];
        for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        auto eliminate = [&](std::size_t r) {
            if (r == pr) return;
            double* tr = row(r);
            double f = tr[pc];
            if (f == 0.0) return;
            for (std::size_t j = 0; j < width_; ++j) tr[j] -= f * prow[j];
            tr[pc] = 0.0;
        };
        if (m_ >= 1024) {
            parallel_for(m_ + 1, eliminate);
        } else {
            for (std::size_t r = 0; r <= m_; ++r) eliminate(r);
        }
        basis_[pr] = pc;
    }

    // Primal simplex from a basic feasible tableau. `priceable` bounds the
    // columns eligible to enter (artificials are excluded in phase 2).
    LpStatus iterate(std::size_t priceable, std::size_t max_iter, std::size_t& iters) {
        int degenerate_run = 0;
        while (true) {
            if (iters >= max_iter) return LpStatus::IterationLimit;
            const double* z = cost_row();
            std::size_t pc = width_;  // sentinel
            if (degenerate_run < kDegenerateSwitch) {
                double best = -kReducedCostTol;
                for (std::size_t j = 0; j < priceable; ++j) {
                    if (z[j] < best) {
                        best = z[j];
                        pc = j;
                    }
                }
            } else {  // Bland's rule
                for (std::size_t j = 0; j < priceable; ++j) {
                    if (z[j] < -kReducedCostTol) {
                        pc = j;
                        break;
                    }
                }
            }
            if (pc == width_) return LpStatus::Optimal;

            std::size_t pr = m_;  // sentinel
            double best_ratio = kInf;
            for (std::size_t r = 0; r < m_; ++r) {
                double col = row(r)[pc];
                if (col > kPivotTol) {
                    double ratio = rhs(r) / col;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && pr != m_ && basis_[r] < basis_[pr])) {
                        best_ratio = ratio;
                        pr = r;
                    }
                }
            }
            if (pr == m_) return LpStatus::Unbounded;
            degenerate_run = best_ratio < 1e-12 ? degenerate_run + 1 : 0;
            pivot(pr, pc);
            ++iters;
        }
    }

  private:
    std::size_t m_, width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

// General path: two-phase primal simplex with artificials on rows whose
// (sign-normalized) rhs is positive.
inline LpSolution solve_two_phase(const LinearProgram& lp) {
    const std::size_t m = lp.n_cons, n = lp.n_vars;
    const std::size_t max_iter = 50 * (m + n);

    // Row normalization: rows with b < 0 are negated, so every rhs is >= 0.
    // Surplus coefficient is -1 on kept rows, +1 (a slack) on negated rows.
    std::vector<int> row_sign(m, 1);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (lp.b[i] < 0.0) row_sign[i] = -1;
        else ++n_art;
    }

    const std::size_t col_surplus = n;
    const std::size_t col_art = n + m;
    const std::size_t n_cols = n + m + n_art;
    Tableau tab(m, n_cols);

    std::size_t art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double* tr = tab.row(i);
        double sgn = row_sign[i];
        for (std::size_t j = 0; j < n; ++j) tr[j] = sgn * lp.a(i, j);
        tr[col_surplus + i] = -sgn;
        tr[n_cols] = sgn * lp.b[i];
        if (row_sign[i] > 0) {
            tr[col_art + art] = 1.0;
            tab.basis()[i] = col_art + art;
            ++art;
        } else {
            tab.basis()[i] = col_surplus + i;  // slack start
        }
    }

    LpSolution sol;
    sol.iterations = 0;

    if (n_art > 0) {
        std::vector<double> phase1(n_cols, 0.0);
        for (std::size_t k = 0; k < n_art; ++k) phase1[col_art + k] = 1.0;
        tab.set_costs(phase1);
        LpStatus st = tab.iterate(n_cols, max_iter, sol.iterations);
        if (st == LpStatus::IterationLimit) {
            sol.status = st;
            return sol;
        }
        if (tab.objective() > 1e-7 * (1.0 + std::fabs(tab.objective()))) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Degenerate basic artificials: pivot them out where possible; a row
        // with no eligible pivot is redundant and gets zeroed so later pivots
        // cannot move its (zero-valued) artificial.
        for (std::size_t r = 0; r < m; ++r) {
            if (tab.basis()[r] >= col_art) {
                double* tr = tab.row(r);
                std::size_t found = n_cols;
                for (std::size_t j = 0; j < col_art; ++j) {
                    if (std::fabs(tr[j]) > kPivotTol) {
                        found = j;
                        break;
                    }
                }
                if (found < n_cols) {
                    tab.pivot(r, found);
                    ++sol.iterations;
                } else {
                    for (std::size_t j = 0; j <= n_cols; ++j) tr[j] = 0.0;
                }
            }
        }
    }

    std::vector<double> costs(n_cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) costs[j] = lp.c[j];
    tab.set_costs(costs);
    LpStatus st = tab.iterate(n + m, max_iter, sol.iterations);  // artificials stay out
    sol.status = st;
    if (st != LpStatus::Optimal) return sol;

    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        if (tab.basis()[r] < n) sol.x[tab.basis()[r]] = tab.rhs(r);
    }
    sol.dual.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        // y_i = sgn_i * pi_i and pi on the surplus column is sgn_i * rc, so the
        // signs cancel for both row orientations.
        sol.dual[i] = tab.cost_row()[col_surplus + i];
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
    return sol;
}

// Covering path for c >= 0: primal simplex on the dual
//   max b^T y  s.t.  A^T y <= c, y >= 0,
// which starts feasible on slacks with no artificials. The primal solution is
// read off the slack columns' reduced costs. Used by the design LPs, whose
// tableaus are large but solve in a handful of pivots.
inline LpSolution solve_via_dual(const LinearProgram& lp) {
    const std::size_t m = lp.n_cons, n = lp.n_vars;
    const std::size_t max_iter = 50 * (m + n);
    const std::size_t n_cols = m + n;  // y variables then slacks
    Tableau tab(n, n_cols);
    for (std::size_t j = 0; j < n; ++j) {
        double* tr = tab.row(j);
        for (std::size_t i = 0; i < m; ++i) tr[i] = lp.a(i, j);
        tr[m + j] = 1.0;
        tr[n_cols] = lp.c[j];
        tab.basis()[j] = m + j;
    }
    std::vector<double> costs(n_cols, 0.0);
    for (std::size_t i = 0; i < m; ++i) costs[i] = -lp.b[i];  // maximize b^T y
    tab.set_costs(costs);

    LpSolution sol;
    LpStatus st = tab.iterate(n_cols, max_iter, sol.iterations);
    if (st == LpStatus::Unbounded) {
        sol.status = LpStatus::Infeasible;  // unbounded dual == infeasible primal
        return sol;
    }
    sol.status = st;
    if (st != LpStatus::Optimal) return sol;

    sol.x.assign(n, 0.0);
    const double* z = tab.cost_row();
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = std::max(0.0, z[m + j]);
    sol.dual.assign(m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        if (tab.basis()[r] < m) sol.dual[tab.basis()[r]] = tab.rhs(r);
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];
    return sol;
}

}  // namespace detail

// Dense LP solve. Covering problems (c >= 0) go through the slack-start dual
// tableau; anything else takes the two-phase primal.
inline LpSolution lp_solve(const LinearProgram& lp) {
    lp.validate();
    if (lp.n_vars == 0 || lp.n_cons == 0) {
        throw std::invalid_argument("lp_solve: empty program");
    }
    bool nonneg_costs = true;
    for (double v : lp.c) {
        if (v < 0.0) {
            nonneg_costs = false;
            break;
        }
    }
    return nonneg_costs ? detail::solve_via_dual(lp) : detail::solve_two_phase(lp);
}

}  // namespace nestlr
