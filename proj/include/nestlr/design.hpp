#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nestlr/exp_family.hpp"
#include "nestlr/parallel.hpp"
#include "nestlr/simplex.hpp"

namespace nestlr {

// M x M extended-real matrix, entry (i,j) = E_{theta_j}[W_ij^2].
// Diagonal is exactly 1; off-diagonals are >= 1 or +inf.
class SecondMomentTable {
  public:
    explicit SecondMomentTable(std::size_t m) : m_(m), v_(m * m, 1.0) {}

    std::size_t size() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * m_ + j]; }
    double& at(std::size_t i, std::size_t j) { return v_[i * m_ + j]; }

  private:
    std::size_t m_;
    std::vector<double> v_;
};

inline SecondMomentTable compute_second_moments(const ExponentialFamilyModel& model,
                                                const std::vector<Scenario>& scenarios) {
    const std::size_t m = scenarios.size();
    if (m == 0) throw std::invalid_argument("compute_second_moments: no scenarios");
    for (const auto& s : scenarios) model.require_admissible(s);
    SecondMomentTable table(m);
    parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j) {
            table.at(i, j) = i == j ? 1.0 : model.second_moment_lr(scenarios[i], scenarios[j]);
        }
    });
    return table;
}

// The sampling LP: min sum_j N_j  s.t.  sum_j N_j / E_j[W_ij^2] >= target_N
// for every i, N_j >= 0. Infinite table entries contribute coefficient 0.
inline LinearProgram build_design_lp(const SecondMomentTable& table, double target_n) {
    const std::size_t m = table.size();
    LinearProgram lp;
    lp.n_vars = m;
    lp.n_cons = m;
    lp.c.assign(m, 1.0);
    lp.b.assign(m, target_n);
    lp.A.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double w2 = table(i, j);
            lp.A[i * m + j] = std::isinf(w2) ? 0.0 : 1.0 / w2;
        }
    }
    return lp;
}

struct DesignSolution {
    std::vector<double> base_allocation;     // c*: LP solution at N = 1
    double target_n = 0.0;
    double delta = 0.0;
    std::vector<double> real_allocation;     // N_j* after scaling and delta floor
    std::vector<std::size_t> integer_allocation;  // ceil(N_j*)
    std::vector<double> gamma;               // M x M row-major pooling weights
    std::size_t budget = 0;                  // Gamma = sum of integer allocations

    std::size_t size() const { return base_allocation.size(); }
    double gamma_at(std::size_t i, std::size_t j) const { return gamma[i * size() + j]; }
};

// Optimal pooling weights for a base allocation:
//   gamma_ij = (c_j / E_j[W_ij^2]) / sum_k (c_k / E_k[W_ik^2]),
// with 1/inf = 0. Every row must have a feasible pool.
inline std::vector<double> pooling_weights(const std::vector<double>& base_allocation,
                                           const SecondMomentTable& table) {
    const std::size_t m = table.size();
    if (base_allocation.size() != m) {
        throw std::invalid_argument("pooling_weights: allocation size mismatch");
    }
    std::vector<double> gamma(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double w2 = table(i, j);
            double term = std::isinf(w2) ? 0.0 : base_allocation[j] / w2;
            gamma[i * m + j] = term;
            denom += term;
        }
        if (!(denom > 0.0)) {
            throw std::runtime_error("pooling_weights: scenario with empty pool (LP infeasible?)");
        }
        for (std::size_t j = 0; j < m; ++j) gamma[i * m + j] /= denom;
    }
    return gamma;
}

// Solves the design at N=1, then scales: N_j* = c_j* N, with the delta floor
// N_j* = delta*N whenever 0 < c_j* < delta. Integer allocations are ceilings.
inline DesignSolution solve_design(const SecondMomentTable& table, double target_n,
                                   double delta = 1e-6) {
    if (!(target_n >= 1.0)) throw std::invalid_argument("solve_design: target_N must be >= 1");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("solve_design: bad delta");
    const std::size_t m = table.size();

    LpSolution sol = lp_solve(build_design_lp(table, 1.0));
    if (sol.status != LpStatus::Optimal) {
        throw std::runtime_error("solve_design: LP solve failed (status != Optimal)");
    }
    std::vector<double>& c = sol.x;
    for (double& v : c) {
        if (v < 1e-12) v = 0.0;  // numerical dust must not become sampling scenarios
    }

    // The unit-N constraints must hold with a margin so that scaled designs
    // meet their ESS target exactly; nudge c* up if the solver left residue.
    for (int pass = 0; pass < 3; ++pass) {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                double w2 = table(i, j);
                if (!std::isinf(w2)) lhs += c[j] / w2;
            }
            worst = std::max(worst, 1.0 - lhs);
        }
        if (worst <= 0.0) break;
        double scale = 1.0 / (1.0 - worst) + 1e-15;
        for (double& v : c) v *= scale;
    }

    DesignSolution design;
    design.base_allocation = c;
    design.target_n = target_n;
    design.delta = delta;
    design.real_allocation.assign(m, 0.0);
    design.integer_allocation.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        double cj = c[j];
        double nj = 0.0;
        if (cj > 0.0) nj = (cj < delta ? delta : cj) * target_n;
        design.real_allocation[j] = nj;
        design.integer_allocation[j] = static_cast<std::size_t>(std::ceil(nj));
        design.budget += design.integer_allocation[j];
    }
    design.gamma = pooling_weights(design.base_allocation, table);
    return design;
}

// Achieved effective sample size per target scenario under the real
// allocations: entry i = sum_j N_j* / E_j[W_ij^2].
inline std::vector<double> achieved_ess(const DesignSolution& design,
                                        const SecondMomentTable& table) {
    const std::size_t m = table.size();
    if (design.size() != m) throw std::invalid_argument("achieved_ess: size mismatch");
    std::vector<double> ess(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double w2 = table(i, j);
            if (!std::isinf(w2)) acc += design.real_allocation[j] / w2;
        }
        ess[i] = acc;
    }
    return ess;
}

}  // namespace nestlr
