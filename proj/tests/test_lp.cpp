#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "nestlr/rng.hpp"
#include "nestlr/simplex.hpp"

#include "lp_vertex_oracle.hpp"

using namespace nestlr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

LinearProgram make_lp(std::size_t m, std::size_t n, std::vector<double> c,
                      std::vector<double> A, std::vector<double> b) {
    LinearProgram lp;
    lp.n_vars = n;
    lp.n_cons = m;
    lp.c = std::move(c);
    lp.A = std::move(A);
    lp.b = std::move(b);
    return lp;
}

void check_optimal(const LinearProgram& lp, const LpSolution& sol) {
    REQUIRE(sol.status == LpStatus::Optimal);
    double bmax = 0.0;
    for (double v : lp.b) bmax = std::max(bmax, std::fabs(v));
    for (std::size_t j = 0; j < lp.n_vars; ++j) REQUIRE(sol.x[j] >= -1e-9);
    for (std::size_t i = 0; i < lp.n_cons; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < lp.n_vars; ++j) lhs += lp.a(i, j) * sol.x[j];
        REQUIRE(lp.b[i] - lhs <= 1e-7 * (1.0 + bmax));
    }
    // weak duality at optimum: b'y == c'x, with complementary slackness
    double dual_obj = 0.0;
    for (std::size_t i = 0; i < lp.n_cons; ++i) dual_obj += lp.b[i] * sol.dual[i];
    REQUIRE_THAT(dual_obj, WithinAbs(sol.objective, 1e-6 * (1.0 + std::fabs(sol.objective))));
    for (std::size_t i = 0; i < lp.n_cons; ++i) {
        double slack = 0.0;
        for (std::size_t j = 0; j < lp.n_vars; ++j) slack += lp.a(i, j) * sol.x[j];
        slack -= lp.b[i];
        REQUIRE(std::fabs(sol.dual[i] * slack) <= 1e-5 * (1.0 + std::fabs(sol.objective)));
    }
}

}  // namespace

TEST_CASE("scalar bound") {
    auto lp = make_lp(1, 1, {1.0}, {1.0}, {5.0});
    auto sol = lp_solve(lp);
    check_optimal(lp, sol);
    CHECK_THAT(sol.x[0], WithinAbs(5.0, 1e-9));
    CHECK_THAT(sol.objective, WithinAbs(5.0, 1e-9));
}

TEST_CASE("two-variable crossing constraints") {
    auto lp = make_lp(2, 2, {1.0, 1.0}, {1.0, 0.5, 0.5, 1.0}, {2.0, 2.0});
    auto sol = lp_solve(lp);
    check_optimal(lp, sol);
    CHECK_THAT(sol.objective, WithinAbs(8.0 / 3.0, 1e-9));
    CHECK_THAT(sol.x[0], WithinAbs(4.0 / 3.0, 1e-8));
    CHECK_THAT(sol.x[1], WithinAbs(4.0 / 3.0, 1e-8));
}

TEST_CASE("duplicated degenerate rows") {
    auto lp = make_lp(2, 2, {1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}, {100.0, 100.0});
    auto sol = lp_solve(lp);
    check_optimal(lp, sol);
    CHECK_THAT(sol.objective, WithinAbs(100.0, 1e-9));
}

TEST_CASE("infeasible and unbounded detection") {
    // x >= 5 and -x >= 1 cannot hold together
    auto inf_lp = make_lp(2, 1, {1.0}, {1.0, -1.0}, {5.0, 1.0});
    CHECK(lp_solve(inf_lp).status == LpStatus::Infeasible);
    CHECK(detail::solve_two_phase(inf_lp).status == LpStatus::Infeasible);

    // min -x s.t. x >= 1 runs away
    auto unb_lp = make_lp(1, 1, {-1.0}, {1.0}, {1.0});
    CHECK(lp_solve(unb_lp).status == LpStatus::Unbounded);
}

TEST_CASE("solver matches vertex enumeration on random small LPs") {
    RngStream rng(71, 0);
    int solved = 0;
    // covering-style instances (c >= 0): the dual path
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 2 + rng.next_u64() % 4, m = 2 + rng.next_u64() % 4;
        std::vector<double> c(n), A(m * n), b(m);
        for (auto& v : c) v = 0.2 + rng.uniform();
        for (auto& v : A) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        for (auto& v : b) v = 0.5 + 2.0 * rng.uniform();
        auto lp = make_lp(m, n, c, A, b);
        auto oracle = nestlr_test::enumerate_vertices(lp);
        auto sol = lp_solve(lp);
        if (!oracle) {
            CHECK(sol.status == LpStatus::Infeasible);
            ++solved;
            continue;
        }
        check_optimal(lp, sol);
        CHECK_THAT(sol.objective, WithinAbs(oracle->first, 1e-6 * (1.0 + std::fabs(oracle->first))));
        // the general path must agree with the covering path
        auto sol2 = detail::solve_two_phase(lp);
        REQUIRE(sol2.status == LpStatus::Optimal);
        CHECK_THAT(sol2.objective, WithinAbs(sol.objective, 1e-7 * (1.0 + std::fabs(sol.objective))));
        ++solved;
    }
    // boxed instances with mixed-sign costs: the two-phase path
    for (int rep = 0; rep < 60; ++rep) {
        std::size_t n = 2 + rng.next_u64() % 3;
        std::size_t m_extra = 1 + rng.next_u64() % 3;
        std::size_t m = m_extra + n;  // box rows -x_j >= -U keep it bounded
        std::vector<double> c(n), A(m * n, 0.0), b(m);
        for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
        for (std::size_t i = 0; i < m_extra; ++i) {
            for (std::size_t j = 0; j < n; ++j) A[i * n + j] = 2.0 * rng.uniform() - 1.0;
            b[i] = 2.0 * rng.uniform() - 1.0;
        }
        for (std::size_t j = 0; j < n; ++j) {
            A[(m_extra + j) * n + j] = -1.0;
            b[m_extra + j] = -(1.0 + 4.0 * rng.uniform());
        }
        auto lp = make_lp(m, n, c, A, b);
        auto oracle = nestlr_test::enumerate_vertices(lp);
        auto sol = lp_solve(lp);
        if (!oracle) {
            CHECK(sol.status == LpStatus::Infeasible);
            ++solved;
            continue;
        }
        check_optimal(lp, sol);
        CHECK_THAT(sol.objective, WithinAbs(oracle->first, 1e-6 * (1.0 + std::fabs(oracle->first))));
        ++solved;
    }
    CHECK(solved >= 100);
}

TEST_CASE("objective never exceeds a caller-supplied feasible point") {
    RngStream rng(73, 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::size_t m = 3 + rng.next_u64() % 5;
        // design-like: unit diagonal, entries in (0,1], c = 1, b = N
        double N = 10.0 + 90.0 * rng.uniform();
        std::vector<double> A(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                A[i * m + j] = i == j ? 1.0 : std::exp(-3.0 * rng.uniform());
            }
        }
        auto lp = make_lp(m, m, std::vector<double>(m, 1.0), A, std::vector<double>(m, N));
        auto sol = lp_solve(lp);
        check_optimal(lp, sol);
        CHECK(sol.objective <= N * m + 1e-7);  // x = N*1 is feasible
    }
}

TEST_CASE("deterministic resolve") {
    auto lp = make_lp(2, 2, {1.0, 1.0}, {1.0, 0.25, 0.25, 1.0}, {3.0, 3.0});
    auto s1 = lp_solve(lp);
    auto s2 = lp_solve(lp);
    REQUIRE(s1.x.size() == s2.x.size());
    for (std::size_t j = 0; j < s1.x.size(); ++j) CHECK(s1.x[j] == s2.x[j]);
    CHECK(s1.iterations == s2.iterations);
}
