#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "nestlr/design.hpp"

using namespace nestlr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SecondMomentTable table_from(const std::vector<std::vector<double>>& rows) {
    SecondMomentTable t(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) t.at(i, j) = rows[i][j];
    }
    return t;
}

std::vector<Scenario> random_normal_scenarios(std::size_t m, RngStream& rng) {
    std::vector<Scenario> s(m);
    for (auto& sc : s) sc.theta = {3.0 * (rng.uniform() - 0.5)};
    return s;
}

}  // namespace

TEST_CASE("second moment table basics") {
    ExponentialFamilyModel normal(Family::normal_known_variance, 1, {1.0});

    auto t1 = compute_second_moments(normal, {Scenario{{0.4}}});
    CHECK(t1.size() == 1);
    CHECK(t1(0, 0) == 1.0);

    auto t2 = compute_second_moments(normal, {Scenario{{0.4}}, Scenario{{0.4}}});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK_THAT(t2(i, j), WithinAbs(1.0, 1e-14));

    auto t3 = compute_second_moments(normal, {Scenario{{0.0}}, Scenario{{1.0}}});
    CHECK(t3(0, 0) == 1.0);
    CHECK(t3(1, 1) == 1.0);
    CHECK_THAT(t3(0, 1), WithinRel(std::exp(1.0), 1e-12));
    CHECK_THAT(t3(1, 0), WithinRel(std::exp(1.0), 1e-12));
}

TEST_CASE("design LP construction") {
    auto iso = table_from({{1.0, kInf, kInf}, {kInf, 1.0, kInf}, {kInf, kInf, 1.0}});
    LinearProgram lp = build_design_lp(iso, 100.0);
    CHECK(lp.n_vars == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(lp.a(i, j) == (i == j ? 1.0 : 0.0));
        CHECK(lp.b[i] == 100.0);
    }
    auto sol = lp_solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK_THAT(sol.objective, WithinAbs(300.0, 1e-7));  // no pooling possible
    for (int j = 0; j < 3; ++j) CHECK_THAT(sol.x[j], WithinAbs(100.0, 1e-7));

    auto ones = table_from({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}});
    auto sol2 = lp_solve(build_design_lp(ones, 100.0));
    CHECK_THAT(sol2.objective, WithinAbs(100.0, 1e-7));  // perfect pooling
}

TEST_CASE("two-scenario optimum binds both constraints") {
    double e = std::exp(1.0);
    auto t = table_from({{1.0, e}, {e, 1.0}});
    LpSolution sol = lp_solve(build_design_lp(t, 1.0));
    REQUIRE(sol.status == LpStatus::Optimal);
    double expected = e / (1.0 + e);  // 0.7311 per variable
    CHECK_THAT(sol.x[0], WithinAbs(expected, 1e-9));
    CHECK_THAT(sol.x[1], WithinAbs(expected, 1e-9));
    CHECK_THAT(sol.objective, WithinAbs(2.0 * expected, 1e-9));

    DesignSolution d = solve_design(t, 100.0);
    auto ess = achieved_ess(d, t);
    CHECK_THAT(ess[0], WithinAbs(100.0, 1e-6));
    CHECK_THAT(ess[1], WithinAbs(100.0, 1e-6));
}

TEST_CASE("solve_design trivial cases") {
    auto t1 = table_from({{1.0}});
    DesignSolution d1 = solve_design(t1, 500.0);
    CHECK(d1.base_allocation[0] == 1.0);
    CHECK(d1.budget == 500);
    CHECK(d1.gamma_at(0, 0) == 1.0);

    auto ones = table_from({{1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1}});
    DesignSolution d2 = solve_design(ones, 100.0);
    CHECK(d2.budget == 100);
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += d2.gamma_at(i, j);
        CHECK_THAT(row, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("scaling identity: same c*, allocations scale exactly") {
    RngStream rng(311, 0);
    ExponentialFamilyModel normal(Family::normal_known_variance, 1, {1.0});
    for (int rep = 0; rep < 5; ++rep) {
        auto scen = random_normal_scenarios(6, rng);
        auto table = compute_second_moments(normal, scen);
        DesignSolution a = solve_design(table, 100.0);
        DesignSolution b = solve_design(table, 200.0);
        REQUIRE(a.base_allocation.size() == b.base_allocation.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            CHECK(a.base_allocation[j] == b.base_allocation[j]);  // bitwise
            CHECK(b.real_allocation[j] == 2.0 * a.real_allocation[j]);
            CHECK(a.gamma_at(0, j) == b.gamma_at(0, j));
        }
    }
}

TEST_CASE("pooling weight formula") {
    auto single = table_from({{1.0}});
    auto g1 = pooling_weights({1.0}, single);
    CHECK(g1[0] == 1.0);

    double a = 2.5;
    auto t = table_from({{1.0, a}, {a, 1.0}});
    auto g = pooling_weights({1.0, 1.0}, t);
    CHECK_THAT(g[0], WithinRel(a / (a + 1.0), 1e-12));
    CHECK_THAT(g[1], WithinRel(1.0 / (a + 1.0), 1e-12));

    // zero allocation forces a zero column
    auto gz = pooling_weights({1.0, 0.0}, t);
    CHECK(gz[0 * 2 + 1] == 0.0);
    CHECK(gz[1 * 2 + 1] == 0.0);
    CHECK(gz[0 * 2 + 0] == 1.0);

    CHECK_THROWS(pooling_weights({0.0, 0.0}, t));
}

TEST_CASE("gamma zero exactly on infinite-variance columns") {
    auto t = table_from({{1.0, 2.0, kInf}, {2.0, 1.0, 4.0}, {kInf, 4.0, 1.0}});
    DesignSolution d = solve_design(t, 50.0);
    for (std::size_t i = 0; i < 3; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            if (std::isinf(t(i, j)) || d.base_allocation[j] == 0.0) {
                CHECK(d.gamma_at(i, j) == 0.0);
            }
            row += d.gamma_at(i, j);
        }
        CHECK_THAT(row, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("delta floor lifts small positive allocations") {
    // optimum is c* = (1 - 1/1.05, 1): the first allocation is small positive
    auto t = table_from({{1.0, 1.05}, {kInf, 1.0}});
    DesignSolution d = solve_design(t, 100.0, 0.1);
    CHECK_THAT(d.base_allocation[0], WithinAbs(1.0 - 1.0 / 1.05, 1e-9));
    CHECK_THAT(d.base_allocation[1], WithinAbs(1.0, 1e-9));
    CHECK_THAT(d.real_allocation[0], WithinAbs(10.0, 1e-9));  // delta * N
    CHECK_THAT(d.real_allocation[1], WithinAbs(100.0, 1e-7));
    CHECK(d.integer_allocation[0] == 10);

    DesignSolution d2 = solve_design(t, 100.0, 1e-6);  // floor inactive
    CHECK_THAT(d2.real_allocation[0], WithinAbs(100.0 * (1.0 - 1.0 / 1.05), 1e-7));
}

TEST_CASE("achieved ESS meets the target on random instances") {
    RngStream rng(313, 0);
    ExponentialFamilyModel normal(Family::normal_known_variance, 1, {1.0});
    for (int rep = 0; rep < 10; ++rep) {
        std::size_t m = 3 + rng.next_u64() % 10;
        auto scen = random_normal_scenarios(m, rng);
        auto table = compute_second_moments(normal, scen);
        double target = 10.0 + 490.0 * rng.uniform();
        DesignSolution d = solve_design(table, target);
        auto ess = achieved_ess(d, table);
        for (double e : ess) CHECK(e >= target - 1e-6);
        CHECK(d.budget <= static_cast<std::size_t>(m * std::ceil(target)) + m);
        double row_worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < m; ++j) row += d.gamma_at(i, j);
            row_worst = std::max(row_worst, std::fabs(row - 1.0));
        }
        CHECK(row_worst <= 1e-12);
    }
}

TEST_CASE("adding a scenario keeps the budget within the trivial bound") {
    RngStream rng(317, 0);
    ExponentialFamilyModel normal(Family::normal_known_variance, 1, {1.0});
    auto scen = random_normal_scenarios(5, rng);
    double target = 100.0;
    for (std::size_t grow = 0; grow < 4; ++grow) {
        auto table = compute_second_moments(normal, scen);
        DesignSolution d = solve_design(table, target);
        CHECK(static_cast<double>(d.budget) <=
              static_cast<double>(scen.size()) * target + scen.size());
        scen.push_back(Scenario{{3.0 * (rng.uniform() - 0.5)}});
    }
}
