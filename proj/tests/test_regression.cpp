#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nestlr/regression.hpp"
#include "nestlr/rng.hpp"

using namespace nestlr;
using Catch::Matchers::WithinAbs;

TEST_CASE("intercept-only fit reproduces a constant") {
    std::size_t n = 25;
    std::vector<double> X(n * 3), y(n, 4.2);
    RngStream rng(91, 0);
    for (std::size_t i = 0; i < n; ++i) {
        X[i * 3 + 0] = 1.0;
        X[i * 3 + 1] = rng.normal();
        X[i * 3 + 2] = rng.normal();
    }
    auto beta = ols_fit(X, y, n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        double pred = beta[0] + beta[1] * X[i * 3 + 1] + beta[2] * X[i * 3 + 2];
        CHECK_THAT(pred, WithinAbs(4.2, 1e-10));
    }
}

TEST_CASE("noiseless linear target is recovered exactly") {
    std::size_t n = 40;
    std::vector<double> X(n * 2), y(n);
    RngStream rng(93, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double t = rng.uniform() * 10.0;
        X[i * 2 + 0] = 1.0;
        X[i * 2 + 1] = t;
        y[i] = 3.0 - 0.7 * t;
    }
    auto beta = ols_fit(X, y, n, 2);
    CHECK_THAT(beta[0], WithinAbs(3.0, 1e-8));
    CHECK_THAT(beta[1], WithinAbs(-0.7, 1e-8));
}

TEST_CASE("rank-deficient design matrix is rejected") {
    std::size_t n = 10;
    std::vector<double> X(n * 3), y(n);
    RngStream rng(95, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double t = rng.normal();
        X[i * 3 + 0] = 1.0;
        X[i * 3 + 1] = t;
        X[i * 3 + 2] = 2.0 * t;  // exact collinearity
        y[i] = t;
    }
    CHECK_THROWS(ols_fit(X, y, n, 3));
    CHECK_THROWS(ols_fit(X, y, 2, 3));  // n < p
}

TEST_CASE("laguerre values") {
    double l[4];
    laguerre4(1.0, l);
    CHECK(l[0] == 1.0);
    CHECK(l[1] == 0.0);
    CHECK_THAT(l[2], WithinAbs(-0.5, 1e-15));
    CHECK_THAT(l[3], WithinAbs(1.0 - 3.0 + 1.5 - 1.0 / 6.0, 1e-15));
}
