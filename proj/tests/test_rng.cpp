#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "nestlr/rng.hpp"

using namespace nestlr;

TEST_CASE("streams are deterministic and distinct") {
    RngStream a(42, stream_id(3, 7));
    RngStream b(42, stream_id(3, 7));
    RngStream c(42, stream_id(3, 8));
    bool same = true, differs = false;
    for (int i = 0; i < 64; ++i) {
        auto va = a.next_u64();
        same = same && va == b.next_u64();
        differs = differs || va != c.next_u64();
    }
    CHECK(same);
    CHECK(differs);
}

TEST_CASE("uniform range and mean") {
    RngStream rng(1, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK_THAT(sum / n, Catch::Matchers::WithinAbs(0.5, 4.0 / std::sqrt(12.0 * n)));
}

TEST_CASE("normal moments") {
    RngStream rng(2, 0);
    const int n = 400000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    CHECK_THAT(s / n, Catch::Matchers::WithinAbs(0.0, 4.0 / std::sqrt((double)n)));
    CHECK_THAT(s2 / n, Catch::Matchers::WithinAbs(1.0, 4.0 * std::sqrt(2.0 / n)));
}

TEST_CASE("poisson mean/variance on both sampler branches") {
    for (double lambda : {5.0, 40.0}) {
        RngStream rng(3, (std::uint64_t)lambda);
        const int n = 400000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double x = rng.poisson(lambda);
            s += x;
            s2 += x * x;
        }
        double mean = s / n, var = s2 / n - mean * mean;
        CHECK_THAT(mean, Catch::Matchers::WithinAbs(lambda, 4.0 * std::sqrt(lambda / n)));
        CHECK_THAT(var / lambda, Catch::Matchers::WithinAbs(1.0, 0.05));
    }
}

TEST_CASE("gamma moments incl. shape below one") {
    struct Case {
        double shape, rate;
    };
    for (Case c : {Case{5.0, 2.0}, Case{0.4, 1.0}, Case{350.0, 60.0}}) {
        RngStream rng(4, (std::uint64_t)(c.shape * 100));
        const int n = 300000;
        double s = 0, s2 = 0;
        for (int i = 0; i < n; ++i) {
            double x = rng.gamma(c.shape, c.rate);
            s += x;
            s2 += x * x;
        }
        double mean = s / n, var = s2 / n - mean * mean;
        double tmean = c.shape / c.rate, tvar = c.shape / (c.rate * c.rate);
        CHECK_THAT(mean, Catch::Matchers::WithinAbs(tmean, 5.0 * std::sqrt(tvar / n)));
        CHECK_THAT(var / tvar, Catch::Matchers::WithinAbs(1.0, 0.06));
    }
}

TEST_CASE("exponential mean") {
    RngStream rng(5, 0);
    const int n = 200000;
    double s = 0;
    for (int i = 0; i < n; ++i) s += rng.exponential(3.0);
    CHECK_THAT(s / n, Catch::Matchers::WithinAbs(1.0 / 3.0, 4.0 / (3.0 * std::sqrt((double)n))));
    CHECK_THROWS(rng.exponential(0.0));
}
