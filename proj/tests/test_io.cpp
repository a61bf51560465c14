#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nestlr/config.hpp"
#include "nestlr/estimators.hpp"
#include "nestlr/io.hpp"

using namespace nestlr;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

#ifdef NESTLR_CLI_PATH
int run_cli(const std::string& args) {
    std::string cmd = std::string(NESTLR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}
#endif

}  // namespace

TEST_CASE("config validation") {
    CHECK_NOTHROW(parse_config(json::object()));
    CHECK_THROWS_AS(parse_config(json{{"bogus_key", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"problem", "nonsense"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"delta", 1.5}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"straddle", {{"unknown", 1}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"problem", "custom"}}), ConfigError);  // missing model

    json custom = {{"problem", "custom"},
                   {"target_N", 50},
                   {"model", {{"family", "normal"}, {"dim", 1}, {"hyper", {{"variance", 1.0}}}}},
                   {"scenarios", {{0.0}, {1.0}}},
                   {"g", {{"kind", "constant"}, {"value", 3.0}}}};
    ExperimentConfig cfg = parse_config(custom);
    CHECK(cfg.custom_scenarios.size() == 2);
    CHECK(cfg.m_scenarios == 2);
    CHECK(cfg.hash() == parse_config(custom).hash());
}

TEST_CASE("design JSON round trip") {
    ExponentialFamilyModel normal(Family::normal_known_variance, 1, {1.0});
    std::vector<Scenario> scen = {Scenario{{0.0}}, Scenario{{0.8}}, Scenario{{2.5}}};
    auto table = compute_second_moments(normal, scen);
    DesignSolution d = solve_design(table, 123.0);
    json j = design_to_json(d);
    DesignSolution back = design_from_json(j);
    CHECK(back.budget == d.budget);
    CHECK(back.base_allocation == d.base_allocation);
    CHECK(back.real_allocation == d.real_allocation);
    CHECK(back.integer_allocation == d.integer_allocation);
    CHECK(back.gamma == d.gamma);
    CHECK(back.target_n == d.target_n);
}

TEST_CASE("pool CSV round trip") {
    ExponentialFamilyModel pois(Family::poisson, 2);
    std::vector<Scenario> scen = {Scenario{{4.0, 6.0}}, Scenario{{5.0, 5.5}}};
    auto table = compute_second_moments(pois, scen);
    DesignSolution d = solve_design(table, 20.0);
    OutputFn g = [](const InputSample& x) { return x[0] + 2.0 * x[1]; };
    ReplicationPool pool = simulate_pool(pois, scen, d, g, 77, 0);

    std::stringstream ss;
    pool_to_csv(pool, ss);
    ReplicationPool back = pool_from_csv(ss, 2, 2);
    for (int j = 0; j < 2; ++j) {
        CHECK(back.pools[j].n_reps == pool.pools[j].n_reps);
        CHECK(back.pools[j].inputs == pool.pools[j].inputs);
        CHECK(back.pools[j].outputs == pool.pools[j].outputs);
    }
}

TEST_CASE("fmt round trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.6789, -0.0, 2148.0}) {
        CHECK(std::stod(fmt(v)) == v);
    }
}

#ifdef NESTLR_CLI_PATH
TEST_CASE("cli end to end") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "nestlr_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    json custom = {{"problem", "custom"},
                   {"target_N", 30},
                   {"seed", 4242},
                   {"out_dir", dir.string()},
                   {"model", {{"family", "normal"}, {"dim", 1}, {"hyper", {{"variance", 1.0}}}}},
                   {"scenarios", {{-0.5}, {0.0}, {0.5}}},
                   {"g", {{"kind", "constant"}, {"value", 3.0}}}};
    std::ofstream(dir / "cfg.json") << custom.dump();

    SECTION("design and estimate succeed, constants propagate") {
        REQUIRE(run_cli("design --config " + (dir / "cfg.json").string()) == 0);
        REQUIRE(fs::exists(dir / "design.json"));
        REQUIRE(run_cli("estimate --config " + (dir / "cfg.json").string() + " --design " +
                        (dir / "design.json").string()) == 0);
        std::string first = slurp((dir / "estimate.csv").string());
        // g == 3: quantile is 3, hockey stick at threshold 49 is 0, squared is 46^2
        CHECK(first.find("quantile,3") != std::string::npos);
        CHECK(first.find("hockey_stick,0") != std::string::npos);
        CHECK(first.find("squared,2116") != std::string::npos);
        REQUIRE(run_cli("estimate --config " + (dir / "cfg.json").string()) == 0);
        CHECK(slurp((dir / "estimate.csv").string()) == first);  // byte-identical rerun
    }

    SECTION("exit code 2 on config trouble") {
        std::ofstream(dir / "bad.json") << "{\"bogus\": 1}";
        CHECK(run_cli("design --config " + (dir / "bad.json").string()) == 2);
        CHECK(run_cli("design --config " + (dir / "missing.json").string()) == 2);
        CHECK(run_cli("reproduce nonsense-study") == 2);
    }

    SECTION("default straddle estimate lands near the reference quantile") {
        fs::path out = dir / "erm";
        REQUIRE(run_cli("estimate --out " + out.string()) == 0);
        json est;
        std::ifstream(out / "estimate.json") >> est;
        double q = est.at("quantile").get<double>();
        CHECK(q >= 44.0);
        CHECK(q <= 54.0);
        CHECK(est.at("budget").get<std::size_t>() == 2148);
    }

    SECTION("single-scenario budget equals target N") {
        json one = custom;
        one["scenarios"] = {{0.0}};
        std::ofstream(dir / "one.json") << one.dump();
        REQUIRE(run_cli("design --config " + (dir / "one.json").string()) == 0);
        json d;
        std::ifstream(dir / "design.json") >> d;
        CHECK(d.at("budget").get<std::size_t>() == 30);
    }
}
#endif
