#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nestlr/io.hpp"
#include "nestlr/newsvendor.hpp"
#include "nestlr/straddle.hpp"

namespace nestlr {

// Built-in output functions for custom exponential-family problems.
struct CustomOutput {
    enum class Kind { sum, sum_squares, constant } kind = Kind::sum;
    double value = 0.0;  // for constant

    double operator()(const InputSample& x) const {
        switch (kind) {
            case Kind::sum: {
                double acc = 0.0;
                for (double v : x) acc += v;
                return acc;
            }
            case Kind::sum_squares: {
                double acc = 0.0;
                for (double v : x) acc += v * v;
                return acc;
            }
            case Kind::constant: return value;
        }
        return 0.0;
    }
};

struct ExperimentConfig {
    std::string problem = "erm-straddle";  // erm-straddle | newsvendor | custom
    std::size_t m_scenarios = 1000;
    std::size_t target_n = 1000;
    double delta = 1e-6;
    std::uint64_t seed = 20240901;
    std::size_t n_macro = 200;
    std::size_t oracle_size = 1000000;
    std::size_t test_size = 100000;
    std::string out_dir = ".";
    bool paper_compat = true;
    double alpha = 0.99;
    double threshold = 49.0;

    StraddleConfig straddle;
    NewsvendorConfig newsvendor;

    // custom problem
    Family custom_family = Family::normal_known_variance;
    std::size_t custom_dim = 1;
    std::vector<double> custom_variance;
    std::vector<Scenario> custom_scenarios;
    CustomOutput custom_g;

    json effective;  // canonical settings snapshot for provenance

    std::uint64_t hash() const { return fnv1a(effective.dump()); }
};

inline Family family_from_string(const std::string& s) {
    if (s == "normal") return Family::normal_known_variance;
    if (s == "lognormal") return Family::lognormal_known_logvar;
    if (s == "poisson") return Family::poisson;
    if (s == "exponential") return Family::exponential;
    throw ConfigError("unknown family '" + s + "'");
}

inline ExperimentConfig parse_config(const json& j) {
    reject_unknown_keys(j,
                        {"problem", "M", "target_N", "delta", "seed", "n_macro", "oracle_size",
                         "test_size", "out_dir", "paper_compat", "alpha", "threshold",
                         "straddle", "newsvendor", "model", "scenarios", "g"},
                        "config");
    ExperimentConfig cfg;
    if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
    if (cfg.problem != "erm-straddle" && cfg.problem != "newsvendor" && cfg.problem != "custom") {
        throw ConfigError("unknown problem '" + cfg.problem + "'");
    }
    auto get = [&](const char* key, auto& slot) {
        if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    get("M", cfg.m_scenarios);
    get("target_N", cfg.target_n);
    get("delta", cfg.delta);
    get("seed", cfg.seed);
    get("n_macro", cfg.n_macro);
    get("oracle_size", cfg.oracle_size);
    get("test_size", cfg.test_size);
    get("out_dir", cfg.out_dir);
    get("paper_compat", cfg.paper_compat);
    get("alpha", cfg.alpha);
    get("threshold", cfg.threshold);
    if (cfg.m_scenarios == 0) throw ConfigError("M must be positive");
    if (cfg.target_n == 0) throw ConfigError("target_N must be positive");
    if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must be in [0,1)");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");

    if (j.contains("straddle")) {
        const json& s = j.at("straddle");
        reject_unknown_keys(
            s, {"s0", "drift", "sigma", "rate", "maturity", "strike", "horizon"}, "straddle");
        auto gs = [&](const char* key, double& slot) {
            if (s.contains(key)) slot = s.at(key).get<double>();
        };
        gs("s0", cfg.straddle.s0);
        gs("drift", cfg.straddle.drift);
        gs("sigma", cfg.straddle.sigma);
        gs("rate", cfg.straddle.rate);
        gs("maturity", cfg.straddle.maturity);
        gs("strike", cfg.straddle.strike);
        gs("horizon", cfg.straddle.horizon);
    }
    cfg.straddle.m_scenarios = cfg.m_scenarios;
    cfg.straddle.paper_compat = cfg.paper_compat;
    cfg.straddle.validate();

    if (j.contains("newsvendor")) {
        const json& s = j.at("newsvendor");
        reject_unknown_keys(s, {"n_products", "prior_shape", "prior_rate"}, "newsvendor");
        if (s.contains("n_products")) cfg.newsvendor.n_products = s.at("n_products").get<std::size_t>();
        if (s.contains("prior_shape")) cfg.newsvendor.prior_shape = s.at("prior_shape").get<double>();
        if (s.contains("prior_rate")) cfg.newsvendor.prior_rate = s.at("prior_rate").get<double>();
    }
    cfg.newsvendor.m_scenarios = cfg.m_scenarios;
    cfg.newsvendor.validate();

    if (cfg.problem == "custom") {
        if (!j.contains("model") || !j.contains("scenarios")) {
            throw ConfigError("custom problem requires 'model' and 'scenarios'");
        }
        const json& mj = j.at("model");
        reject_unknown_keys(mj, {"family", "dim", "hyper"}, "model");
        cfg.custom_family = family_from_string(mj.at("family").get<std::string>());
        cfg.custom_dim = mj.at("dim").get<std::size_t>();
        if (mj.contains("hyper")) {
            const json& h = mj.at("hyper");
            reject_unknown_keys(h, {"variance"}, "model.hyper");
            if (h.contains("variance")) {
                if (h.at("variance").is_array()) {
                    cfg.custom_variance = h.at("variance").get<std::vector<double>>();
                } else {
                    cfg.custom_variance = {h.at("variance").get<double>()};
                }
            }
        }
        for (const auto& row : j.at("scenarios")) {
            Scenario s;
            s.theta = row.get<std::vector<double>>();
            if (s.theta.size() != cfg.custom_dim) {
                throw ConfigError("scenario dimension does not match model dim");
            }
            cfg.custom_scenarios.push_back(std::move(s));
        }
        if (cfg.custom_scenarios.size() != cfg.m_scenarios) cfg.m_scenarios = cfg.custom_scenarios.size();
        if (j.contains("g")) {
            const json& gj = j.at("g");
            reject_unknown_keys(gj, {"kind", "value"}, "g");
            std::string kind = gj.at("kind").get<std::string>();
            if (kind == "sum") cfg.custom_g.kind = CustomOutput::Kind::sum;
            else if (kind == "sum_squares") cfg.custom_g.kind = CustomOutput::Kind::sum_squares;
            else if (kind == "constant") {
                cfg.custom_g.kind = CustomOutput::Kind::constant;
                cfg.custom_g.value = gj.at("value").get<double>();
            } else {
                throw ConfigError("unknown g kind '" + kind + "'");
            }
        }
    }

    json eff;
    eff["problem"] = cfg.problem;
    eff["M"] = cfg.m_scenarios;
    eff["target_N"] = cfg.target_n;
    eff["delta"] = cfg.delta;
    eff["n_macro"] = cfg.n_macro;
    eff["oracle_size"] = cfg.oracle_size;
    eff["test_size"] = cfg.test_size;
    eff["paper_compat"] = cfg.paper_compat;
    eff["alpha"] = cfg.alpha;
    eff["threshold"] = cfg.threshold;
    eff["straddle"] = {{"s0", cfg.straddle.s0},       {"drift", cfg.straddle.drift},
                       {"sigma", cfg.straddle.sigma}, {"rate", cfg.straddle.rate},
                       {"maturity", cfg.straddle.maturity}, {"strike", cfg.straddle.strike},
                       {"horizon", cfg.straddle.horizon}};
    eff["newsvendor"] = {{"n_products", cfg.newsvendor.n_products},
                         {"prior_shape", cfg.newsvendor.prior_shape},
                         {"prior_rate", cfg.newsvendor.prior_rate}};
    cfg.effective = std::move(eff);
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace nestlr
