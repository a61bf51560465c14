#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestlr/design.hpp"
#include "nestlr/estimators.hpp"
#include "nestlr/newsvendor.hpp"
#include "nestlr/parallel.hpp"
#include "nestlr/regression.hpp"
#include "nestlr/straddle.hpp"

namespace nestlr {

enum class DesignKind { optimal, standard, standard_plus, regression };

inline const char* design_name(DesignKind k) {
    switch (k) {
        case DesignKind::optimal: return "optimal";
        case DesignKind::standard: return "standard";
        case DesignKind::standard_plus: return "standard_plus";
        case DesignKind::regression: return "regression";
    }
    return "?";
}

inline std::size_t ceil_guarded(double v) {
    return static_cast<std::size_t>(std::ceil(v - 1e-9 * std::max(1.0, std::fabs(v))));
}

// Budget-matched standard nested simulation: M = ceil(G^{2/3}), N = ceil(G^{1/3}).
inline std::pair<std::size_t, std::size_t> standard_design(std::size_t budget) {
    if (budget < 1) throw std::invalid_argument("standard_design: budget must be >= 1");
    double y = std::cbrt(static_cast<double>(budget));
    return {ceil_guarded(y * y), ceil_guarded(y)};
}

// ---------------------------------------------------------------------------
// ERM straddle study (Table 1 / Figures 1-3 data)
// ---------------------------------------------------------------------------

struct MacroStudyCell {
    double mse = 0.0;
    double bias2 = 0.0;
    double variance = 0.0;
};

struct MacroStudyReport {
    std::vector<std::string> measures;                  // measure names
    std::array<double, 4> truth{};                      // oracle statistic values
    std::map<DesignKind, std::array<MacroStudyCell, 4>> cells;
    std::size_t m_scenarios = 0;
    std::size_t n_macro = 0;
    std::uint64_t seed = 0;
    std::size_t optimal_budget = 0;   // Gamma
    std::size_t standard_m = 0, standard_n = 0;

    void check_identity() const {
        for (const auto& [k, row] : cells) {
            for (const auto& c : row) {
                double lhs = c.mse, rhs = c.bias2 + c.variance;
                if (std::fabs(lhs - rhs) > 1e-9 * (1.0 + std::fabs(lhs))) {
                    throw std::logic_error("macro report: mse != bias^2 + variance");
                }
            }
        }
    }
};

// Per-scenario 2.5%/97.5% estimate quantiles over macro runs (Figure 2/3 data).
struct ConfidenceBands {
    std::vector<double> scenario;  // S_tau grid
    std::map<DesignKind, std::vector<double>> lo, hi;
};

namespace detail {

inline std::array<double, 4> erm_statistics(const std::vector<double>& mu, double alpha,
                                            double xi) {
    return {empirical_quantile(mu, alpha),
            nested_expectation(mu, {RiskFunctional::Kind::indicator_exceedance, xi}),
            nested_expectation(mu, {RiskFunctional::Kind::hockey_stick, xi}),
            nested_expectation(mu, {RiskFunctional::Kind::squared, xi})};
}

// Streams follow the macro*2^32 + scenario scheme under a per-design sub-seed.
inline std::vector<double> erm_mc_means(const StraddleConfig& cfg,
                                        const std::vector<double>& prices, std::size_t n_reps,
                                        std::uint64_t seed, std::uint64_t macro) {
    std::vector<double> mu(prices.size());
    double sd = std::sqrt(cfg.inner_logvar());
    parallel_for(prices.size(), [&](std::size_t j) {
        RngStream rng(seed, stream_id(macro, j));
        double mj = cfg.inner_mean(prices[j]);
        double acc = 0.0;
        for (std::size_t k = 0; k < n_reps; ++k) {
            acc += straddle_payoff(cfg, std::exp(mj + sd * rng.normal()));
        }
        mu[j] = acc / static_cast<double>(n_reps);
    });
    return mu;
}

inline std::vector<double> erm_regression_predict(const StraddleConfig& cfg,
                                                  std::size_t n_points,
                                                  const std::vector<double>& eval_prices,
                                                  std::uint64_t seed, std::uint64_t macro) {
    StraddleConfig dcfg = cfg;
    dcfg.m_scenarios = n_points;
    std::vector<double> design_prices = straddle_outer_scenarios(dcfg);
    std::vector<double> y(n_points);
    double sd = std::sqrt(cfg.inner_logvar());
    parallel_for(n_points, [&](std::size_t j) {
        RngStream rng(seed, stream_id(macro, j));
        y[j] = straddle_payoff(cfg, std::exp(cfg.inner_mean(design_prices[j]) + sd * rng.normal()));
    });
    const std::size_t p = 5;
    std::vector<double> X(n_points * p);
    for (std::size_t j = 0; j < n_points; ++j) {
        auto f = straddle_features(cfg, design_prices[j]);
        std::copy(f.begin(), f.end(), X.begin() + j * p);
    }
    std::vector<double> beta = ols_fit(std::move(X), std::move(y), n_points, p);
    std::vector<double> pred(eval_prices.size());
    for (std::size_t i = 0; i < eval_prices.size(); ++i) {
        pred[i] = dot(straddle_features(cfg, eval_prices[i]), beta);
    }
    return pred;
}

}  // namespace detail

struct ErmStudyOptions {
    double alpha = 0.99;
    double threshold = 49.0;
    std::size_t oracle_size = 1000000;
    std::vector<DesignKind> designs = {DesignKind::optimal, DesignKind::standard,
                                       DesignKind::standard_plus, DesignKind::regression};
    bool collect_bands = false;
};

struct ErmStudyResult {
    MacroStudyReport report;
    ConfidenceBands bands;
};

inline ErmStudyResult run_macro_study(const StraddleConfig& cfg, std::size_t n_macro,
                                      std::uint64_t seed, const ErmStudyOptions& opt = {}) {
    cfg.validate();
    if (n_macro < 2) throw std::invalid_argument("run_macro_study: need n_macro >= 2");
    const std::size_t m = cfg.m_scenarios;
    const std::size_t target_n = m;  // N = M, the rate-optimal coupling

    std::vector<double> prices = straddle_outer_scenarios(cfg);
    std::vector<Scenario> inner(m);
    for (std::size_t i = 0; i < m; ++i) inner[i] = straddle_inner_scenario(cfg, prices[i]);

    ExponentialFamilyModel model = straddle_inner_model(cfg);
    SecondMomentTable table = compute_second_moments(straddle_table_model(cfg), inner);
    DesignSolution design = solve_design(table, static_cast<double>(target_n));

    auto [m_std, n_std] = standard_design(design.budget);
    StraddleConfig std_cfg = cfg;
    std_cfg.m_scenarios = m_std;
    std::vector<double> std_prices = straddle_outer_scenarios(std_cfg);

    // Oracle truth from analytic mu(theta) draws.
    std::array<double, 4> truth;
    {
        RngStream rng(derive_seed(seed, "oracle"), 0);
        double mu_ln = std::log(cfg.s0) + (cfg.drift - 0.5 * cfg.sigma * cfg.sigma) * cfg.horizon;
        double sd_ln = cfg.sigma * std::sqrt(cfg.horizon);
        std::vector<double> mu(opt.oracle_size);
        for (auto& v : mu) v = straddle_true_mu(cfg, std::exp(mu_ln + sd_ln * rng.normal()));
        truth = detail::erm_statistics(mu, opt.alpha, opt.threshold);
    }

    OutputFn g = [&cfg](const InputSample& x) { return straddle_payoff(cfg, x[0]); };
    std::map<DesignKind, std::vector<std::array<double, 4>>> ests;
    for (DesignKind k : opt.designs) ests[k].resize(n_macro);

    bool bands_on = opt.collect_bands;
    std::map<DesignKind, std::vector<std::vector<double>>> band_samples;
    if (bands_on) {
        for (DesignKind k : opt.designs) {
            if (k != DesignKind::standard) band_samples[k].assign(m, std::vector<double>());
        }
    }

    for (std::size_t mr = 0; mr < n_macro; ++mr) {
        for (DesignKind k : opt.designs) {
            std::vector<double> mu;
            switch (k) {
                case DesignKind::optimal: {
                    ReplicationPool pool = simulate_pool(model, inner, design, g,
                                                         derive_seed(seed, "optimal"), mr);
                    mu = pooled_conditional_means(pool, design, model, inner).mu_star;
                    break;
                }
                case DesignKind::standard:
                    mu = detail::erm_mc_means(cfg, std_prices, n_std,
                                              derive_seed(seed, "standard"), mr);
                    break;
                case DesignKind::standard_plus:
                    mu = detail::erm_mc_means(cfg, prices, target_n,
                                              derive_seed(seed, "standard_plus"), mr);
                    break;
                case DesignKind::regression:
                    mu = detail::erm_regression_predict(cfg, design.budget, prices,
                                                        derive_seed(seed, "regression"), mr);
                    break;
            }
            ests[k][mr] = detail::erm_statistics(mu, opt.alpha, opt.threshold);
            if (bands_on && k != DesignKind::standard) {
                for (std::size_t i = 0; i < m; ++i) band_samples[k][i].push_back(mu[i]);
            }
        }
    }

    ErmStudyResult res;
    res.report.measures = {"quantile", "indicator", "hockey_stick", "squared"};
    res.report.truth = truth;
    res.report.m_scenarios = m;
    res.report.n_macro = n_macro;
    res.report.seed = seed;
    res.report.optimal_budget = design.budget;
    res.report.standard_m = m_std;
    res.report.standard_n = n_std;
    for (DesignKind k : opt.designs) {
        std::array<MacroStudyCell, 4> row;
        for (std::size_t q = 0; q < 4; ++q) {
            double mean = 0.0, mse = 0.0;
            for (std::size_t mr = 0; mr < n_macro; ++mr) mean += ests[k][mr][q];
            mean /= static_cast<double>(n_macro);
            double var = 0.0;
            for (std::size_t mr = 0; mr < n_macro; ++mr) {
                double e = ests[k][mr][q];
                mse += (e - truth[q]) * (e - truth[q]);
                var += (e - mean) * (e - mean);
            }
            row[q].mse = mse / static_cast<double>(n_macro);
            row[q].variance = var / static_cast<double>(n_macro);
            row[q].bias2 = (mean - truth[q]) * (mean - truth[q]);
        }
        res.report.cells[k] = row;
    }

    if (bands_on) {
        res.bands.scenario = prices;
        for (auto& [k, samples] : band_samples) {
            auto& lo = res.bands.lo[k];
            auto& hi = res.bands.hi[k];
            lo.resize(m);
            hi.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                lo[i] = empirical_quantile(samples[i], 0.025);
                hi[i] = empirical_quantile(samples[i], 0.975);
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Newsvendor IUQ studies (Table 2 / Figure 4 data)
// ---------------------------------------------------------------------------

struct CrIReport {
    std::vector<double> levels = {0.90, 0.95, 0.99};
    struct Row {
        std::array<double, 3> coverage{}, coverage_se{}, width{}, width_se{};
    };
    std::map<std::string, Row> rows;  // oracle, optimal, standard, standard_plus, regression
    std::size_t n_macro = 0;
    std::uint64_t seed = 0;
    double mean_budget = 0.0;
    double budget_se = 0.0;
};

struct CoverageOptions {
    std::size_t target_n = 1000;
    std::size_t test_size = 100000;
    bool include_standard_plus = true;
    bool include_regression = true;
};

namespace detail {

inline std::pair<double, double> cri_bounds(const std::vector<double>& vals, double level) {
    double a = 0.5 * (1.0 - level);
    return {empirical_quantile(vals, a), empirical_quantile(vals, 1.0 - a)};
}

inline std::vector<double> nv_mc_means(const NewsvendorConfig& cfg,
                                       const std::vector<Scenario>& scenarios,
                                       std::size_t n_reps, std::uint64_t seed,
                                       std::uint64_t macro,
                                       std::vector<double>* var_g = nullptr) {
    std::vector<double> mu(scenarios.size());
    if (var_g) var_g->assign(scenarios.size(), 0.0);
    parallel_for(scenarios.size(), [&](std::size_t j) {
        RngStream rng(seed, stream_id(macro, j));
        double acc = 0.0, acc2 = 0.0;
        for (std::size_t k = 0; k < n_reps; ++k) {
            double profit = 0.0;
            for (std::size_t l = 0; l < cfg.n_products; ++l) {
                double x = static_cast<double>(rng.poisson(scenarios[j][l]));
                profit += cfg.price(l) * std::min(x, static_cast<double>(cfg.stock(l))) -
                          cfg.cost(l) * cfg.stock(l);
            }
            acc += profit;
            acc2 += profit * profit;
        }
        double mean = acc / static_cast<double>(n_reps);
        mu[j] = mean;
        if (var_g) {
            (*var_g)[j] = (acc2 - static_cast<double>(n_reps) * mean * mean) /
                          (static_cast<double>(n_reps) - 1.0);
        }
    });
    return mu;
}

inline std::vector<double> nv_regression_predict(const NewsvendorConfig& cfg,
                                                 const PosteriorParams& post,
                                                 std::size_t n_points,
                                                 const std::vector<Scenario>& eval,
                                                 std::uint64_t seed, std::uint64_t macro) {
    RngStream scen_rng(derive_seed(seed, "design-points"), macro);
    std::vector<Scenario> pts = posterior_sample(cfg, post, n_points, scen_rng);
    std::vector<double> y(n_points);
    parallel_for(n_points, [&](std::size_t j) {
        RngStream rng(seed, stream_id(macro, j));
        double profit = 0.0;
        for (std::size_t l = 0; l < cfg.n_products; ++l) {
            double x = static_cast<double>(rng.poisson(pts[j][l]));
            profit += cfg.price(l) * std::min(x, static_cast<double>(cfg.stock(l))) -
                      cfg.cost(l) * cfg.stock(l);
        }
        y[j] = profit;
    });
    const std::size_t p = 1 + 2 * cfg.n_products;
    std::vector<double> X(n_points * p);
    for (std::size_t j = 0; j < n_points; ++j) {
        auto f = newsvendor_features(cfg, pts[j]);
        std::copy(f.begin(), f.end(), X.begin() + j * p);
    }
    std::vector<double> beta = ols_fit(std::move(X), std::move(y), n_points, p);
    std::vector<double> pred(eval.size());
    for (std::size_t i = 0; i < eval.size(); ++i) {
        pred[i] = dot(newsvendor_features(cfg, eval[i]), beta);
    }
    return pred;
}

struct NvOptimalRun {
    DesignSolution design;
    std::vector<double> mu_star;
};

inline NvOptimalRun nv_optimal_run(const NewsvendorConfig& cfg,
                                   const ExponentialFamilyModel& model,
                                   const std::vector<Scenario>& scenarios, std::size_t target_n,
                                   std::uint64_t seed, std::uint64_t macro) {
    SecondMomentTable table = compute_second_moments(model, scenarios);
    NvOptimalRun run{solve_design(table, static_cast<double>(target_n)), {}};
    OutputFn g = [&cfg](const InputSample& x) { return newsvendor_profit(cfg, x); };
    ReplicationPool pool =
        simulate_pool(model, scenarios, run.design, g, derive_seed(seed, "optpool"), macro);
    run.mu_star = pooled_conditional_means(pool, run.design, model, scenarios).mu_star;
    return run;
}

}  // namespace detail

inline CrIReport coverage_study(const NewsvendorConfig& cfg, std::size_t n_macro,
                                std::uint64_t seed, const CoverageOptions& opt = {}) {
    cfg.validate();
    if (n_macro < 2) throw std::invalid_argument("coverage_study: need n_macro >= 2");
    const std::size_t m = cfg.m_scenarios;
    ExponentialFamilyModel model = newsvendor_model(cfg);

    std::vector<std::string> keys = {"oracle", "optimal", "standard"};
    if (opt.include_standard_plus) keys.push_back("standard_plus");
    if (opt.include_regression) keys.push_back("regression");

    const std::size_t n_lv = 3;
    std::map<std::string, std::vector<std::array<double, 3>>> cov, wid;
    for (const auto& k : keys) {
        cov[k].resize(n_macro);
        wid[k].resize(n_macro);
    }
    std::vector<double> budgets(n_macro);
    CrIReport rep;

    for (std::size_t mr = 0; mr < n_macro; ++mr) {
        RngStream data_rng(derive_seed(seed, "data"), mr);
        auto data = newsvendor_draw_data(cfg, data_rng);
        PosteriorParams post = newsvendor_posterior(cfg, data);

        RngStream scen_rng(derive_seed(seed, "scenarios"), mr);
        std::vector<Scenario> scenarios = posterior_sample(cfg, post, m, scen_rng);

        detail::NvOptimalRun run =
            detail::nv_optimal_run(cfg, model, scenarios, opt.target_n, seed, mr);
        budgets[mr] = static_cast<double>(run.design.budget);

        std::map<std::string, std::vector<double>> values;
        values["oracle"].resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            values["oracle"][i] = newsvendor_true_mu(cfg, scenarios[i]);
        }
        values["optimal"] = run.mu_star;
        {
            auto [m_std, n_std] = standard_design(run.design.budget);
            RngStream std_rng(derive_seed(seed, "std-scenarios"), mr);
            std::vector<Scenario> std_scen = posterior_sample(cfg, post, m_std, std_rng);
            values["standard"] =
                detail::nv_mc_means(cfg, std_scen, n_std, derive_seed(seed, "std-pool"), mr);
        }
        if (opt.include_standard_plus) {
            values["standard_plus"] = detail::nv_mc_means(cfg, scenarios, opt.target_n,
                                                          derive_seed(seed, "stdp-pool"), mr);
        }
        if (opt.include_regression) {
            values["regression"] = detail::nv_regression_predict(
                cfg, post, run.design.budget, scenarios, derive_seed(seed, "reg-pool"), mr);
        }

        RngStream test_rng(derive_seed(seed, "test"), mr);
        std::vector<Scenario> test_scen = posterior_sample(cfg, post, opt.test_size, test_rng);
        std::vector<double> test_mu(opt.test_size);
        parallel_for(opt.test_size, [&](std::size_t t) {
            test_mu[t] = newsvendor_true_mu(cfg, test_scen[t]);
        });

        for (const auto& k : keys) {
            for (std::size_t lv = 0; lv < n_lv; ++lv) {
                auto [lo, hi] = detail::cri_bounds(values[k], rep.levels[lv]);
                std::size_t inside = 0;
                for (double v : test_mu) inside += (v >= lo && v <= hi) ? 1 : 0;
                cov[k][mr][lv] = static_cast<double>(inside) / static_cast<double>(opt.test_size);
                wid[k][mr][lv] = hi - lo;
            }
        }
    }

    rep.n_macro = n_macro;
    rep.seed = seed;
    double bsum = 0.0, bsq = 0.0;
    for (double b : budgets) bsum += b;
    rep.mean_budget = bsum / static_cast<double>(n_macro);
    for (double b : budgets) bsq += (b - rep.mean_budget) * (b - rep.mean_budget);
    rep.budget_se = std::sqrt(bsq / (static_cast<double>(n_macro) - 1.0) /
                              static_cast<double>(n_macro));
    for (const auto& k : keys) {
        CrIReport::Row row;
        for (std::size_t lv = 0; lv < n_lv; ++lv) {
            double cm = 0.0, wm = 0.0;
            for (std::size_t mr = 0; mr < n_macro; ++mr) {
                cm += cov[k][mr][lv];
                wm += wid[k][mr][lv];
            }
            cm /= static_cast<double>(n_macro);
            wm /= static_cast<double>(n_macro);
            double cv = 0.0, wv = 0.0;
            for (std::size_t mr = 0; mr < n_macro; ++mr) {
                cv += (cov[k][mr][lv] - cm) * (cov[k][mr][lv] - cm);
                wv += (wid[k][mr][lv] - wm) * (wid[k][mr][lv] - wm);
            }
            double nn = static_cast<double>(n_macro);
            row.coverage[lv] = cm;
            row.width[lv] = wm;
            row.coverage_se[lv] = std::sqrt(cv / (nn - 1.0) / nn);
            row.width_se[lv] = std::sqrt(wv / (nn - 1.0) / nn);
        }
        rep.rows[k] = row;
    }
    return rep;
}

// Fig 4a diagnostic: per-scenario ratio of the MC estimator's variance at N
// replications to the pooled LR estimator's variance at target N, both
// estimated across macro runs on one fixed scenario set.
struct VarianceRatioResult {
    std::vector<double> ratios;
    std::size_t budget = 0;
    double mean = 0.0, max = 0.0, min = 0.0;
};

inline VarianceRatioResult variance_ratio_diagnostic(const NewsvendorConfig& cfg, std::size_t m,
                                                     std::size_t target_n, std::size_t n_macro,
                                                     std::uint64_t seed) {
    cfg.validate();
    if (n_macro < 2) throw std::invalid_argument("variance_ratio: need n_macro >= 2");
    ExponentialFamilyModel model = newsvendor_model(cfg);

    RngStream data_rng(derive_seed(seed, "data"), 0);
    auto data = newsvendor_draw_data(cfg, data_rng);
    PosteriorParams post = newsvendor_posterior(cfg, data);
    RngStream scen_rng(derive_seed(seed, "scenarios"), 0);
    std::vector<Scenario> scenarios = posterior_sample(cfg, post, m, scen_rng);

    SecondMomentTable table = compute_second_moments(model, scenarios);
    DesignSolution design = solve_design(table, static_cast<double>(target_n));
    OutputFn g = [&cfg](const InputSample& x) { return newsvendor_profit(cfg, x); };

    // Pooled-estimator variance comes from across-run variation; the MC
    // estimator's variance is V_theta[g]/N, estimated from the within-run
    // replication variance (much lower noise at the same estimand, so the
    // per-scenario ratios are not dominated by numerator estimation error).
    std::vector<std::vector<double>> opt_est(n_macro);
    std::vector<double> var_g_sum(m, 0.0);
    for (std::size_t mr = 0; mr < n_macro; ++mr) {
        ReplicationPool pool =
            simulate_pool(model, scenarios, design, g, derive_seed(seed, "optpool"), mr);
        opt_est[mr] = pooled_conditional_means(pool, design, model, scenarios).mu_star;
        std::vector<double> var_g;
        detail::nv_mc_means(cfg, scenarios, target_n, derive_seed(seed, "mcpool"), mr, &var_g);
        for (std::size_t i = 0; i < m; ++i) var_g_sum[i] += var_g[i];
    }

    VarianceRatioResult res;
    res.budget = design.budget;
    res.ratios.resize(m);
    double nn = static_cast<double>(n_macro);
    for (std::size_t i = 0; i < m; ++i) {
        double mo = 0.0;
        for (std::size_t mr = 0; mr < n_macro; ++mr) mo += opt_est[mr][i];
        mo /= nn;
        double vo = 0.0;
        for (std::size_t mr = 0; mr < n_macro; ++mr) {
            vo += (opt_est[mr][i] - mo) * (opt_est[mr][i] - mo);
        }
        vo /= nn - 1.0;
        double vm = var_g_sum[i] / nn / static_cast<double>(target_n);
        res.ratios[i] = vm / vo;
    }
    res.mean = 0.0;
    res.min = kInf;
    res.max = -kInf;
    for (double r : res.ratios) {
        res.mean += r;
        res.min = std::min(res.min, r);
        res.max = std::max(res.max, r);
    }
    res.mean /= static_cast<double>(m);
    return res;
}

// Fig 4b: minimized budget Gamma_M for growing M with N = M.
struct BudgetGrowthResult {
    std::vector<std::pair<std::size_t, std::size_t>> points;  // (M, Gamma_M)
    double loglog_slope = 0.0;
};

inline BudgetGrowthResult budget_growth_study(const NewsvendorConfig& cfg,
                                              const std::vector<std::size_t>& m_list,
                                              std::uint64_t seed) {
    cfg.validate();
    if (m_list.empty()) throw std::invalid_argument("budget_growth: empty M list");
    for (std::size_t i = 1; i < m_list.size(); ++i) {
        if (m_list[i] <= m_list[i - 1]) {
            throw std::invalid_argument("budget_growth: M list must be increasing");
        }
    }
    ExponentialFamilyModel model = newsvendor_model(cfg);
    RngStream data_rng(derive_seed(seed, "data"), 0);
    auto data = newsvendor_draw_data(cfg, data_rng);
    PosteriorParams post = newsvendor_posterior(cfg, data);

    BudgetGrowthResult res;
    for (std::size_t idx = 0; idx < m_list.size(); ++idx) {
        std::size_t m = m_list[idx];
        RngStream scen_rng(derive_seed(seed, "scenarios"), idx);
        std::vector<Scenario> scenarios = posterior_sample(cfg, post, m, scen_rng);
        SecondMomentTable table = compute_second_moments(model, scenarios);
        DesignSolution design = solve_design(table, static_cast<double>(m));
        res.points.emplace_back(m, design.budget);
    }
    if (res.points.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double n = static_cast<double>(res.points.size());
        for (auto [mm, gg] : res.points) {
            double x = std::log(static_cast<double>(mm));
            double y = std::log(static_cast<double>(gg));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        res.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return res;
}

}  // namespace nestlr
