// Command-line front end: solve budget-optimal nested simulation designs,
// run the estimators, and reproduce the case-study tables and figure data.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nestlr/config.hpp"
#include "nestlr/design.hpp"
#include "nestlr/estimators.hpp"
#include "nestlr/io.hpp"
#include "nestlr/studies.hpp"

namespace {

using namespace nestlr;

struct ProblemSetup {
    ExponentialFamilyModel model;
    ExponentialFamilyModel table_model;
    std::vector<Scenario> scenarios;
    OutputFn g;
    std::vector<double> prices;  // straddle only
};

ProblemSetup build_problem(const ExperimentConfig& cfg) {
    if (cfg.problem == "erm-straddle") {
        ProblemSetup ps{straddle_inner_model(cfg.straddle), straddle_table_model(cfg.straddle),
                        {}, {}, straddle_outer_scenarios(cfg.straddle)};
        ps.scenarios.reserve(ps.prices.size());
        for (double p : ps.prices) ps.scenarios.push_back(straddle_inner_scenario(cfg.straddle, p));
        const StraddleConfig sc = cfg.straddle;
        ps.g = [sc](const InputSample& x) { return straddle_payoff(sc, x[0]); };
        return ps;
    }
    if (cfg.problem == "newsvendor") {
        ExponentialFamilyModel model = newsvendor_model(cfg.newsvendor);
        RngStream data_rng(derive_seed(cfg.seed, "data"), 0);
        auto data = newsvendor_draw_data(cfg.newsvendor, data_rng);
        PosteriorParams post = newsvendor_posterior(cfg.newsvendor, data);
        RngStream scen_rng(derive_seed(cfg.seed, "scenarios"), 0);
        ProblemSetup ps{model, model,
                        posterior_sample(cfg.newsvendor, post, cfg.m_scenarios, scen_rng),
                        {}, {}};
        const NewsvendorConfig nc = cfg.newsvendor;
        ps.g = [nc](const InputSample& x) { return newsvendor_profit(nc, x); };
        return ps;
    }
    // custom exponential-family problem
    ExponentialFamilyModel model(cfg.custom_family, cfg.custom_dim, cfg.custom_variance);
    ProblemSetup ps{model, model, cfg.custom_scenarios, {}, {}};
    CustomOutput g = cfg.custom_g;
    ps.g = [g](const InputSample& x) { return g(x); };
    return ps;
}

int cmd_design(const ExperimentConfig& cfg) {
    ProblemSetup ps = build_problem(cfg);
    SecondMomentTable table = compute_second_moments(ps.table_model, ps.scenarios);
    DesignSolution design = solve_design(table, static_cast<double>(cfg.target_n), cfg.delta);

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/design.json");
    json j = design_to_json(design);
    j["config_hash"] = cfg.hash();
    j["seed"] = cfg.seed;
    os << j.dump(2) << "\n";

    std::size_t positive = 0;
    for (std::size_t n : design.integer_allocation) positive += n > 0 ? 1 : 0;
    double mn = static_cast<double>(cfg.m_scenarios) * static_cast<double>(cfg.target_n);
    std::printf("budget=%zu standard_budget=%.0f savings_ratio=%.1f sampling_scenarios=%zu\n",
                design.budget, mn, mn / static_cast<double>(design.budget), positive);
    return 0;
}

int cmd_estimate(const ExperimentConfig& cfg, const std::string& design_path) {
    ProblemSetup ps = build_problem(cfg);
    DesignSolution design;
    if (!design_path.empty()) {
        std::ifstream is(design_path);
        if (!is) throw ConfigError("cannot open design file " + design_path);
        json j;
        is >> j;
        if (j.contains("config_hash")) j.erase("config_hash");
        if (j.contains("seed")) j.erase("seed");
        design = design_from_json(j);
        if (design.size() != ps.scenarios.size()) {
            throw ConfigError("design file does not match the config's scenario count");
        }
    } else {
        SecondMomentTable table = compute_second_moments(ps.table_model, ps.scenarios);
        design = solve_design(table, static_cast<double>(cfg.target_n), cfg.delta);
    }

    ReplicationPool pool =
        simulate_pool(ps.model, ps.scenarios, design, ps.g, derive_seed(cfg.seed, "estimate"), 0);
    PooledEstimates est = pooled_conditional_means(pool, design, ps.model, ps.scenarios);

    double q = empirical_quantile(est.mu_star, cfg.alpha);
    double ind = nested_expectation(est.mu_star,
                                    {RiskFunctional::Kind::indicator_exceedance, cfg.threshold});
    double hs = nested_expectation(est.mu_star, {RiskFunctional::Kind::hockey_stick, cfg.threshold});
    double sq = nested_expectation(est.mu_star, {RiskFunctional::Kind::squared, cfg.threshold});

    std::filesystem::create_directories(cfg.out_dir);
    CsvWriter csv(cfg.out_dir + "/estimate.csv", "statistic,value", cfg.hash(), cfg.seed);
    csv.row("quantile", q);
    csv.row("indicator_exceedance", ind);
    csv.row("hockey_stick", hs);
    csv.row("squared", sq);

    json out;
    out["quantile"] = q;
    out["indicator_exceedance"] = ind;
    out["hockey_stick"] = hs;
    out["squared"] = sq;
    out["budget"] = design.budget;
    out["alpha"] = cfg.alpha;
    out["threshold"] = cfg.threshold;
    std::ofstream os(cfg.out_dir + "/estimate.json");
    os << out.dump(2) << "\n";
    std::printf("quantile=%.6f indicator=%.6f hockey_stick=%.6f squared=%.6f budget=%zu\n", q,
                ind, hs, sq, design.budget);
    return 0;
}

void report_band(const char* name, double value, double lo, double hi, bool& all_ok) {
    bool ok = value >= lo && value <= hi;
    all_ok = all_ok && ok;
    std::printf("[%s] %s = %.6g (band [%g, %g])\n", ok ? "PASS" : "FAIL", name, value, lo, hi);
}

int reproduce_erm(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_list) {
    std::filesystem::create_directories(cfg.out_dir);
    ErmStudyOptions opt;
    opt.alpha = cfg.alpha;
    opt.threshold = cfg.threshold;
    opt.oracle_size = cfg.oracle_size;

    std::vector<MacroStudyReport> reports;
    for (std::size_t m : m_list) {
        StraddleConfig sc = cfg.straddle;
        sc.m_scenarios = m;
        ErmStudyResult res = run_macro_study(sc, cfg.n_macro, cfg.seed, opt);
        res.report.check_identity();
        reports.push_back(res.report);
        std::printf("M=%zu: Gamma=%zu standard=(%zu,%zu)\n", m, res.report.optimal_budget,
                    res.report.standard_m, res.report.standard_n);
    }

    CsvWriter csv(cfg.out_dir + "/table1.csv",
                  "M,design,measure,mse,bias2,variance,truth,n_macro", cfg.hash(), cfg.seed);
    for (const auto& rep : reports) {
        for (const auto& [k, row] : rep.cells) {
            for (std::size_t q = 0; q < 4; ++q) {
                csv.row(rep.m_scenarios, design_name(k), rep.measures[q], row[q].mse,
                        row[q].bias2, row[q].variance, rep.truth[q], rep.n_macro);
            }
        }
    }

    // Figure 1 series and the M=1000 confidence bands.
    {
        StraddleConfig sc = cfg.straddle;
        sc.m_scenarios = 1000;
        std::vector<double> grid = straddle_outer_scenarios(sc);
        double mu_ln = std::log(sc.s0) + (sc.drift - 0.5 * sc.sigma * sc.sigma) * sc.horizon;
        double sd_ln = sc.sigma * std::sqrt(sc.horizon);
        CsvWriter f1(cfg.out_dir + "/fig1_outer_density.csv", "s_tau,pdf", cfg.hash(), cfg.seed);
        CsvWriter f1b(cfg.out_dir + "/fig1_conditional_mean.csv", "s_tau,mu", cfg.hash(),
                      cfg.seed);
        for (double s : grid) {
            double z = (std::log(s) - mu_ln) / sd_ln;
            f1.row(s, normal_pdf(z) / (s * sd_ln));
            f1b.row(s, straddle_true_mu(sc, s));
        }

        ErmStudyOptions bopt = opt;
        bopt.collect_bands = true;
        bopt.designs = {DesignKind::optimal, DesignKind::standard_plus, DesignKind::regression};
        ErmStudyResult bres = run_macro_study(sc, cfg.n_macro, cfg.seed, bopt);
        CsvWriter f2(cfg.out_dir + "/fig2_confidence_bands.csv",
                     "s_tau,design,lo_2.5,hi_97.5,true_mu", cfg.hash(), cfg.seed);
        for (const auto& [k, lo] : bres.bands.lo) {
            const auto& hi = bres.bands.hi.at(k);
            for (std::size_t i = 0; i < bres.bands.scenario.size(); ++i) {
                double s = bres.bands.scenario[i];
                f2.row(s, design_name(k), lo[i], hi[i], straddle_true_mu(sc, s));
            }
        }
    }

    bool ok = true;
    if (reports.size() >= 2) {
        for (std::size_t q = 0; q < 4; ++q) {
            for (const auto& rep : reports) {
                double opt_mse = rep.cells.at(DesignKind::optimal)[q].mse;
                double std_mse = rep.cells.at(DesignKind::standard)[q].mse;
                std::string nm = "opt<std " + rep.measures[q] + " M=" +
                                 std::to_string(rep.m_scenarios);
                report_band(nm.c_str(), std_mse > opt_mse ? 1.0 : 0.0, 1.0, 1.0, ok);
            }
            double ratio = reports[1].cells.at(DesignKind::optimal)[q].mse /
                           reports[0].cells.at(DesignKind::optimal)[q].mse;
            std::string nm = "halving " + reports[0].measures[q];
            report_band(nm.c_str(), ratio, 0.3, 0.8, ok);
        }
        report_band("quantile MSE (first M)", reports[0].cells.at(DesignKind::optimal)[0].mse,
                    2.0, 15.0, ok);
    }
    std::printf("%s\n", ok ? "ERM reproduction: all bands PASS" : "ERM reproduction: bands FAILED");
    return 0;
}

int reproduce_newsvendor(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    CoverageOptions opt;
    opt.target_n = cfg.target_n;
    opt.test_size = cfg.test_size;
    CrIReport rep = coverage_study(cfg.newsvendor, cfg.n_macro, cfg.seed, opt);

    CsvWriter csv(cfg.out_dir + "/table2.csv",
                  "design,level,coverage,coverage_se,width,width_se", cfg.hash(), cfg.seed);
    for (const auto& [k, row] : rep.rows) {
        for (std::size_t lv = 0; lv < rep.levels.size(); ++lv) {
            csv.row(k, rep.levels[lv], row.coverage[lv], row.coverage_se[lv], row.width[lv],
                    row.width_se[lv]);
        }
    }
    std::printf("mean budget=%.1f (se %.2f)\n", rep.mean_budget, rep.budget_se);

    bool ok = true;
    const auto& opt_row = rep.rows.at("optimal");
    const auto& ora_row = rep.rows.at("oracle");
    const auto& std_row = rep.rows.at("standard");
    const double opt_ref[3] = {0.887, 0.940, 0.985};
    const double ora_ref[3] = {0.898, 0.948, 0.988};
    for (int lv = 0; lv < 3; ++lv) {
        std::string nm = "optimal coverage@" + std::to_string(rep.levels[lv]);
        report_band(nm.c_str(), opt_row.coverage[lv], opt_ref[lv] - 0.02, opt_ref[lv] + 0.02, ok);
        nm = "oracle coverage@" + std::to_string(rep.levels[lv]);
        report_band(nm.c_str(), ora_row.coverage[lv], ora_ref[lv] - 0.015, ora_ref[lv] + 0.015,
                    ok);
        nm = "standard coverage@" + std::to_string(rep.levels[lv]);
        report_band(nm.c_str(), std_row.coverage[lv], 0.999, 1.0, ok);
        nm = "standard width ratio@" + std::to_string(rep.levels[lv]);
        report_band(nm.c_str(), std_row.width[lv] / ora_row.width[lv], 2.0, kInf, ok);
    }
    std::printf("%s\n",
                ok ? "newsvendor reproduction: all bands PASS" : "newsvendor reproduction: bands FAILED");
    return 0;
}

int reproduce_variance_ratio(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    VarianceRatioResult res = variance_ratio_diagnostic(cfg.newsvendor, cfg.m_scenarios,
                                                        cfg.target_n, cfg.n_macro, cfg.seed);
    CsvWriter csv(cfg.out_dir + "/fig4a_ratios.csv", "scenario,ratio", cfg.hash(), cfg.seed);
    for (std::size_t i = 0; i < res.ratios.size(); ++i) csv.row(i, res.ratios[i]);

    const int n_bins = 30;
    double lo = res.min, hi = res.max * 1.0000001;
    std::vector<std::size_t> bins(n_bins, 0);
    for (double r : res.ratios) {
        int b = static_cast<int>((r - lo) / (hi - lo) * n_bins);
        bins[std::min(std::max(b, 0), n_bins - 1)] += 1;
    }
    CsvWriter hcsv(cfg.out_dir + "/fig4a_histogram.csv", "bin_lo,bin_hi,count", cfg.hash(),
                   cfg.seed);
    for (int b = 0; b < n_bins; ++b) {
        hcsv.row(lo + (hi - lo) * b / n_bins, lo + (hi - lo) * (b + 1) / n_bins, bins[b]);
    }

    bool ok = true;
    report_band("variance ratio mean", res.mean, 1.0, 1.4, ok);
    report_band("variance ratio max", res.max, 0.0, 1.6, ok);
    std::printf("budget=%zu %s\n", res.budget,
                ok ? "variance-ratio: bands PASS" : "variance-ratio: bands FAILED");
    return 0;
}

int reproduce_budget_growth(const ExperimentConfig& cfg, const std::vector<std::size_t>& m_list) {
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::size_t> ms = m_list.empty()
                                      ? std::vector<std::size_t>{1000, 2000, 4000, 8000}
                                      : m_list;
    BudgetGrowthResult res = budget_growth_study(cfg.newsvendor, ms, cfg.seed);
    CsvWriter csv(cfg.out_dir + "/fig4b_budget_growth.csv", "M,Gamma", cfg.hash(), cfg.seed);
    for (auto [m, g] : res.points) csv.row(m, g);
    bool ok = true;
    report_band("budget growth log-log slope", res.loglog_slope, 0.95, 1.25, ok);
    std::printf("%s\n", ok ? "budget-growth: bands PASS" : "budget-growth: bands FAILED");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-optimal nested simulation designs via likelihood-ratio pooling"};
    app.require_subcommand(1);

    std::string config_path, out_dir, design_path, study;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::size_t> macro_override;
    std::optional<bool> compat_override;
    unsigned threads = 0;
    std::vector<std::size_t> m_list;

    app.add_option("--threads", threads, "worker thread count (0 = hardware)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config JSON");
        sub->add_option("--seed", seed_override, "master seed override");
        sub->add_option("--macro", macro_override, "macro replication count override");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--paper-compat,!--no-paper-compat", compat_override,
                      "reference second-moment convention for the straddle study");
    };

    CLI::App* design_cmd = app.add_subcommand("design", "solve the optimal experiment design");
    add_common(design_cmd);
    CLI::App* est_cmd = app.add_subcommand("estimate", "run the design and estimate risk");
    add_common(est_cmd);
    est_cmd->add_option("--design", design_path, "design JSON produced by 'design'");
    CLI::App* rep_cmd = app.add_subcommand(
        "reproduce", "reproduce a case study: erm | newsvendor | budget-growth | variance-ratio");
    add_common(rep_cmd);
    rep_cmd->add_option("study", study, "study name")->required();
    rep_cmd->add_option("--M", m_list, "scenario counts")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads > 0) nestlr::thread_count() = threads;

        nestlr::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = nestlr::load_config_file(config_path);
        } else {
            cfg = nestlr::parse_config(nestlr::json::object());
        }
        if (seed_override) cfg.seed = *seed_override;
        if (macro_override) cfg.n_macro = *macro_override;
        if (compat_override) {
            cfg.paper_compat = *compat_override;
            cfg.straddle.paper_compat = *compat_override;
            cfg.effective["paper_compat"] = *compat_override;
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (design_cmd->parsed()) return cmd_design(cfg);
        if (est_cmd->parsed()) return cmd_estimate(cfg, design_path);
        if (rep_cmd->parsed()) {
            if (study == "erm") {
                if (cfg.problem != "erm-straddle") throw nestlr::ConfigError("erm study needs the erm-straddle problem");
                return reproduce_erm(cfg, m_list.empty() ? std::vector<std::size_t>{512, 1024}
                                                         : m_list);
            }
            if (study == "newsvendor") return reproduce_newsvendor(cfg);
            if (study == "variance-ratio") return reproduce_variance_ratio(cfg);
            if (study == "budget-growth") return reproduce_budget_growth(cfg, m_list);
            throw nestlr::ConfigError("unknown study '" + study + "'");
        }
        return 2;
    } catch (const nestlr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
