#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nestlr/exp_family.hpp"
#include "nestlr/math.hpp"
#include "nestlr/regression.hpp"

namespace nestlr {

// Straddle portfolio valued at the risk horizon tau. The outer scenario is
// the horizon price S_tau; the inner input is the terminal price S_T.
struct StraddleConfig {
    double s0 = 100.0;
    double drift = 0.02;      // real-world expected return (per year)
    double sigma = 0.30;      // volatility (per sqrt-year)
    double rate = 0.02;       // risk-free rate (per year)
    double maturity = 2.0;    // T (years)
    double strike = 110.0;
    double horizon = 0.25;    // tau (years)
    std::size_t m_scenarios = 1000;
    bool paper_compat = true;

    void validate() const {
        if (!(horizon > 0.0 && horizon < maturity)) {
            throw std::invalid_argument("straddle: need 0 < tau < T");
        }
        if (!(sigma > 0.0)) throw std::invalid_argument("straddle: sigma must be positive");
        if (!(s0 > 0.0 && strike > 0.0)) throw std::invalid_argument("straddle: bad prices");
    }

    double tenor() const { return maturity - horizon; }
    double inner_logvar() const { return sigma * sigma * tenor(); }
    double inner_mean(double s_tau) const {
        return std::log(s_tau) + (rate - 0.5 * sigma * sigma) * tenor();
    }
    double discount() const { return std::exp(-rate * tenor()); }
};

inline double black_scholes_call(double spot, double strike, double rate, double sigma,
                                 double tenor) {
    double sd = sigma * std::sqrt(tenor);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * tenor) / sd;
    double d2 = d1 - sd;
    return spot * normal_cdf(d1) - strike * std::exp(-rate * tenor) * normal_cdf(d2);
}

inline double black_scholes_put(double spot, double strike, double rate, double sigma,
                                double tenor) {
    double sd = sigma * std::sqrt(tenor);
    double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * tenor) / sd;
    double d2 = d1 - sd;
    return strike * std::exp(-rate * tenor) * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

// Conditional portfolio value mu(theta): call + put at spot s_tau, valued
// over the remaining tenor T - tau.
inline double straddle_true_mu(const StraddleConfig& cfg, double s_tau) {
    if (!(s_tau > 0.0)) throw std::domain_error("straddle_true_mu: s_tau must be positive");
    return black_scholes_call(s_tau, cfg.strike, cfg.rate, cfg.sigma, cfg.tenor()) +
           black_scholes_put(s_tau, cfg.strike, cfg.rate, cfg.sigma, cfg.tenor());
}

// Discounted straddle payoff of one inner replication (x = S_T).
inline double straddle_payoff(const StraddleConfig& cfg, double s_T) {
    return cfg.discount() * std::fabs(s_T - cfg.strike);
}

// Outer scenarios: the i/(M+1) quantiles of the lognormal S_tau distribution.
inline std::vector<double> straddle_outer_scenarios(const StraddleConfig& cfg) {
    if (cfg.m_scenarios < 1) throw std::invalid_argument("straddle: M must be >= 1");
    double mu_ln = std::log(cfg.s0) + (cfg.drift - 0.5 * cfg.sigma * cfg.sigma) * cfg.horizon;
    double sd_ln = cfg.sigma * std::sqrt(cfg.horizon);
    std::vector<double> out(cfg.m_scenarios);
    for (std::size_t i = 0; i < cfg.m_scenarios; ++i) {
        double q = static_cast<double>(i + 1) / static_cast<double>(cfg.m_scenarios + 1);
        out[i] = std::exp(mu_ln + sd_ln * normal_ppf(q));
    }
    return out;
}

// Inner model: 1-d lognormal on S_T with known log-variance sigma^2 (T-tau).
inline ExponentialFamilyModel straddle_inner_model(const StraddleConfig& cfg) {
    return ExponentialFamilyModel(Family::lognormal_known_logvar, 1, {cfg.inner_logvar()});
}

inline Scenario straddle_inner_scenario(const StraddleConfig& cfg, double s_tau) {
    return Scenario{{cfg.inner_mean(s_tau)}};
}

// Model used only for the E[W^2] table. With paper_compat the log-variance is
// sigma^2 (T-tau), the reference convention; without the flag the
// table uses the sigma^2 convention, i.e. exp((ln t_i - ln t_j)^2 / sigma^2).
inline ExponentialFamilyModel straddle_table_model(const StraddleConfig& cfg) {
    double v = cfg.paper_compat ? cfg.inner_logvar() : cfg.sigma * cfg.sigma;
    return ExponentialFamilyModel(Family::lognormal_known_logvar, 1, {v});
}

// Regression features: intercept plus weighted Laguerre polynomials
// exp(-u/2) L_n(u), n = 0..3, with u = S_tau / S_0.
inline std::vector<double> straddle_features(const StraddleConfig& cfg, double s_tau) {
    double u = s_tau / cfg.s0;
    double lag[4];
    laguerre4(u, lag);
    double w = std::exp(-0.5 * u);
    return {1.0, w * lag[0], w * lag[1], w * lag[2], w * lag[3]};
}

}  // namespace nestlr
