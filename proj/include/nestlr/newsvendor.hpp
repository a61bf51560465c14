#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nestlr/exp_family.hpp"
#include "nestlr/rng.hpp"

namespace nestlr {

// Multi-product newsvendor with independent Poisson demands and a conjugate
// Gamma prior per product's unknown rate.
struct NewsvendorConfig {
    std::size_t n_products = 10;
    double prior_shape = 0.001;
    double prior_rate = 0.001;
    std::size_t m_scenarios = 1000;

    double price(std::size_t l) const { return 10.0 + 0.3 * static_cast<double>(l + 1); }
    double cost(std::size_t) const { return 2.0; }
    unsigned stock(std::size_t l) const { return static_cast<unsigned>(9 + (l + 1)); }
    double true_rate(std::size_t l) const { return 5.0 + static_cast<double>(l + 1); }
    std::size_t data_size(std::size_t l) const { return 50 + 5 * (l + 1); }

    void validate() const {
        if (n_products == 0) throw std::invalid_argument("newsvendor: need products");
        if (!(prior_shape > 0.0 && prior_rate > 0.0)) {
            throw std::invalid_argument("newsvendor: prior parameters must be positive");
        }
    }
};

// Total profit g(x) = sum_l [ p_l min(x_l, k_l) - c_l k_l ].
inline double newsvendor_profit(const NewsvendorConfig& cfg, const InputSample& x) {
    if (x.size() != cfg.n_products) throw std::invalid_argument("newsvendor_profit: bad demand vector");
    double acc = 0.0;
    for (std::size_t l = 0; l < cfg.n_products; ++l) {
        if (x[l] < 0.0 || x[l] != std::floor(x[l])) {
            throw std::domain_error("newsvendor_profit: demands must be nonnegative integers");
        }
        double sold = std::min(x[l], static_cast<double>(cfg.stock(l)));
        acc += cfg.price(l) * sold - cfg.cost(l) * cfg.stock(l);
    }
    return acc;
}

// E[min(X,k)] for X ~ Poisson(lambda): k - sum_{x=0}^{k-1} (k-x) pmf(x),
// with the pmf accumulated by the stable multiplicative recursion.
inline double poisson_expected_min(double lambda, unsigned k) {
    if (!(lambda >= 0.0)) throw std::domain_error("poisson_expected_min: bad rate");
    if (k == 0) return 0.0;
    double pmf = std::exp(-lambda);
    double acc = static_cast<double>(k) * pmf;
    for (unsigned x = 1; x < k; ++x) {
        pmf *= lambda / static_cast<double>(x);
        acc += static_cast<double>(k - x) * pmf;
    }
    return static_cast<double>(k) - acc;
}

inline double newsvendor_true_mu(const NewsvendorConfig& cfg, const Scenario& theta) {
    if (theta.dim() != cfg.n_products) throw std::invalid_argument("newsvendor_true_mu: bad scenario");
    double acc = 0.0;
    for (std::size_t l = 0; l < cfg.n_products; ++l) {
        acc += cfg.price(l) * poisson_expected_min(theta[l], cfg.stock(l)) -
               cfg.cost(l) * cfg.stock(l);
    }
    return acc;
}

struct PosteriorParams {
    std::vector<double> shape;  // prior shape + sum of observed demands
    std::vector<double> rate;   // prior rate + number of observations
};

// Conjugate update from per-product demand observations.
inline PosteriorParams newsvendor_posterior(const NewsvendorConfig& cfg,
                                            const std::vector<std::vector<unsigned>>& data) {
    if (data.size() != cfg.n_products) throw std::invalid_argument("posterior: bad data shape");
    PosteriorParams post;
    post.shape.resize(cfg.n_products);
    post.rate.resize(cfg.n_products);
    for (std::size_t l = 0; l < cfg.n_products; ++l) {
        double sum = 0.0;
        for (unsigned v : data[l]) sum += static_cast<double>(v);
        post.shape[l] = cfg.prior_shape + sum;
        post.rate[l] = cfg.prior_rate + static_cast<double>(data[l].size());
    }
    return post;
}

inline std::vector<std::vector<unsigned>> newsvendor_draw_data(const NewsvendorConfig& cfg,
                                                               RngStream& rng) {
    std::vector<std::vector<unsigned>> data(cfg.n_products);
    for (std::size_t l = 0; l < cfg.n_products; ++l) {
        data[l].resize(cfg.data_size(l));
        for (auto& v : data[l]) v = rng.poisson(cfg.true_rate(l));
    }
    return data;
}

inline std::vector<Scenario> posterior_sample(const NewsvendorConfig& cfg,
                                              const PosteriorParams& post, std::size_t m,
                                              RngStream& rng) {
    std::vector<Scenario> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i].theta.resize(cfg.n_products);
        for (std::size_t l = 0; l < cfg.n_products; ++l) {
            out[i].theta[l] = rng.gamma(post.shape[l], post.rate[l]);
        }
    }
    return out;
}

inline ExponentialFamilyModel newsvendor_model(const NewsvendorConfig& cfg) {
    return ExponentialFamilyModel(Family::poisson, cfg.n_products);
}

// Regression features: intercept plus per-product {rate, rate^2}, no cross terms.
inline std::vector<double> newsvendor_features(const NewsvendorConfig& cfg,
                                               const Scenario& theta) {
    std::vector<double> f;
    f.reserve(1 + 2 * cfg.n_products);
    f.push_back(1.0);
    for (std::size_t l = 0; l < cfg.n_products; ++l) {
        f.push_back(theta[l]);
        f.push_back(theta[l] * theta[l]);
    }
    return f;
}

}  // namespace nestlr
