#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestlr/design.hpp"
#include "nestlr/exp_family.hpp"
#include "nestlr/math.hpp"
#include "nestlr/parallel.hpp"
#include "nestlr/rng.hpp"

namespace nestlr {

using OutputFn = std::function<double(const InputSample&)>;

// Inner replications per sampling scenario: raw inputs are kept because the
// likelihood ratio W_ij must be re-evaluated for every target scenario.
struct ReplicationPool {
    struct ScenarioPool {
        std::vector<double> inputs;   // flattened, n_reps x dim
        std::vector<double> outputs;  // g(x_k)
        std::uint64_t stream = 0;
        std::size_t n_reps = 0;
    };
    std::vector<ScenarioPool> pools;  // one per scenario (possibly empty)
    std::size_t dim = 0;
};

struct PooledEstimates {
    std::vector<double> mu_star;  // pooled conditional means, length M
    struct Component {
        std::size_t target, sampler;
        double value;  // mu_ij
    };
    std::vector<Component> components;  // pairs with positive pooling weight
};

struct RiskFunctional {
    enum class Kind { indicator_cdf, indicator_exceedance, hockey_stick, squared };
    Kind kind;
    double xi;

    double operator()(double mu) const {
        switch (kind) {
            case Kind::indicator_cdf: return mu <= xi ? 1.0 : 0.0;
            case Kind::indicator_exceedance: return mu > xi ? 1.0 : 0.0;
            case Kind::hockey_stick: return mu > xi ? mu - xi : 0.0;
            case Kind::squared: return (mu - xi) * (mu - xi);
        }
        return 0.0;
    }
};

// Runs the design's inner replications. One stream per (macro, scenario):
// stream id = macro * 2^32 + scenario index.
inline ReplicationPool simulate_pool(const ExponentialFamilyModel& model,
                                     const std::vector<Scenario>& scenarios,
                                     const DesignSolution& design, const OutputFn& g,
                                     std::uint64_t seed, std::uint64_t macro = 0) {
    const std::size_t m = scenarios.size();
    if (design.size() != m) throw std::invalid_argument("simulate_pool: design/scenario mismatch");
    ReplicationPool pool;
    pool.dim = model.dim();
    pool.pools.resize(m);
    parallel_for(m, [&](std::size_t j) {
        std::size_t nj = design.integer_allocation[j];
        if (nj == 0) return;
        auto& sp = pool.pools[j];
        sp.stream = stream_id(macro, j);
        sp.n_reps = nj;
        sp.inputs.reserve(nj * model.dim());
        sp.outputs.reserve(nj);
        RngStream rng(seed, sp.stream);
        for (std::size_t k = 0; k < nj; ++k) {
            InputSample x(model.dim());
            for (std::size_t l = 0; l < model.dim(); ++l) {
                x[l] = model.sample_coord(scenarios[j][l], l, rng);
            }
            double out = g(x);
            if (!std::isfinite(out)) {
                throw std::runtime_error("simulate_pool: non-finite output at scenario " +
                                         std::to_string(j) + ", replication " + std::to_string(k));
            }
            sp.inputs.insert(sp.inputs.end(), x.begin(), x.end());
            sp.outputs.push_back(out);
        }
    });
    return pool;
}

// Self-normalized LR estimate: sum_k g_k exp(lw_k) / sum_k exp(lw_k) with a
// max shift, which equals the unit-mean-weight form of the estimator.
inline double self_normalized_estimate(const std::vector<double>& outputs,
                                       const std::vector<double>& log_weights) {
    if (outputs.empty()) throw std::invalid_argument("self_normalized_estimate: empty inputs");
    return log_weighted_mean(outputs, log_weights);
}

// Pooled conditional means mu*_i = sum_j gamma_ij mu_ij. The mu_ij are
// evaluated only where gamma_ij > 0, reusing scenario j's replications for
// every target i.
inline PooledEstimates pooled_conditional_means(const ReplicationPool& pool,
                                                const DesignSolution& design,
                                                const ExponentialFamilyModel& model,
                                                const std::vector<Scenario>& scenarios) {
    const std::size_t m = scenarios.size();
    const std::size_t d = model.dim();
    if (pool.pools.size() != m || design.size() != m) {
        throw std::invalid_argument("pooled_conditional_means: size mismatch");
    }

    // Per-pool sufficient statistics and per-scenario natural parameters.
    std::vector<std::vector<double>> tstats(m);  // flattened n_reps x d
    std::vector<std::size_t> samplers;
    for (std::size_t j = 0; j < m; ++j) {
        if (design.integer_allocation[j] == 0) continue;
        if (pool.pools[j].n_reps != design.integer_allocation[j]) {
            throw std::invalid_argument("pooled_conditional_means: pool does not match design");
        }
        samplers.push_back(j);
        const auto& in = pool.pools[j].inputs;
        auto& ts = tstats[j];
        ts.resize(in.size());
        for (std::size_t k = 0; k < pool.pools[j].n_reps; ++k) {
            for (std::size_t l = 0; l < d; ++l) {
                ts[k * d + l] = model.sufficient_stat(in[k * d + l], l);
            }
        }
    }
    std::vector<std::vector<double>> eta(m), logpart(m);
    for (std::size_t i = 0; i < m; ++i) {
        eta[i] = model.natural_params(scenarios[i]);
        logpart[i].resize(d);
        for (std::size_t l = 0; l < d; ++l) logpart[i][l] = model.log_partition(eta[i][l], l);
    }

    PooledEstimates est;
    est.mu_star.assign(m, 0.0);
    std::vector<std::vector<PooledEstimates::Component>> comp_slots(m);
    parallel_for(m, [&](std::size_t i) {
        std::vector<double> lw;
        for (std::size_t j : samplers) {
            double gij = design.gamma_at(i, j);
            if (!(gij > 0.0)) continue;
            const auto& sp = pool.pools[j];
            double shift = 0.0;
            for (std::size_t l = 0; l < d; ++l) {
                shift -= logpart[i][l] - logpart[j][l];
            }
            lw.assign(sp.n_reps, shift);
            const double* ts = tstats[j].data();
            for (std::size_t k = 0; k < sp.n_reps; ++k) {
                double dot = 0.0;
                for (std::size_t l = 0; l < d; ++l) {
                    dot += (eta[i][l] - eta[j][l]) * ts[k * d + l];
                }
                lw[k] += dot;
            }
            comp_slots[i].push_back({i, j, log_weighted_mean(sp.outputs, lw)});
        }
        // gamma-weighted combination, accumulated as deviations from the first
        // component so a constant survives exactly (gamma rows sum to 1).
        double ref = comp_slots[i].empty() ? 0.0 : comp_slots[i].front().value;
        double acc = 0.0;
        for (const auto& c : comp_slots[i]) {
            acc += design.gamma_at(i, c.sampler) * (c.value - ref);
        }
        est.mu_star[i] = ref + acc;
    });
    for (auto& slot : comp_slots) {
        est.components.insert(est.components.end(), slot.begin(), slot.end());
    }
    return est;
}

// Plain per-scenario MC means from own replications (standard designs).
inline std::vector<double> mc_conditional_means(const ReplicationPool& pool) {
    std::vector<double> mu(pool.pools.size(), 0.0);
    for (std::size_t j = 0; j < pool.pools.size(); ++j) {
        const auto& sp = pool.pools[j];
        if (sp.n_reps == 0) {
            throw std::invalid_argument("mc_conditional_means: scenario " + std::to_string(j) +
                                        " has no replications");
        }
        double acc = 0.0;
        for (double v : sp.outputs) acc += v;
        mu[j] = acc / static_cast<double>(sp.n_reps);
    }
    return mu;
}

inline double nested_expectation(const std::vector<double>& mu_estimates,
                                 const RiskFunctional& f) {
    if (mu_estimates.empty()) throw std::invalid_argument("nested_expectation: empty input");
    double acc = 0.0;
    for (double mu : mu_estimates) acc += f(mu);
    return acc / static_cast<double>(mu_estimates.size());
}

// ceil(M*alpha)-th order statistic, 1-indexed, no interpolation.
inline double empirical_quantile(const std::vector<double>& mu_estimates, double alpha) {
    if (mu_estimates.empty()) throw std::invalid_argument("empirical_quantile: empty input");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("empirical_quantile: alpha must be in (0,1)");
    }
    std::size_t m = mu_estimates.size();
    std::size_t idx = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(m)));
    if (idx < 1) idx = 1;
    std::vector<double> v(mu_estimates);
    std::nth_element(v.begin(), v.begin() + (idx - 1), v.end());
    return v[idx - 1];
}

inline double ecdf(const std::vector<double>& mu_estimates, double xi) {
    if (mu_estimates.empty()) throw std::invalid_argument("ecdf: empty input");
    std::size_t count = 0;
    for (double v : mu_estimates) count += v <= xi ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(mu_estimates.size());
}

}  // namespace nestlr
