#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nestlr/math.hpp"
#include "nestlr/rng.hpp"

namespace nestlr {

// Outer-scenario parameter vector; one entry per input coordinate.
struct Scenario {
    std::vector<double> theta;

    std::size_t dim() const { return theta.size(); }
    double operator[](std::size_t i) const { return theta[i]; }
};

using InputSample = std::vector<double>;

enum class Family {
    normal_known_variance,     // theta_l = mean of coordinate l
    lognormal_known_logvar,    // theta_l = mean of ln(x_l)
    poisson,                   // theta_l = rate
    exponential,               // theta_l = rate
};

inline std::string family_name(Family f) {
    switch (f) {
        case Family::normal_known_variance: return "normal";
        case Family::lognormal_known_logvar: return "lognormal";
        case Family::poisson: return "poisson";
        case Family::exponential: return "exponential";
    }
    return "?";
}

// Joint input distribution with independent coordinates, each a one-parameter
// exponential family h(x;theta) = B(x) exp(eta(theta)^T T(x) - A(eta)).
// Densities, samplers, likelihood ratios, and the closed-form second moment
// E_j[W_ij^2] = exp(A(eta_j) - 2 A(eta_i) + A(2 eta_i - eta_j)) all live here;
// the second moment is +inf when 2 eta_i - eta_j leaves the natural space.
class ExponentialFamilyModel {
  public:
    ExponentialFamilyModel(Family family, std::size_t dim, std::vector<double> known_variance = {})
        : family_(family), dim_(dim), var_(std::move(known_variance)) {
        if (dim_ == 0) throw std::invalid_argument("model dimension must be positive");
        bool needs_var = family_ == Family::normal_known_variance ||
                         family_ == Family::lognormal_known_logvar;
        if (needs_var) {
            if (var_.size() == 1 && dim_ > 1) var_.assign(dim_, var_[0]);
            if (var_.size() != dim_) {
                throw std::invalid_argument("known variance must have one entry per coordinate");
            }
            for (double v : var_) {
                if (!(v > 0.0) || !std::isfinite(v)) {
                    throw std::invalid_argument("known variance entries must be positive finite");
                }
            }
        } else if (!var_.empty()) {
            throw std::invalid_argument("variance hyperparameter only applies to (log)normal");
        }
    }

    Family family() const { return family_; }
    std::size_t dim() const { return dim_; }
    const std::vector<double>& known_variance() const { return var_; }

    bool admissible(const Scenario& s) const {
        if (s.dim() != dim_) return false;
        for (std::size_t l = 0; l < dim_; ++l) {
            double t = s[l];
            if (!std::isfinite(t)) return false;
            if ((family_ == Family::poisson || family_ == Family::exponential) && !(t > 0.0)) {
                return false;
            }
        }
        return true;
    }

    void require_admissible(const Scenario& s) const {
        if (!admissible(s)) {
            throw std::domain_error("scenario outside the admissible parameter domain");
        }
    }

    bool in_support(const InputSample& x) const {
        if (x.size() != dim_) return false;
        for (std::size_t l = 0; l < dim_; ++l) {
            double xi = x[l];
            if (!std::isfinite(xi)) return false;
            switch (family_) {
                case Family::normal_known_variance:
                    break;
                case Family::lognormal_known_logvar:
                case Family::exponential:
                    if (!(xi > 0.0)) return false;
                    break;
                case Family::poisson:
                    if (xi < 0.0 || xi != std::floor(xi)) return false;
                    break;
            }
        }
        return true;
    }

    // Per-coordinate natural parameter.
    double natural_param(double theta_l, std::size_t l) const {
        switch (family_) {
            case Family::normal_known_variance:
            case Family::lognormal_known_logvar:
                return theta_l / var_[l];
            case Family::poisson:
                return std::log(theta_l);
            case Family::exponential:
                return -theta_l;
        }
        return 0.0;
    }

    std::vector<double> natural_params(const Scenario& s) const {
        std::vector<double> eta(dim_);
        for (std::size_t l = 0; l < dim_; ++l) eta[l] = natural_param(s[l], l);
        return eta;
    }

    bool eta_in_natural_space(double eta_l, std::size_t) const {
        switch (family_) {
            case Family::normal_known_variance:
            case Family::lognormal_known_logvar:
            case Family::poisson:
                return std::isfinite(eta_l);
            case Family::exponential:
                return eta_l < 0.0;
        }
        return false;
    }

    // Per-coordinate log-partition A(eta); finite exactly on the natural space.
    double log_partition(double eta_l, std::size_t l) const {
        if (!eta_in_natural_space(eta_l, l)) return kInf;
        switch (family_) {
            case Family::normal_known_variance:
            case Family::lognormal_known_logvar:
                return 0.5 * eta_l * eta_l * var_[l];
            case Family::poisson:
                return std::exp(eta_l);
            case Family::exponential:
                return -std::log(-eta_l);
        }
        return kInf;
    }

    double sufficient_stat(double x_l, std::size_t) const {
        return family_ == Family::lognormal_known_logvar ? std::log(x_l) : x_l;
    }

    double log_base_measure(double x_l, std::size_t l) const {
        switch (family_) {
            case Family::normal_known_variance:
                return -0.5 * x_l * x_l / var_[l] - kLnSqrt2Pi - 0.5 * std::log(var_[l]);
            case Family::lognormal_known_logvar: {
                double lx = std::log(x_l);
                return -0.5 * lx * lx / var_[l] - lx - kLnSqrt2Pi - 0.5 * std::log(var_[l]);
            }
            case Family::poisson:
                return -log_factorial(static_cast<unsigned>(x_l));
            case Family::exponential:
                return 0.0;
        }
        return 0.0;
    }

    double log_density(const Scenario& s, const InputSample& x) const {
        require_admissible(s);
        if (!in_support(x)) return -kInf;
        double acc = 0.0;
        for (std::size_t l = 0; l < dim_; ++l) {
            double eta = natural_param(s[l], l);
            acc += log_base_measure(x[l], l) + eta * sufficient_stat(x[l], l) -
                   log_partition(eta, l);
        }
        return acc;
    }

    // ln W_ij(x) = ln h(x;theta_i) - ln h(x;theta_j), evaluated without the
    // base measure (it cancels) so extreme pairs stay exact in log space.
    double log_likelihood_ratio(const Scenario& ti, const Scenario& tj,
                                const InputSample& x) const {
        require_admissible(ti);
        require_admissible(tj);
        double acc = 0.0;
        for (std::size_t l = 0; l < dim_; ++l) {
            double ei = natural_param(ti[l], l), ej = natural_param(tj[l], l);
            acc += (ei - ej) * sufficient_stat(x[l], l) -
                   (log_partition(ei, l) - log_partition(ej, l));
        }
        return acc;
    }

    // Closed-form E_{theta_j}[W_ij^2]; factorizes over coordinates. Returns
    // +inf when any coordinate's 2 eta_i - eta_j leaves the natural space.
    double second_moment_lr(const Scenario& ti, const Scenario& tj) const {
        require_admissible(ti);
        require_admissible(tj);
        double log_acc = 0.0;
        for (std::size_t l = 0; l < dim_; ++l) {
            double ei = natural_param(ti[l], l), ej = natural_param(tj[l], l);
            double e2 = 2.0 * ei - ej;
            if (!eta_in_natural_space(e2, l)) return kInf;
            log_acc += log_partition(ej, l) - 2.0 * log_partition(ei, l) +
                       log_partition(e2, l);
        }
        return std::exp(log_acc);  // overflows to +inf for extreme pairs, which is legal
    }

    std::vector<InputSample> sample(const Scenario& s, std::size_t n, RngStream& stream) const {
        require_admissible(s);
        std::vector<InputSample> out;
        out.reserve(n);
        for (std::size_t k = 0; k < n; ++k) {
            InputSample x(dim_);
            for (std::size_t l = 0; l < dim_; ++l) x[l] = sample_coord(s[l], l, stream);
            out.push_back(std::move(x));
        }
        return out;
    }

    double sample_coord(double theta_l, std::size_t l, RngStream& stream) const {
        switch (family_) {
            case Family::normal_known_variance:
                return theta_l + std::sqrt(var_[l]) * stream.normal();
            case Family::lognormal_known_logvar:
                return std::exp(theta_l + std::sqrt(var_[l]) * stream.normal());
            case Family::poisson:
                return static_cast<double>(stream.poisson(theta_l));
            case Family::exponential:
                return stream.exponential(theta_l);
        }
        return 0.0;
    }

  private:
    Family family_;
    std::size_t dim_;
    std::vector<double> var_;
};

}  // namespace nestlr
