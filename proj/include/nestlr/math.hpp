#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nestlr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLnSqrt2Pi = 0.91893853320467274178;  // ln sqrt(2*pi)

// Standard normal cdf via erfc; accurate to machine precision.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x - kLnSqrt2Pi);
}

// Inverse standard normal cdf. Acklam's rational approximation refined with
// one Halley step; absolute error well below 1e-14 over (0,1).
inline double normal_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("normal_ppf: p must be in (0,1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against the erfc-based cdf.
    double e = normal_cdf(x) - p;
    double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

// ln(x!) for the Poisson pmf; exact table for small x, lgamma above.
inline double log_factorial(unsigned x) {
    static const double table[] = {
        0.0, 0.0, 0.6931471805599453, 1.791759469228055, 3.1780538303479458,
        4.787491742782046, 6.579251212010101, 8.525161361065415, 10.60460290274525,
        12.801827480081469};
    if (x < 10) return table[x];
    return std::lgamma(static_cast<double>(x) + 1.0);
}

// Weighted average of outputs with log-space weights; max-shift keeps the
// exponentials in range. Accumulating deviations from a reference value makes
// a constant input come back exactly, whatever the weights.
inline double log_weighted_mean(const std::vector<double>& values,
                                const std::vector<double>& log_weights) {
    if (values.empty() || values.size() != log_weights.size()) {
        throw std::invalid_argument("log_weighted_mean: size mismatch or empty");
    }
    double mx = -kInf;
    for (double lw : log_weights) mx = std::max(mx, lw);
    const double ref = values[0];
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        double w = std::exp(log_weights[k] - mx);
        num += (values[k] - ref) * w;
        den += w;
    }
    return ref + num / den;
}

}  // namespace nestlr
