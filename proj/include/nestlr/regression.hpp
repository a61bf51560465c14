#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace nestlr {

// Ordinary least squares via Householder QR; throws on rank deficiency.
// X is row-major n x p with n >= p.
inline std::vector<double> ols_fit(std::vector<double> X, std::vector<double> y,
                                   std::size_t n, std::size_t p) {
    if (X.size() != n * p || y.size() != n || n < p || p == 0) {
        throw std::invalid_argument("ols_fit: bad dimensions");
    }
    double max_abs = 0.0;
    for (double v : X) max_abs = std::max(max_abs, std::fabs(v));
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += X[i * p + k] * X[i * p + k];
        norm = std::sqrt(norm);
        if (norm <= 1e-10 * (1.0 + max_abs)) {
            throw std::runtime_error("ols_fit: rank-deficient design matrix");
        }
        double alpha = X[k * p + k] > 0.0 ? -norm : norm;
        std::vector<double> v(n - k);
        v[0] = X[k * p + k] - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = X[i * p + k];
        double vnorm2 = 0.0;
        for (double vi : v) vnorm2 += vi * vi;
        if (vnorm2 > 0.0) {
            for (std::size_t j = k; j < p; ++j) {
                double dot = 0.0;
                for (std::size_t i = k; i < n; ++i) dot += v[i - k] * X[i * p + j];
                double f = 2.0 * dot / vnorm2;
                for (std::size_t i = k; i < n; ++i) X[i * p + j] -= f * v[i - k];
            }
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * y[i];
            double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) y[i] -= f * v[i - k];
        }
        X[k * p + k] = alpha;
    }
    // Back substitution on R beta = Q^T y.
    std::vector<double> beta(p, 0.0);
    for (std::size_t kk = p; kk-- > 0;) {
        double acc = y[kk];
        for (std::size_t j = kk + 1; j < p; ++j) acc -= X[kk * p + j] * beta[j];
        double rkk = X[kk * p + kk];
        if (std::fabs(rkk) <= 1e-10 * (1.0 + max_abs)) {
            throw std::runtime_error("ols_fit: rank-deficient design matrix");
        }
        beta[kk] = acc / rkk;
    }
    return beta;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// Laguerre polynomials L_0..L_3.
inline void laguerre4(double u, double out[4]) {
    out[0] = 1.0;
    out[1] = 1.0 - u;
    out[2] = 1.0 - 2.0 * u + 0.5 * u * u;
    out[3] = 1.0 - 3.0 * u + 1.5 * u * u - u * u * u / 6.0;
}

}  // namespace nestlr
