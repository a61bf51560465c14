#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "nestlr/math.hpp"

namespace nestlr {

// Single-owner random stream. A stream is addressed by (master seed, stream id);
// substreams for a study follow the scheme id = macro * 2^32 + scenario.
// State mixing via SplitMix64, generation via xoshiro256++.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
        std::uint64_t z = master_seed ^ (stream_id * 0x9E3779B97F4A7C15ull) ^ 0xA3C59AC2ull;
        for (auto& si : s_) {
            z += 0x9E3779B97F4A7C15ull;
            std::uint64_t t = z;
            t = (t ^ (t >> 30)) * 0xBF58476D1CE4E5B9ull;
            t = (t ^ (t >> 27)) * 0x94D049BB133111EBull;
            si = t ^ (t >> 31);
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // forbidden all-zero state
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); };
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe under log().
    double uniform_pos() { return 1.0 - uniform(); }

    // Box-Muller with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double rr = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * kPi * u2;
        spare_ = rr * std::sin(a);
        has_spare_ = true;
        return rr * std::cos(a);
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::domain_error("exponential: rate must be > 0");
        return -std::log(uniform_pos()) / rate;
    }

    // Poisson: sequential inversion for small means, PTRD rejection above.
    unsigned poisson(double lambda) {
        if (!(lambda >= 0.0)) throw std::domain_error("poisson: lambda must be >= 0");
        if (lambda == 0.0) return 0;
        if (lambda <= 30.0) return poisson_inversion(lambda);
        return poisson_ptrd(lambda);
    }

    // Marsaglia-Tsang; shape boost below 1.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0)) {
            throw std::domain_error("gamma: shape and rate must be > 0");
        }
        if (shape < 1.0) {
            double u = uniform_pos();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

  private:
    unsigned poisson_inversion(double lambda) {
        double p = std::exp(-lambda);
        double cum = p;
        double u = uniform();
        unsigned x = 0;
        while (u > cum) {
            ++x;
            p *= lambda / static_cast<double>(x);
            cum += p;
            if (x > 2000) break;  // u == 1-ulp guard
        }
        return x;
    }

    // Hoermann's PTRD transformed rejection, valid for lambda >= 10.
    unsigned poisson_ptrd(double lambda) {
        const double slam = std::sqrt(lambda);
        const double loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform() - 0.5;
            double v = uniform();
            double us = 0.5 - std::fabs(u);
            double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<unsigned>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * loglam - lambda - log_factorial(static_cast<unsigned>(k))) {
                return static_cast<unsigned>(k);
            }
        }
    }

    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Documented substream scheme: one stream per (macro replication, scenario).
inline std::uint64_t stream_id(std::uint64_t macro, std::uint64_t scenario) {
    return (macro << 32) + scenario;
}

// Distinct sub-master per named study component (design variant, oracle, ...).
inline std::uint64_t derive_seed(std::uint64_t master, const char* tag) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char* p = tag; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 0x100000001B3ull;
    }
    return master ^ h;
}

}  // namespace nestlr
