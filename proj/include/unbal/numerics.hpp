#pragma once
/*
Scalar special functions shared by the index policies and bound formulas.

  log_plus(x)     = max(0, ln x)
  lambert_w0(x)   = principal branch of w*e^w = x, x >= 0
  tau_mean_bound    = 40/d^2 + (64/d^2) * W(n_j * d^2 / 64), the expected
                    stopping-time bound used by the regret analysis.

All pure functions over doubles; safe for concurrent use.
*/

#include <cmath>
#include <stdexcept>
#include <string>

namespace unbal {

inline double log_plus(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_plus: requires x > 0, got " + std::to_string(x));
    }
    // x = +inf would propagate; callers cap their arguments first
    // (unpulled arms use the index sentinel instead of n_i / 0).
    const double l = std::log(x);
    return l > 0.0 ? l : 0.0;
}

// Halley iteration on f(w) = w*e^w - x, initial guess ln(1+x).
// Cubic convergence; stops when the step drops below 1e-14 (50-iter cap).
inline double lambert_w0(double x) {
    if (!(x >= 0.0)) {
        throw std::domain_error("lambert_w0: requires x >= 0, got " + std::to_string(x));
    }
    if (x == 0.0) return 0.0;
    double w = std::log1p(x);
    for (int iter = 0; iter < 50; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return w < 0.0 ? 0.0 : w;
}

inline double tau_mean_bound(double n_j, double delta_bar) {
    if (!(delta_bar > 0.0)) {
        throw std::domain_error("tau_mean_bound: requires delta_bar > 0, got " +
                                std::to_string(delta_bar));
    }
    if (!(n_j > 0.0)) {
        throw std::domain_error("tau_mean_bound: requires n_j > 0, got " + std::to_string(n_j));
    }
    const double d2 = delta_bar * delta_bar;
    return 40.0 / d2 + (64.0 / d2) * lambert_w0(n_j * d2 / 64.0);
}

} // namespace unbal
