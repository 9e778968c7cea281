#include "unbal/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unbal {

BoundVector::BoundVector(std::int64_t n, std::vector<double> b)
    : horizon(n), bounds(std::move(b)) {
    if (n < 1) throw std::invalid_argument("BoundVector: horizon must be >= 1");
    if (bounds.size() < 2) throw std::invalid_argument("BoundVector: needs K >= 2 arms");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        const double v = bounds[i];
        if (!std::isfinite(v) || v <= 0.0 || v > static_cast<double>(n)) {
            throw std::invalid_argument("BoundVector: entry " + std::to_string(i + 1) +
                                        " = " + std::to_string(v) + " outside (0, n]");
        }
    }
}

double harmonic_sum(int k) {
    if (k < 2) throw std::invalid_argument("harmonic_sum: requires K >= 2");
    double h = 0.0;
    for (int j = 2; j <= k; ++j) h += 1.0 / static_cast<double>(j - 1);
    return h;
}

FrontierReport contains(const BoundVector& b) {
    const double n = static_cast<double>(b.horizon);
    const int k = b.arms();
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += n / b.bounds[j];

    FrontierReport rep;
    rep.slack.resize(k);
    rep.member = true;
    const double tol = kMembershipTol * n;
    for (int i = 0; i < k; ++i) {
        const double others = total - n / b.bounds[i];
        rep.slack[i] = b.bounds[i] - std::min(n, others);
        if (rep.slack[i] < -tol) rep.member = false;
    }
    return rep;
}

BoundVector uniform_point(std::int64_t n, int k) {
    if (n < 1) throw std::invalid_argument("uniform_point: horizon must be >= 1");
    if (k < 2) throw std::invalid_argument("uniform_point: requires K >= 2");
    const double v = std::sqrt(static_cast<double>(n) * (k - 1));
    if (v > static_cast<double>(n)) {
        throw InfeasibleError("uniform_point: sqrt(n(K-1)) = " + std::to_string(v) +
                                  " exceeds n = " + std::to_string(n),
                              v, static_cast<double>(n));
    }
    return BoundVector(n, std::vector<double>(static_cast<std::size_t>(k), v));
}

BoundVector harmonic_point(double b1, std::int64_t n, int k) {
    if (n < 1) throw std::invalid_argument("harmonic_point: horizon must be >= 1");
    if (k < 2) throw std::invalid_argument("harmonic_point: requires K >= 2");
    const double nd = static_cast<double>(n);
    if (!(b1 > 0.0) || b1 > nd) {
        throw std::invalid_argument("harmonic_point: B_1 must lie in (0, n]");
    }
    const double h = harmonic_sum(k);
    // entries fit in (0, n] iff B_1 >= (K-1)H; membership of the point
    // additionally needs B_1 <= B_2 = nH/B_1, i.e. B_1 <= sqrt(nH)
    // (binding only for K >= 3; for K = 2 the point is B_2 = n/B_1,
    // on the frontier for any feasible B_1).
    const double min_b1 = (k - 1) * h;
    const double max_b1 = (k == 2) ? nd : std::sqrt(nd * h);
    const double tol = kMembershipTol * nd;
    if (b1 < min_b1 - tol) {
        throw InfeasibleError("harmonic_point: B_1 = " + std::to_string(b1) +
                                  " too small; minimal feasible B_1 = (K-1)H = " +
                                  std::to_string(min_b1),
                              min_b1, max_b1);
    }
    if (b1 > max_b1 + tol) {
        throw InfeasibleError("harmonic_point: B_1 = " + std::to_string(b1) +
                                  " too large for arm 1 to be favoured; maximal "
                                  "feasible B_1 = sqrt(nH) = " +
                                  std::to_string(max_b1),
                              min_b1, max_b1);
    }
    std::vector<double> bounds(static_cast<std::size_t>(k));
    bounds[0] = std::min(b1, nd);
    for (int arm = 2; arm <= k; ++arm) {
        bounds[static_cast<std::size_t>(arm - 1)] =
            std::min(nd, (arm - 1) * nd * h / b1);
    }
    return BoundVector(n, std::move(bounds));
}

BoundVector power_point(double p, std::int64_t n, int k) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("power_point: p must lie in (0,1), got " +
                                    std::to_string(p));
    }
    return harmonic_point(std::pow(static_cast<double>(n), p), n, k);
}

double simple_lower(double b1, int k, std::int64_t n) {
    if (k < 2) throw std::invalid_argument("simple_lower: requires k >= 2");
    if (!(b1 > 0.0) || b1 > static_cast<double>(n)) {
        throw std::invalid_argument("simple_lower: B_1 must lie in (0, n]");
    }
    return (k - 1) * static_cast<double>(n) / b1;
}

FrontierReport lower_bound_certificate(const std::vector<double>& r, std::int64_t n) {
    if (r.size() < 2) {
        throw std::invalid_argument("lower_bound_certificate: needs K >= 2 entries");
    }
    const double nd = static_cast<double>(n);
    const double k = static_cast<double>(r.size());
    std::vector<double> capped(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || r[i] < 0.0) {
            throw std::invalid_argument("lower_bound_certificate: entry " +
                                        std::to_string(i + 1) + " must be finite and >= 0");
        }
        capped[i] = std::min(nd, 8.0 * (r[i] + k));
    }
    return contains(BoundVector(n, std::move(capped)));
}

} // namespace unbal
