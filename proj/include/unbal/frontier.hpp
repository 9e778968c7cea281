#pragma once
/*
Geometry of the achievable worst-case-regret set

  B = { B in (0,n]^K : B_i >= min(n, sum_{j != i} n/B_j) for all i }

with membership tests, the canonical frontier points (uniform, harmonic,
power), the simple per-arm lower bound (k-1)n/B_1, and the lower-bound
certificate that maps a regret vector R to min(n, 8(R+K)) and tests it
for membership.

Membership uses slack_i = B_i - min(n, sum_{j != i} n/B_j) with tolerance
slack_i >= -1e-9 * n, so canonical points sitting exactly on the boundary
do not flip on rounding.
*/

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace unbal {

// relative (to n) tolerance on boundary membership
constexpr double kMembershipTol = 1e-9;

struct BoundVector {
    std::int64_t horizon;        // n
    std::vector<double> bounds;  // K entries, each in (0, n]

    BoundVector(std::int64_t n, std::vector<double> b);
    int arms() const { return static_cast<int>(bounds.size()); }
};

struct FrontierReport {
    bool member;
    std::vector<double> slack;  // slack_i = B_i - min(n, sum_{j != i} n/B_j)
};

// Carries the feasible B_1 range when a harmonic/power construction fails.
class InfeasibleError : public std::domain_error {
public:
    InfeasibleError(const std::string& what, double min_b1, double max_b1)
        : std::domain_error(what), min_feasible_b1(min_b1), max_feasible_b1(max_b1) {}
    double min_feasible_b1;
    double max_feasible_b1;
};

// H = sum_{k=2}^{K} 1/(k-1), by direct summation
double harmonic_sum(int k);

FrontierReport contains(const BoundVector& b);

// every entry sqrt(n(K-1)); zero slack at every arm
BoundVector uniform_point(std::int64_t n, int k);

// entry 1 = B_1, entry k = (k-1) n H / B_1; arm 1 is the favoured arm
BoundVector harmonic_point(double b1, std::int64_t n, int k);

// harmonic point with B_1 = n^p, p in (0,1)
BoundVector power_point(double p, std::int64_t n, int k);

// necessary lower bound (k-1) n / B_1 on the k-th sorted worst-case regret
double simple_lower(double b1, int k, std::int64_t n);

// membership of min(n, 8(R_i + K)); a diagnostic when R is an empirical
// underestimate, a certified contradiction only for true worst-case vectors
FrontierReport lower_bound_certificate(const std::vector<double>& r, std::int64_t n);

} // namespace unbal
