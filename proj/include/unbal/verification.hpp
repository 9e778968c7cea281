#pragma once
/*
Empirical checks of the probabilistic inequalities: the maximal
inequality for subgaussian partial sums, the peeling bound on the
MOSS-style confidence failure, the stopping-time expectation bound, the
252B worst-case regret bound with its per-instance corollary, and the
Exp3-gamma regret bound with the biased-prior closed forms.

Each check is one-sided: pass means empirical <= theoretical + 3 stderr.
Theoretical values always come from the module formulas (tau_mean_bound,
exp3_params, ...), never from inline re-derivations. Checkers are pure
functions of (inputs, seed); identical seeds reproduce identical reports.
*/

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "unbal/environments.hpp"
#include "unbal/frontier.hpp"
#include "unbal/policies.hpp"
#include "unbal/simulation.hpp"

namespace unbal {

struct BoundCheckReport {
    enum class Status { Pass, Fail, Inconclusive };

    std::string name;
    double empirical = 0.0;
    double theoretical = 0.0;
    double std_err = 0.0;
    std::int64_t reps = 0;
    Status status = Status::Fail;

    double censor_rate = 0.0;   // tau checks only
    bool pass() const { return status == Status::Pass; }
    double ratio() const { return theoretical != 0.0 ? empirical / theoretical : 0.0; }
};

// P(exists t <= n : sum_{s<=t} X_s >= eps) vs exp(-eps^2 / (2n)), X_s ~ N(0,1)
BoundCheckReport check_maximal(std::int64_t n, double epsilon, std::int64_t reps,
                               std::uint64_t seed, int threads = 1);

// P(Z_i >= delta) vs min(1, 20/(n_i delta^2)) with
// Z_i = max_{1<=s<=n} mu - mu_hat_{i,s} - sqrt((4/s) log+(n_i/s)), Gaussian arm
BoundCheckReport check_peeling(double n_i, std::int64_t n, double delta,
                               std::int64_t reps, std::uint64_t seed, int threads = 1);

// E[tau] vs tau_mean_bound(n_j, delta_bar); requires delta_bar in (0,2].
// Censoring rate >= 0.1% makes the report Inconclusive.
BoundCheckReport check_tau(double n_j, double delta_bar, std::int64_t reps,
                           std::uint64_t seed, int threads = 1);

// Per arm: worst_case_scan max vs 252 B_i ("wc252_arm_<i>").
// Per grid instance: regret at the optimal arm vs min_i(n Delta_i + 252 B_i)
// ("refined_instance_<g>"). Requires contains(B).member.
std::vector<BoundCheckReport> check_regret_bound(const PolicySpec& spec,
                                                 const BoundVector& b,
                                                 const std::vector<StochasticInstance>& grid,
                                                 std::int64_t n, std::int64_t reps,
                                                 std::uint64_t seed, int threads = 1);

struct LabeledGains {
    std::string label;
    GainMatrix gains;
};

// Two reports per gain matrix: empirical R_g vs the eta K n + log(1/rho_{i*})/eta
// bound with the matrix's best arm as i* ("exp3_bound_<label>"), and vs the
// biased-prior closed form (B_1 when i* = 1, else
// B_1/2 + (2Kn/B_1) log(4Kn(K-1)/B_1^2)) ("exp3_prior_<label>").
std::vector<BoundCheckReport> check_exp3_bound(double b1, std::int64_t n, int k,
                                               const std::vector<LabeledGains>& gains,
                                               std::int64_t reps, std::uint64_t seed,
                                               int threads = 1);

// The frozen adversarial inputs used by the verification suite:
// constant | single_best | alternating | random_a | random_b.
GainMatrix make_gain_matrix(const std::string& kind, std::int64_t n, int k);
const std::vector<std::string>& gain_matrix_kinds();

// CSV row: name,empirical,theoretical,stderr,reps,pass
// (pass is true/false/inconclusive).
void write_report_row(std::ostream& os, const BoundCheckReport& r);
std::string report_human_line(const BoundCheckReport& r);

} // namespace unbal
