#pragma once
/*
Episode execution and Monte Carlo estimation.

Replication r of a run with master seed S always uses
RandomStream(child_seed(S, r)); results are merged by replication index,
so estimates are identical for any thread count (a single-threaded mode
is threads = 1). Worst-case scans reuse the same master seed for every
grid instance (common random numbers), so enlarging a grid never changes
existing entries.

Every episode asserts the pseudo-regret identity
  R_{mu,i} = sum_j Delta_{ji} * pulls_j
against the independently accumulated sum of chosen means (1e-9 absolute
tolerance) and that pull counts sum to n.
*/

#include <cstdint>
#include <functional>
#include <vector>

#include "unbal/environments.hpp"
#include "unbal/policies.hpp"

namespace unbal {

struct EpisodeResult {
    std::vector<std::int64_t> pulls;   // per arm, sums to n
    std::vector<double> pseudo_regret; // entry i = n mu_i - sum_t mu_{I_t}
    std::vector<int> chosen;           // length-n trace, only when requested
    std::vector<double> rewards;       // parallel to chosen, only when requested
};

struct RegretEstimate {
    std::vector<double> mean;     // per-arm mean pseudo-regret
    std::vector<double> std_err;  // sample std / sqrt(reps)
    std::int64_t reps = 0;
};

struct WorstCaseEstimate {
    std::vector<double> per_arm_max;       // max over grid of mean pseudo-regret
    std::vector<int> argmax_instance;      // grid index achieving it
    std::vector<double> std_err_at_max;    // stderr of the maximising estimate
    std::vector<RegretEstimate> per_instance;
};

struct AdversarialEstimate {
    double mean = 0.0;      // estimated R_g = best arm total - E[policy total]
    double std_err = 0.0;
    std::int64_t reps = 0;
    int best_arm = 0;       // argmax of column totals, lowest index on ties
    double best_total = 0.0;
};

struct TauSample {
    std::int64_t value = 0;
    bool censored = false;
};

EpisodeResult run_episode(const PolicySpec& spec, const StochasticInstance& instance,
                          std::int64_t n, std::uint64_t seed, bool trace = false);

RegretEstimate monte_carlo(const PolicySpec& spec, const StochasticInstance& instance,
                           std::int64_t n, std::int64_t reps, std::uint64_t master_seed,
                           int threads = 1);

// Grid maximum of Monte Carlo means; a LOWER estimate of the true
// worst-case regret sup_mu (never an upper bound).
WorstCaseEstimate worst_case_scan(const PolicySpec& spec,
                                  const std::vector<StochasticInstance>& grid,
                                  std::int64_t n, std::int64_t reps,
                                  std::uint64_t master_seed, int threads = 1);

// Exp3-gamma against a fixed (oblivious) gain matrix.
AdversarialEstimate run_adversarial(const PolicySpec& spec, const GainMatrix& gains,
                                    std::int64_t reps, std::uint64_t master_seed,
                                    int threads = 1);

// One draw of the stopping time
//   tau = min{ s : mu_hat_{j,s} + sqrt((4/s) log+(n_j/s)) <= mu_j + delta_bar/2 },
// capped at ceil(10 n_j) with an explicit censoring flag.
TauSample tau_sample(double n_j, double mu_j, double delta_bar, Noise noise,
                     RandomStream& rng);

// Deterministic parallel loop: body(i) for i in [0, count), any scheduling,
// rethrows the first body exception. threads <= 1 runs inline.
void parallel_for_index(std::int64_t count, int threads,
                        const std::function<void(std::int64_t)>& body);

} // namespace unbal
