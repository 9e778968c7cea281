#pragma once
/*
The agents: unbalanced MOSS, unbalanced UCB, the classical MOSS / UCB
baselines, and Exp3-gamma with a biased prior.

Index formulas (natural logs throughout):

  unbalanced MOSS  mu_hat + sqrt((4/s) log+(n_i/s)) - sqrt(1/n_i),   n_i = n^2/B_i^2
  classical MOSS   mu_hat + sqrt((4/s) log+(n/(K s)))
  unbalanced UCB   mu_hat + sqrt((2+eps) log(t) / s) - sqrt(log(n)/n_i)
  classical UCB    mu_hat + sqrt((2+eps) log(t) / s)

Unpulled arms (s = 0) take a +infinity sentinel, so every policy opens
with a round robin in arm order. Ties break to the lowest arm index.

Exp3-gamma keeps log-weights and updates the chosen arm by
-eta * (1 - gain) / prob (importance-weighted loss estimate); the prior
and learning rate come from exp3_params:
  rho_1 = exp(-B_1^2 / (4Kn)),  rho_i = (1 - rho_1)/(K-1),  eta = B_1/(2Kn).
*/

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "unbal/environments.hpp"
#include "unbal/frontier.hpp"
#include "unbal/rng.hpp"

namespace unbal {

// ---- index formulas -------------------------------------------------------

double umoss_index(double mean_hat, std::int64_t s, double n_i);
double moss_index(double mean_hat, std::int64_t s, std::int64_t n, int k);
double uucb_index(double mean_hat, std::int64_t s, std::int64_t t, std::int64_t n,
                  double n_i, double eps);
double ucb_index(double mean_hat, std::int64_t s, std::int64_t t, double eps);

// ---- parameters and state -------------------------------------------------

struct UnbalancedParams {
    std::int64_t horizon;       // n
    BoundVector bounds;         // B
    std::vector<double> n_i;    // n^2 / B_i^2
    double ucb_eps;             // the (2+eps) exploration constant

    explicit UnbalancedParams(BoundVector b, double ucb_eps = 0.05);
};

struct PolicyState {
    std::int64_t t = 1;               // current step, 1-based
    std::vector<std::int64_t> counts; // T_i(t-1)
    std::vector<double> sums;         // per-arm reward totals
    std::vector<double> log_weights;  // Exp3 only

    explicit PolicyState(int k)
        : counts(static_cast<std::size_t>(k), 0), sums(static_cast<std::size_t>(k), 0.0) {}

    // empirical mean with the mu_hat_{i,0} = 0 convention
    double mean_hat(int arm) const {
        const auto i = static_cast<std::size_t>(arm);
        return counts[i] > 0 ? sums[i] / static_cast<double>(counts[i]) : 0.0;
    }
    int arms() const { return static_cast<int>(counts.size()); }
};

// argmax selections over full state; ties (including sentinel ties) break
// to the lowest arm index
int umoss_select(const PolicyState& state, const UnbalancedParams& params);
int moss_select(const PolicyState& state, std::int64_t n);
int uucb_select(const PolicyState& state, const UnbalancedParams& params);
int ucb_select(const PolicyState& state, double eps);

// ---- Exp3-gamma -----------------------------------------------------------

struct Exp3Params {
    std::vector<double> prior;  // rho, sums to 1
    double eta;
};

Exp3Params exp3_params(double b1, std::int64_t n, int k);

// softmax with max subtraction; entries strictly positive, sum 1
std::vector<double> exp3_probs(const std::vector<double>& log_weights);

// only the chosen arm's log-weight changes, by -eta * (1 - gain) / prob
void exp3_update(std::vector<double>& log_weights, int chosen, double gain,
                 double prob, double eta);

// ---- shifted gaps ---------------------------------------------------------

// bar Delta_{ji} = mu_i - mu_j + sqrt(1/n_j) - sqrt(1/n_i)
double shifted_gap(const StochasticInstance& instance, const UnbalancedParams& params,
                   int i, int j);

// ---- episode-facing policy objects ---------------------------------------

struct PolicySpec {
    enum class Kind { Umoss, Moss, Uucb, Ucb, Exp3g };
    Kind kind;
    std::optional<BoundVector> bounds;  // umoss / uucb
    double ucb_eps = 0.05;              // uucb / ucb
    double exp3_b1 = 0.0;               // exp3g

    static PolicySpec umoss(BoundVector b);
    static PolicySpec moss();
    static PolicySpec uucb(BoundVector b, double eps = 0.05);
    static PolicySpec ucb(double eps = 0.05);
    static PolicySpec exp3g(double b1);

    std::string name() const;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual int select(RandomStream& rng) = 0;
    virtual void update(int arm, double reward) = 0;
    virtual const PolicyState& state() const = 0;
    // probability the policy assigned to the arm it last selected
    // (1 for deterministic index policies)
    virtual double last_prob() const { return 1.0; }
};

// Builds a fresh policy for one episode of horizon n over k arms.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::int64_t n, int k);

} // namespace unbal
