#include "unbal/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unbal/numerics.hpp"

namespace unbal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exponent floor keeps softmax entries strictly positive under extreme
// log-weight spreads (exp(-700) is still normal-range)
constexpr double kSoftmaxFloor = -700.0;

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}

} // namespace

double umoss_index(double mean_hat, std::int64_t s, double n_i) {
    if (s < 0) throw std::invalid_argument("umoss_index: s must be >= 0");
    if (s == 0) return kInf;
    const double sd = static_cast<double>(s);
    return mean_hat + std::sqrt((4.0 / sd) * log_plus(n_i / sd)) - std::sqrt(1.0 / n_i);
}

double moss_index(double mean_hat, std::int64_t s, std::int64_t n, int k) {
    if (s < 0) throw std::invalid_argument("moss_index: s must be >= 0");
    if (s == 0) return kInf;
    const double sd = static_cast<double>(s);
    return mean_hat + std::sqrt((4.0 / sd) * log_plus(static_cast<double>(n) / (k * sd)));
}

double uucb_index(double mean_hat, std::int64_t s, std::int64_t t, std::int64_t n,
                  double n_i, double eps) {
    if (s < 0) throw std::invalid_argument("uucb_index: s must be >= 0");
    if (t < 1) throw std::invalid_argument("uucb_index: t must be >= 1");
    if (s == 0) return kInf;
    const double sd = static_cast<double>(s);
    return mean_hat + std::sqrt((2.0 + eps) * std::log(static_cast<double>(t)) / sd) -
           std::sqrt(std::log(static_cast<double>(n)) / n_i);
}

double ucb_index(double mean_hat, std::int64_t s, std::int64_t t, double eps) {
    if (s < 0) throw std::invalid_argument("ucb_index: s must be >= 0");
    if (t < 1) throw std::invalid_argument("ucb_index: t must be >= 1");
    if (s == 0) return kInf;
    return mean_hat + std::sqrt((2.0 + eps) * std::log(static_cast<double>(t)) /
                                static_cast<double>(s));
}

UnbalancedParams::UnbalancedParams(BoundVector b, double ucb_eps)
    : horizon(b.horizon), bounds(std::move(b)), ucb_eps(ucb_eps) {
    if (!(ucb_eps > 0.0)) throw std::invalid_argument("UnbalancedParams: ucb_eps must be > 0");
    const double nd = static_cast<double>(horizon);
    n_i.resize(bounds.bounds.size());
    for (std::size_t i = 0; i < bounds.bounds.size(); ++i) {
        n_i[i] = nd * nd / (bounds.bounds[i] * bounds.bounds[i]);
    }
}

int umoss_select(const PolicyState& state, const UnbalancedParams& params) {
    std::vector<double> idx(static_cast<std::size_t>(state.arms()));
    for (int i = 0; i < state.arms(); ++i) {
        idx[static_cast<std::size_t>(i)] =
            umoss_index(state.mean_hat(i), state.counts[static_cast<std::size_t>(i)],
                        params.n_i[static_cast<std::size_t>(i)]);
    }
    return argmax_lowest(idx);
}

int moss_select(const PolicyState& state, std::int64_t n) {
    std::vector<double> idx(static_cast<std::size_t>(state.arms()));
    for (int i = 0; i < state.arms(); ++i) {
        idx[static_cast<std::size_t>(i)] =
            moss_index(state.mean_hat(i), state.counts[static_cast<std::size_t>(i)], n,
                       state.arms());
    }
    return argmax_lowest(idx);
}

int uucb_select(const PolicyState& state, const UnbalancedParams& params) {
    std::vector<double> idx(static_cast<std::size_t>(state.arms()));
    for (int i = 0; i < state.arms(); ++i) {
        idx[static_cast<std::size_t>(i)] =
            uucb_index(state.mean_hat(i), state.counts[static_cast<std::size_t>(i)], state.t,
                       params.horizon, params.n_i[static_cast<std::size_t>(i)],
                       params.ucb_eps);
    }
    return argmax_lowest(idx);
}

int ucb_select(const PolicyState& state, double eps) {
    std::vector<double> idx(static_cast<std::size_t>(state.arms()));
    for (int i = 0; i < state.arms(); ++i) {
        idx[static_cast<std::size_t>(i)] =
            ucb_index(state.mean_hat(i), state.counts[static_cast<std::size_t>(i)], state.t, eps);
    }
    return argmax_lowest(idx);
}

Exp3Params exp3_params(double b1, std::int64_t n, int k) {
    if (k < 2) throw std::invalid_argument("exp3_params: requires K >= 2");
    if (!(b1 > 0.0) || b1 > static_cast<double>(n)) {
        throw std::invalid_argument("exp3_params: B_1 must lie in (0, n]");
    }
    const double kn = static_cast<double>(k) * static_cast<double>(n);
    Exp3Params p;
    p.eta = b1 / (2.0 * kn);
    const double rho1 = std::exp(-b1 * b1 / (4.0 * kn));
    p.prior.assign(static_cast<std::size_t>(k), (1.0 - rho1) / (k - 1));
    p.prior[0] = rho1;
    return p;
}

std::vector<double> exp3_probs(const std::vector<double>& log_weights) {
    if (log_weights.empty()) throw std::invalid_argument("exp3_probs: empty weights");
    double max_lw = -kInf;
    for (double lw : log_weights) {
        if (std::isnan(lw) || lw == kInf) {
            throw std::invalid_argument("exp3_probs: log-weights must be finite");
        }
        max_lw = std::max(max_lw, lw);
    }
    if (max_lw == -kInf) {
        throw std::logic_error("exp3_probs: all log-weights are -inf");
    }
    std::vector<double> p(log_weights.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        p[i] = std::exp(std::max(log_weights[i] - max_lw, kSoftmaxFloor));
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

void exp3_update(std::vector<double>& log_weights, int chosen, double gain,
                 double prob, double eta) {
    if (chosen < 0 || chosen >= static_cast<int>(log_weights.size())) {
        throw std::out_of_range("exp3_update: chosen arm out of range");
    }
    if (!(prob > 0.0) || prob > 1.0) {
        throw std::invalid_argument("exp3_update: prob must lie in (0, 1]");
    }
    log_weights[static_cast<std::size_t>(chosen)] -= eta * (1.0 - gain) / prob;
}

double shifted_gap(const StochasticInstance& instance, const UnbalancedParams& params,
                   int i, int j) {
    if (i < 0 || i >= instance.arms() || j < 0 || j >= instance.arms()) {
        throw std::out_of_range("shifted_gap: arm out of range");
    }
    // gap part and shift part grouped separately, so the antisymmetry
    // shifted_gap(i,j) = -shifted_gap(j,i) holds exactly in floating point
    const double gap = instance.means[static_cast<std::size_t>(i)] -
                       instance.means[static_cast<std::size_t>(j)];
    const double shift = std::sqrt(1.0 / params.n_i[static_cast<std::size_t>(j)]) -
                         std::sqrt(1.0 / params.n_i[static_cast<std::size_t>(i)]);
    return gap + shift;
}

// ---- PolicySpec -----------------------------------------------------------

PolicySpec PolicySpec::umoss(BoundVector b) {
    return PolicySpec{Kind::Umoss, std::move(b), 0.05, 0.0};
}
PolicySpec PolicySpec::moss() { return PolicySpec{Kind::Moss, std::nullopt, 0.05, 0.0}; }
PolicySpec PolicySpec::uucb(BoundVector b, double eps) {
    return PolicySpec{Kind::Uucb, std::move(b), eps, 0.0};
}
PolicySpec PolicySpec::ucb(double eps) { return PolicySpec{Kind::Ucb, std::nullopt, eps, 0.0}; }
PolicySpec PolicySpec::exp3g(double b1) {
    return PolicySpec{Kind::Exp3g, std::nullopt, 0.05, b1};
}

std::string PolicySpec::name() const {
    switch (kind) {
        case Kind::Umoss: return "umoss";
        case Kind::Moss: return "moss";
        case Kind::Uucb: return "uucb";
        case Kind::Ucb: return "ucb";
        case Kind::Exp3g: return "exp3g";
    }
    return "?";
}

// ---- policy objects -------------------------------------------------------

namespace {

// Unbalanced MOSS / classical MOSS indices depend only on the arm's own
// statistics, so each update refreshes a single cached entry.
class CachedIndexPolicy final : public Policy {
public:
    enum class Flavor { Umoss, Moss };

    CachedIndexPolicy(Flavor flavor, std::int64_t n, int k,
                      std::optional<UnbalancedParams> params)
        : flavor_(flavor), horizon_(n), params_(std::move(params)), state_(k),
          index_(static_cast<std::size_t>(k), kInf) {}

    int select(RandomStream&) override { return argmax_lowest(index_); }

    void update(int arm, double reward) override {
        auto i = static_cast<std::size_t>(arm);
        state_.counts[i] += 1;
        state_.sums[i] += reward;
        state_.t += 1;
        const double mean = state_.sums[i] / static_cast<double>(state_.counts[i]);
        index_[i] = flavor_ == Flavor::Umoss
                        ? umoss_index(mean, state_.counts[i], params_->n_i[i])
                        : moss_index(mean, state_.counts[i], horizon_, state_.arms());
    }

    const PolicyState& state() const override { return state_; }

private:
    Flavor flavor_;
    std::int64_t horizon_;
    std::optional<UnbalancedParams> params_;
    PolicyState state_;
    std::vector<double> index_;
};

// UCB-style indices depend on t, so every arm is rescored each round.
class UcbStylePolicy final : public Policy {
public:
    UcbStylePolicy(std::int64_t n, int k, std::optional<UnbalancedParams> params, double eps)
        : horizon_(n), params_(std::move(params)), eps_(eps), state_(k) {}

    int select(RandomStream&) override {
        return params_ ? uucb_select(state_, *params_) : ucb_select(state_, eps_);
    }

    void update(int arm, double reward) override {
        auto i = static_cast<std::size_t>(arm);
        state_.counts[i] += 1;
        state_.sums[i] += reward;
        state_.t += 1;
    }

    const PolicyState& state() const override { return state_; }

private:
    std::int64_t horizon_;
    std::optional<UnbalancedParams> params_;
    double eps_;
    PolicyState state_;
};

class Exp3Policy final : public Policy {
public:
    Exp3Policy(std::int64_t n, int k, double b1) : params_(exp3_params(b1, n, k)), state_(k) {
        state_.log_weights.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) {
            state_.log_weights[static_cast<std::size_t>(i)] =
                std::log(params_.prior[static_cast<std::size_t>(i)]);
        }
    }

    int select(RandomStream& rng) override {
        probs_ = exp3_probs(state_.log_weights);
        const double u = rng.uniform01();
        double cum = 0.0;
        int chosen = static_cast<int>(probs_.size()) - 1;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            cum += probs_[i];
            if (u < cum) {
                chosen = static_cast<int>(i);
                break;
            }
        }
        last_prob_ = probs_[static_cast<std::size_t>(chosen)];
        return chosen;
    }

    void update(int arm, double reward) override {
        if (!(reward >= 0.0 && reward <= 1.0)) {
            throw std::invalid_argument("exp3g: gains must lie in [0,1], got " +
                                        std::to_string(reward));
        }
        exp3_update(state_.log_weights, arm, reward, last_prob_, params_.eta);
        auto i = static_cast<std::size_t>(arm);
        state_.counts[i] += 1;
        state_.sums[i] += reward;
        state_.t += 1;
    }

    const PolicyState& state() const override { return state_; }
    double last_prob() const override { return last_prob_; }

private:
    Exp3Params params_;
    PolicyState state_;
    std::vector<double> probs_;
    double last_prob_ = 1.0;
};

UnbalancedParams params_for(const PolicySpec& spec, std::int64_t n, int k) {
    if (!spec.bounds) {
        throw std::invalid_argument(spec.name() + " requires a bound vector B");
    }
    if (spec.bounds->horizon != n) {
        throw std::invalid_argument(spec.name() + ": bound vector horizon " +
                                    std::to_string(spec.bounds->horizon) +
                                    " does not match episode horizon " + std::to_string(n));
    }
    if (spec.bounds->arms() != k) {
        throw std::invalid_argument(spec.name() + ": bound vector has " +
                                    std::to_string(spec.bounds->arms()) + " arms, episode has " +
                                    std::to_string(k));
    }
    return UnbalancedParams(*spec.bounds, spec.ucb_eps);
}

} // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::int64_t n, int k) {
    if (n < 1) throw std::invalid_argument("make_policy: horizon must be >= 1");
    if (k < 1) throw std::invalid_argument("make_policy: needs >= 1 arm");
    switch (spec.kind) {
        case PolicySpec::Kind::Umoss:
            return std::make_unique<CachedIndexPolicy>(CachedIndexPolicy::Flavor::Umoss, n, k,
                                                       params_for(spec, n, k));
        case PolicySpec::Kind::Moss:
            return std::make_unique<CachedIndexPolicy>(CachedIndexPolicy::Flavor::Moss, n, k,
                                                       std::nullopt);
        case PolicySpec::Kind::Uucb:
            return std::make_unique<UcbStylePolicy>(n, k, params_for(spec, n, k), spec.ucb_eps);
        case PolicySpec::Kind::Ucb:
            return std::make_unique<UcbStylePolicy>(n, k, std::nullopt, spec.ucb_eps);
        case PolicySpec::Kind::Exp3g:
            return std::make_unique<Exp3Policy>(n, k, spec.exp3_b1);
    }
    throw std::logic_error("make_policy: unknown policy kind");
}

} // namespace unbal
