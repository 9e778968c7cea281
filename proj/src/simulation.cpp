#include "unbal/simulation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "unbal/numerics.hpp"

namespace unbal {

namespace {

constexpr double kIdentityTol = 1e-9;

// mean / stderr over values in replication-index order
void mean_and_stderr(const std::vector<double>& values, double& mean_out, double& se_out) {
    const auto reps = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / reps;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    mean_out = mean;
    se_out = values.size() > 1 ? std::sqrt(ss / (reps - 1.0)) / std::sqrt(reps) : 0.0;
}

} // namespace

void parallel_for_index(std::int64_t count, int threads,
                        const std::function<void(std::int64_t)>& body) {
    if (threads <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int workers = static_cast<int>(std::min<std::int64_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(count, std::memory_order_relaxed);
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

EpisodeResult run_episode(const PolicySpec& spec, const StochasticInstance& instance,
                          std::int64_t n, std::uint64_t seed, bool trace) {
    if (n < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
    if (spec.kind == PolicySpec::Kind::Exp3g && instance.noise == Noise::GaussianUnit) {
        throw std::invalid_argument(
            "run_episode: exp3g needs gains in [0,1]; use Bernoulli rewards or the "
            "adversarial runner");
    }
    const int k = instance.arms();
    auto policy = make_policy(spec, n, k);
    RandomStream rng(seed);

    EpisodeResult result;
    result.pulls.assign(static_cast<std::size_t>(k), 0);
    if (trace) {
        result.chosen.reserve(static_cast<std::size_t>(n));
        result.rewards.reserve(static_cast<std::size_t>(n));
    }

    // Kahan-compensated accumulation of sum_t mu_{I_t}; keeps the identity
    // check meaningful at the 1e-9 scale over n = 10^7-size episodes.
    double chosen_mean_sum = 0.0, comp = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
        const int arm = policy->select(rng);
        const double reward = pull(instance, arm, rng);
        policy->update(arm, reward);
        result.pulls[static_cast<std::size_t>(arm)] += 1;
        const double y = instance.means[static_cast<std::size_t>(arm)] - comp;
        const double s = chosen_mean_sum + y;
        comp = (s - chosen_mean_sum) - y;
        chosen_mean_sum = s;
        if (trace) {
            result.chosen.push_back(arm);
            result.rewards.push_back(reward);
        }
    }

    result.pseudo_regret.resize(static_cast<std::size_t>(k));
    const GapTable table = gaps(instance);
    std::int64_t total_pulls = 0;
    for (int i = 0; i < k; ++i) {
        result.pseudo_regret[static_cast<std::size_t>(i)] =
            static_cast<double>(n) * instance.means[static_cast<std::size_t>(i)] -
            chosen_mean_sum;
        total_pulls += result.pulls[static_cast<std::size_t>(i)];
        double via_gaps = 0.0;
        for (int j = 0; j < k; ++j) {
            via_gaps += table.pair(j, i) * static_cast<double>(result.pulls[static_cast<std::size_t>(j)]);
        }
        if (std::abs(via_gaps - result.pseudo_regret[static_cast<std::size_t>(i)]) > kIdentityTol) {
            throw std::logic_error("run_episode: pseudo-regret identity violated");
        }
    }
    if (total_pulls != n) throw std::logic_error("run_episode: pull counts do not sum to n");
    return result;
}

RegretEstimate monte_carlo(const PolicySpec& spec, const StochasticInstance& instance,
                           std::int64_t n, std::int64_t reps, std::uint64_t master_seed,
                           int threads) {
    if (reps < 2) throw std::invalid_argument("monte_carlo: reps must be >= 2");
    const int k = instance.arms();
    std::vector<double> regrets(static_cast<std::size_t>(reps * k));
    parallel_for_index(reps, threads, [&](std::int64_t r) {
        const EpisodeResult ep = run_episode(spec, instance, n, child_seed(master_seed,
                                                                           static_cast<std::uint64_t>(r)));
        for (int i = 0; i < k; ++i) {
            regrets[static_cast<std::size_t>(r * k + i)] = ep.pseudo_regret[static_cast<std::size_t>(i)];
        }
    });

    RegretEstimate est;
    est.reps = reps;
    est.mean.resize(static_cast<std::size_t>(k));
    est.std_err.resize(static_cast<std::size_t>(k));
    std::vector<double> column(static_cast<std::size_t>(reps));
    for (int i = 0; i < k; ++i) {
        for (std::int64_t r = 0; r < reps; ++r) {
            column[static_cast<std::size_t>(r)] = regrets[static_cast<std::size_t>(r * k + i)];
        }
        mean_and_stderr(column, est.mean[static_cast<std::size_t>(i)],
                        est.std_err[static_cast<std::size_t>(i)]);
    }
    return est;
}

WorstCaseEstimate worst_case_scan(const PolicySpec& spec,
                                  const std::vector<StochasticInstance>& grid,
                                  std::int64_t n, std::int64_t reps,
                                  std::uint64_t master_seed, int threads) {
    if (grid.empty()) throw std::invalid_argument("worst_case_scan: empty grid");
    const int k = grid.front().arms();
    for (const auto& inst : grid) {
        if (inst.arms() != k) {
            throw std::invalid_argument("worst_case_scan: instances must share K");
        }
    }
    WorstCaseEstimate wc;
    wc.per_instance.reserve(grid.size());
    for (const auto& inst : grid) {
        wc.per_instance.push_back(monte_carlo(spec, inst, n, reps, master_seed, threads));
    }
    wc.per_arm_max.assign(static_cast<std::size_t>(k), -std::numeric_limits<double>::infinity());
    wc.argmax_instance.assign(static_cast<std::size_t>(k), 0);
    wc.std_err_at_max.assign(static_cast<std::size_t>(k), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (int i = 0; i < k; ++i) {
            const double m = wc.per_instance[g].mean[static_cast<std::size_t>(i)];
            if (m > wc.per_arm_max[static_cast<std::size_t>(i)]) {
                wc.per_arm_max[static_cast<std::size_t>(i)] = m;
                wc.argmax_instance[static_cast<std::size_t>(i)] = static_cast<int>(g);
                wc.std_err_at_max[static_cast<std::size_t>(i)] =
                    wc.per_instance[g].std_err[static_cast<std::size_t>(i)];
            }
        }
    }
    return wc;
}

AdversarialEstimate run_adversarial(const PolicySpec& spec, const GainMatrix& gains,
                                    std::int64_t reps, std::uint64_t master_seed,
                                    int threads) {
    if (spec.kind != PolicySpec::Kind::Exp3g) {
        throw std::invalid_argument("run_adversarial: requires an exp3g policy spec");
    }
    if (reps < 2) throw std::invalid_argument("run_adversarial: reps must be >= 2");
    const std::int64_t n = gains.steps;
    const int k = gains.arms;

    std::vector<double> totals(static_cast<std::size_t>(reps));
    parallel_for_index(reps, threads, [&](std::int64_t r) {
        auto policy = make_policy(spec, n, k);
        RandomStream rng(child_seed(master_seed, static_cast<std::uint64_t>(r)));
        double got = 0.0;
        for (std::int64_t t = 0; t < n; ++t) {
            const int arm = policy->select(rng);
            const double g = gains.at(t, arm);
            policy->update(arm, g);
            got += g;
        }
        totals[static_cast<std::size_t>(r)] = got;
    });

    const std::vector<double> column_totals = gains.arm_totals();
    AdversarialEstimate est;
    est.reps = reps;
    est.best_arm = 0;
    for (int i = 1; i < k; ++i) {
        if (column_totals[static_cast<std::size_t>(i)] >
            column_totals[static_cast<std::size_t>(est.best_arm)]) {
            est.best_arm = i;
        }
    }
    est.best_total = column_totals[static_cast<std::size_t>(est.best_arm)];
    double mean_total = 0.0, se = 0.0;
    mean_and_stderr(totals, mean_total, se);
    est.mean = est.best_total - mean_total;
    est.std_err = se;
    return est;
}

TauSample tau_sample(double n_j, double mu_j, double delta_bar, Noise noise,
                     RandomStream& rng) {
    if (!(delta_bar > 0.0)) throw std::domain_error("tau_sample: delta_bar must be > 0");
    if (!(n_j > 0.0)) throw std::domain_error("tau_sample: n_j must be > 0");
    const StochasticInstance arm({mu_j}, noise);
    const double threshold = mu_j + delta_bar / 2.0;
    const auto cap = static_cast<std::int64_t>(std::ceil(10.0 * n_j));
    double sum = 0.0;
    for (std::int64_t s = 1; s <= cap; ++s) {
        sum += pull(arm, 0, rng);
        const double mean_hat = sum / static_cast<double>(s);
        const double width =
            std::sqrt((4.0 / static_cast<double>(s)) * log_plus(n_j / static_cast<double>(s)));
        if (mean_hat + width <= threshold) return TauSample{s, false};
    }
    return TauSample{cap, true};
}

} // namespace unbal
