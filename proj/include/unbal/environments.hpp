#pragma once
/*
Stochastic bandit instances (unit-variance Gaussian or Bernoulli rewards),
gap tables, the lower-bound instance family, and adversarial gain matrices
with their CSV on-disk format (no header, comma separated, LF endings,
row = time step, column = arm).
*/

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "unbal/rng.hpp"

namespace unbal {

enum class Noise { GaussianUnit, Bernoulli };

Noise noise_from_string(const std::string& s);
std::string to_string(Noise n);

struct StochasticInstance {
    std::vector<double> means;
    Noise noise;

    StochasticInstance(std::vector<double> m, Noise nz);
    int arms() const { return static_cast<int>(means.size()); }
};

struct GapTable {
    int optimal_arm;                 // lowest index among maximisers (0-based)
    std::vector<double> delta;       // delta[j] = mu* - mu_j
    std::vector<double> delta_pair;  // row-major K x K, pair(j,i) = mu_i - mu_j
    int arms;

    double pair(int j, int i) const {
        return delta_pair[static_cast<std::size_t>(j) * arms + i];
    }
};

// one reward draw; one logical event on the stream
double pull(const StochasticInstance& instance, int arm, RandomStream& rng);

GapTable gaps(const StochasticInstance& instance);

// The K Gaussian instances of the lower-bound construction:
// (mu_k)_j = base + { 0 if j=1; eps_k if j=k!=1; -eps_j otherwise }.
// Requires every eps in (0, 1/2] and eps_1 = min eps.
std::vector<StochasticInstance> lower_bound_family(const std::vector<double>& eps,
                                            double base = 0.5);

// eps_k = min(1/2, c R_k / n), clamped below at eps_min so the family
// stays well posed when R_k = 0.
std::vector<double> eps_schedule(const std::vector<double>& r, std::int64_t n,
                                 double c = 4.0, double eps_min = 1e-3);

struct GainMatrix {
    std::int64_t steps;  // n
    int arms;            // K
    std::vector<double> gains;  // row-major steps x arms, entries in [0,1]

    GainMatrix(std::int64_t n, int k, std::vector<double> g);
    double at(std::int64_t t, int arm) const {
        return gains[static_cast<std::size_t>(t) * arms + arm];
    }
    // column totals sum_t g_{i,t}
    std::vector<double> arm_totals() const;
};

class CsvError : public std::runtime_error {
public:
    CsvError(const std::string& what, std::int64_t row, std::int64_t col)
        : std::runtime_error(what), row(row), col(col) {}
    std::int64_t row;  // 1-based
    std::int64_t col;  // 1-based
};

GainMatrix load_gains(const std::string& path);
void save_gains(const GainMatrix& m, const std::string& path);

} // namespace unbal
