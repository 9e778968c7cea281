#include "unbal/environments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "unbal/csvio.hpp"

namespace unbal {

namespace {
constexpr double kSpreadTol = 1e-12;
}

Noise noise_from_string(const std::string& s) {
    if (s == "gaussian") return Noise::GaussianUnit;
    if (s == "bernoulli") return Noise::Bernoulli;
    throw std::invalid_argument("unknown noise family '" + s +
                                "' (expected gaussian|bernoulli)");
}

std::string to_string(Noise n) {
    return n == Noise::GaussianUnit ? "gaussian" : "bernoulli";
}

StochasticInstance::StochasticInstance(std::vector<double> m, Noise nz)
    : means(std::move(m)), noise(nz) {
    if (means.empty()) throw std::invalid_argument("StochasticInstance: needs >= 1 arm");
    double lo = means[0], hi = means[0];
    for (double v : means) {
        if (!std::isfinite(v)) throw std::invalid_argument("StochasticInstance: non-finite mean");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo > 1.0 + kSpreadTol) {
        throw std::invalid_argument("StochasticInstance: mean spread " +
                                    std::to_string(hi - lo) + " exceeds 1");
    }
    if (noise == Noise::Bernoulli) {
        for (double v : means) {
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument(
                    "StochasticInstance: Bernoulli means must lie in [0,1]");
            }
        }
    }
}

double pull(const StochasticInstance& instance, int arm, RandomStream& rng) {
    if (arm < 0 || arm >= instance.arms()) {
        throw std::out_of_range("pull: arm " + std::to_string(arm + 1) + " out of range");
    }
    if (instance.noise == Noise::GaussianUnit) {
        return instance.means[static_cast<std::size_t>(arm)] + rng.normal();
    }
    return rng.bernoulli(instance.means[static_cast<std::size_t>(arm)]) ? 1.0 : 0.0;
}

GapTable gaps(const StochasticInstance& instance) {
    const int k = instance.arms();
    GapTable table;
    table.arms = k;
    table.optimal_arm = 0;
    for (int i = 1; i < k; ++i) {
        if (instance.means[static_cast<std::size_t>(i)] >
            instance.means[static_cast<std::size_t>(table.optimal_arm)]) {
            table.optimal_arm = i;  // ties keep the lowest index
        }
    }
    const double best = instance.means[static_cast<std::size_t>(table.optimal_arm)];
    table.delta.resize(static_cast<std::size_t>(k));
    table.delta_pair.resize(static_cast<std::size_t>(k) * k);
    for (int j = 0; j < k; ++j) {
        table.delta[static_cast<std::size_t>(j)] = best - instance.means[static_cast<std::size_t>(j)];
        for (int i = 0; i < k; ++i) {
            table.delta_pair[static_cast<std::size_t>(j) * k + i] =
                instance.means[static_cast<std::size_t>(i)] -
                instance.means[static_cast<std::size_t>(j)];
        }
    }
    return table;
}

std::vector<StochasticInstance> lower_bound_family(const std::vector<double>& eps, double base) {
    const int k = static_cast<int>(eps.size());
    if (k < 2) throw std::invalid_argument("lower_bound_family: needs K >= 2");
    double eps_min = eps[0];
    for (double e : eps) {
        if (!(e > 0.0) || e > 0.5) {
            throw std::invalid_argument("lower_bound_family: every eps must lie in (0, 1/2]");
        }
        eps_min = std::min(eps_min, e);
    }
    if (eps[0] > eps_min) {
        throw std::invalid_argument("lower_bound_family: eps_1 must be minimal "
                                    "(pre-sort the regret vector)");
    }
    std::vector<StochasticInstance> family;
    family.reserve(static_cast<std::size_t>(k));
    for (int inst = 0; inst < k; ++inst) {
        std::vector<double> means(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            double shift;
            if (j == 0) {
                shift = 0.0;
            } else if (j == inst) {
                shift = eps[static_cast<std::size_t>(inst)];
            } else {
                shift = -eps[static_cast<std::size_t>(j)];
            }
            means[static_cast<std::size_t>(j)] = base + shift;
        }
        family.emplace_back(std::move(means), Noise::GaussianUnit);
    }
    return family;
}

std::vector<double> eps_schedule(const std::vector<double>& r, std::int64_t n,
                                 double c, double eps_min) {
    if (!(c > 2.0)) throw std::invalid_argument("eps_schedule: requires c > 2");
    if (!(eps_min > 0.0) || eps_min > 0.5) {
        throw std::invalid_argument("eps_schedule: eps_min must lie in (0, 1/2]");
    }
    std::vector<double> eps(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || r[i] < 0.0) {
            throw std::invalid_argument("eps_schedule: R entries must be finite and >= 0");
        }
        eps[i] = std::max(eps_min, std::min(0.5, c * r[i] / static_cast<double>(n)));
    }
    return eps;
}

GainMatrix::GainMatrix(std::int64_t n, int k, std::vector<double> g)
    : steps(n), arms(k), gains(std::move(g)) {
    if (n < 1 || k < 1) throw std::invalid_argument("GainMatrix: needs n >= 1 and K >= 1");
    if (gains.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(k)) {
        throw std::invalid_argument("GainMatrix: size mismatch");
    }
    for (std::size_t idx = 0; idx < gains.size(); ++idx) {
        const double v = gains[idx];
        if (!(v >= 0.0 && v <= 1.0)) {
            const std::int64_t row = static_cast<std::int64_t>(idx) / k + 1;
            const std::int64_t col = static_cast<std::int64_t>(idx) % k + 1;
            throw CsvError("gain entry " + fmt_double(v) + " at row " +
                               std::to_string(row) + ", col " + std::to_string(col) +
                               " outside [0,1]",
                           row, col);
        }
    }
}

std::vector<double> GainMatrix::arm_totals() const {
    std::vector<double> totals(static_cast<std::size_t>(arms), 0.0);
    for (std::int64_t t = 0; t < steps; ++t) {
        for (int i = 0; i < arms; ++i) {
            totals[static_cast<std::size_t>(i)] += at(t, i);
        }
    }
    return totals;
}

GainMatrix load_gains(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open gains file: " + path, 0, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    std::vector<double> values;
    int cols = -1;
    std::int64_t row = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        const bool last = (eol == std::string::npos);
        const std::string_view line(text.data() + pos, (last ? text.size() : eol) - pos);
        pos = last ? text.size() : eol + 1;
        if (line.empty() && pos >= text.size()) break;  // trailing newline
        ++row;
        int col = 0;
        std::size_t field_start = 0;
        while (true) {
            std::size_t comma = line.find(',', field_start);
            const std::string_view field =
                line.substr(field_start, comma == std::string_view::npos
                                             ? std::string_view::npos
                                             : comma - field_start);
            ++col;
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
                throw CsvError("gains parse error at row " + std::to_string(row) +
                                   ", col " + std::to_string(col),
                               row, col);
            }
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            field_start = comma + 1;
        }
        if (cols == -1) {
            cols = col;
        } else if (col != cols) {
            throw CsvError("gains row " + std::to_string(row) + " has " +
                               std::to_string(col) + " columns, expected " +
                               std::to_string(cols),
                           row, col);
        }
    }
    if (row == 0 || cols <= 0) throw CsvError("gains file is empty: " + path, 0, 0);
    return GainMatrix(row, cols, std::move(values));
}

void save_gains(const GainMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot write gains file: " + path, 0, 0);
    for (std::int64_t t = 0; t < m.steps; ++t) {
        for (int i = 0; i < m.arms; ++i) {
            if (i > 0) out << ',';
            out << fmt_double(m.at(t, i));
        }
        out << '\n';
    }
}

} // namespace unbal
