#include "unbal/experiments.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "unbal/csvio.hpp"
#include "unbal/simulation.hpp"

namespace unbal {

namespace {

using nlohmann::json;

// writes to cfg.out, or stdout when no path is configured
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    bool to_file() const { return file_.is_open(); }

private:
    std::ofstream file_;
};

double parse_real(const std::string& text, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("cannot parse " + what + ": '" + text + "'");
    }
    return v;
}

StochasticInstance fig1_instance(double delta) {
    return StochasticInstance({0.0, -delta}, Noise::GaussianUnit);
}

StochasticInstance fig2_instance(int k, int i_star, double delta) {
    std::vector<double> means(static_cast<std::size_t>(k), 0.0);
    means[static_cast<std::size_t>(i_star - 1)] = delta;
    return StochasticInstance(std::move(means), Noise::GaussianUnit);
}

struct CellEstimate {
    double regret;
    double std_err;
};

// mean pseudo-regret w.r.t. the instance's optimal arm
CellEstimate optimal_arm_regret(const PolicySpec& spec, const StochasticInstance& inst,
                                const ExperimentConfig& cfg) {
    const RegretEstimate est =
        monte_carlo(spec, inst, cfg.n, cfg.reps, cfg.seed, cfg.threads);
    const int opt = gaps(inst).optimal_arm;
    return {est.mean[static_cast<std::size_t>(opt)],
            est.std_err[static_cast<std::size_t>(opt)]};
}

int verify_exit_code(const std::vector<BoundCheckReport>& reports) {
    for (const auto& r : reports) {
        if (r.status == BoundCheckReport::Status::Fail) return kExitNegative;
    }
    return kExitOk;
}

void emit_reports(const ExperimentConfig& cfg, const std::string& suite,
                  const json& resolved, const std::vector<BoundCheckReport>& reports) {
    OutputTarget target(cfg.out);
    write_csv_preamble(target.stream(), kVersion, resolved.dump(), cfg.seed);
    target.stream() << "name,empirical,theoretical,stderr,reps,pass\n";
    for (const auto& r : reports) write_report_row(target.stream(), r);
    if (target.to_file()) {
        for (const auto& r : reports) std::cout << report_human_line(r) << "\n";
        std::cout << "verify " << suite << ": " << reports.size() << " checks written to "
                  << cfg.out << "\n";
    }
}

} // namespace

std::vector<double> GridSpec::values() const {
    if (!(delta_step > 0.0)) throw std::invalid_argument("grid: delta_step must be > 0");
    if (delta_max < delta_min) {
        throw std::invalid_argument("grid: delta_max must be >= delta_min");
    }
    std::vector<double> out;
    const auto count = static_cast<std::int64_t>(
        std::floor((delta_max - delta_min) / delta_step + 1e-9));
    out.reserve(static_cast<std::size_t>(count) + 1);
    for (std::int64_t i = 0; i <= count; ++i) {
        out.push_back(delta_min + static_cast<double>(i) * delta_step);
    }
    return out;
}

std::string ExperimentConfig::canonical_json() const {
    json j;  // std::map-backed: keys serialize sorted, so the echo is stable
    // threads intentionally omitted: results are identical for any count
    j["experiment"] = experiment;
    j["n"] = n;
    j["k"] = k;
    j["reps"] = reps;
    j["seed"] = seed;
    j["policy"] = policy;
    j["b"] = b_spec;
    j["grid"] = {{"delta_min", grid.delta_min},
                 {"delta_max", grid.delta_max},
                 {"delta_step", grid.delta_step}};
    j["out"] = out;
    j["trace"] = trace;
    if (!means.empty()) j["means"] = means;
    j["noise"] = noise;
    j["ucb_eps"] = ucb_eps;
    j["exp3_b1"] = exp3_b1;
    return j.dump();
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "experiment") base.experiment = value.get<std::string>();
            else if (key == "n") base.n = value.get<std::int64_t>();
            else if (key == "k") base.k = value.get<int>();
            else if (key == "reps") base.reps = value.get<std::int64_t>();
            else if (key == "seed") base.seed = value.get<std::uint64_t>();
            else if (key == "threads") base.threads = value.get<int>();
            else if (key == "policy") base.policy = value.get<std::string>();
            else if (key == "b") {
                if (value.is_string()) {
                    base.b_spec = value.get<std::string>();
                } else if (value.is_array()) {
                    std::string joined;
                    for (const auto& entry : value) {
                        if (!joined.empty()) joined += ',';
                        joined += fmt_double(entry.get<double>());
                    }
                    base.b_spec = joined;
                } else {
                    throw std::invalid_argument(
                        "config field 'b' must be a string or an array of reals");
                }
            }
            else if (key == "grid") {
                if (value.contains("delta_min")) base.grid.delta_min = value["delta_min"].get<double>();
                if (value.contains("delta_max")) base.grid.delta_max = value["delta_max"].get<double>();
                if (value.contains("delta_step")) base.grid.delta_step = value["delta_step"].get<double>();
            }
            else if (key == "out") base.out = value.get<std::string>();
            else if (key == "trace") base.trace = value.get<bool>();
            else if (key == "means") base.means = value.get<std::vector<double>>();
            else if (key == "noise") base.noise = value.get<std::string>();
            else if (key == "ucb_eps") base.ucb_eps = value.get<double>();
            else if (key == "exp3_b1") base.exp3_b1 = value.get<double>();
            else throw std::invalid_argument("config field '" + key + "' is not recognised");
        } catch (const json::exception& e) {
            throw std::invalid_argument("config field '" + key + "': " + e.what());
        }
    }
    return base;
}

std::vector<double> parse_vector(const std::string& text, std::int64_t n) {
    std::vector<double> out;
    std::size_t pos = 0;
    int index = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        const std::string field =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        ++index;
        if (field == "n") {
            out.push_back(static_cast<double>(n));
        } else if (field.empty()) {
            throw std::invalid_argument("vector component " + std::to_string(index) +
                                        " is empty");
        } else {
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
                throw std::invalid_argument("vector component " + std::to_string(index) +
                                            " ('" + field + "') is not a number");
            }
            out.push_back(v);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

BoundVector resolve_bounds(const std::string& b_spec, std::int64_t n, int k) {
    const std::string spec = b_spec.empty() ? "uniform" : b_spec;
    if (spec == "uniform") return uniform_point(n, k);
    if (spec.rfind("harmonic:", 0) == 0) {
        return harmonic_point(parse_real(spec.substr(9), "harmonic B_1"), n, k);
    }
    if (spec.rfind("power:", 0) == 0) {
        return power_point(parse_real(spec.substr(6), "power exponent"), n, k);
    }
    std::vector<double> v = parse_vector(spec, n);
    if (static_cast<int>(v.size()) != k) {
        throw std::invalid_argument("bound vector has " + std::to_string(v.size()) +
                                    " entries, expected K = " + std::to_string(k));
    }
    return BoundVector(n, std::move(v));
}

PolicySpec resolve_policy(const ExperimentConfig& cfg) {
    if (cfg.policy == "umoss") return PolicySpec::umoss(resolve_bounds(cfg.b_spec, cfg.n, cfg.k));
    if (cfg.policy == "moss") return PolicySpec::moss();
    if (cfg.policy == "uucb") {
        return PolicySpec::uucb(resolve_bounds(cfg.b_spec, cfg.n, cfg.k), cfg.ucb_eps);
    }
    if (cfg.policy == "ucb") return PolicySpec::ucb(cfg.ucb_eps);
    if (cfg.policy == "exp3g") return PolicySpec::exp3g(cfg.exp3_b1);
    throw std::invalid_argument("unknown policy '" + cfg.policy +
                                "' (expected umoss|moss|uucb|ucb|exp3g)");
}

std::vector<StochasticInstance> fig1_grid(const GridSpec& grid) {
    std::vector<StochasticInstance> out;
    for (double delta : grid.values()) out.push_back(fig1_instance(delta));
    return out;
}

std::vector<StochasticInstance> fig2_grid(const GridSpec& grid, int k) {
    std::vector<StochasticInstance> out;
    for (int i_star = 1; i_star <= k; ++i_star) {
        for (double delta : grid.values()) out.push_back(fig2_instance(k, i_star, delta));
    }
    return out;
}

BoundVector fig1_bounds(std::int64_t n) { return power_point(1.0 / 3.0, n, 2); }

BoundVector fig2_bounds(std::int64_t n, int k) {
    return harmonic_point(std::sqrt(static_cast<double>(n)), n, k);
}

int run_fig1(const ExperimentConfig& cfg) {
    if (cfg.k != 2) throw std::invalid_argument("fig1 is a two-armed experiment (k = 2)");
    const BoundVector b = cfg.b_spec.empty() ? fig1_bounds(cfg.n)
                                             : resolve_bounds(cfg.b_spec, cfg.n, cfg.k);
    const PolicySpec moss = PolicySpec::moss();
    const PolicySpec umoss = PolicySpec::umoss(b);

    OutputTarget target(cfg.out);
    write_csv_preamble(target.stream(), kVersion, cfg.canonical_json(), cfg.seed);
    target.stream() << "delta,moss_regret,moss_stderr,umoss_regret,umoss_stderr\n";
    for (double delta : cfg.grid.values()) {
        const StochasticInstance inst = fig1_instance(delta);
        const CellEstimate m = optimal_arm_regret(moss, inst, cfg);
        const CellEstimate u = optimal_arm_regret(umoss, inst, cfg);
        target.stream() << fmt_double(delta) << ',' << fmt_double(m.regret) << ','
                        << fmt_double(m.std_err) << ',' << fmt_double(u.regret) << ','
                        << fmt_double(u.std_err) << '\n';
    }
    return kExitOk;
}

int run_fig2(const ExperimentConfig& cfg) {
    if (cfg.k < 2) throw std::invalid_argument("fig2 requires k >= 2");
    const BoundVector b = cfg.b_spec.empty() ? fig2_bounds(cfg.n, cfg.k)
                                             : resolve_bounds(cfg.b_spec, cfg.n, cfg.k);
    const PolicySpec moss = PolicySpec::moss();
    const PolicySpec umoss = PolicySpec::umoss(b);

    OutputTarget target(cfg.out);
    write_csv_preamble(target.stream(), kVersion, cfg.canonical_json(), cfg.seed);
    target.stream() << "theta,i_star,delta,moss_regret,moss_stderr,umoss_regret,umoss_stderr\n";
    for (int i_star = 1; i_star <= cfg.k; ++i_star) {
        for (double delta : cfg.grid.values()) {
            const StochasticInstance inst = fig2_instance(cfg.k, i_star, delta);
            const CellEstimate m = optimal_arm_regret(moss, inst, cfg);
            const CellEstimate u = optimal_arm_regret(umoss, inst, cfg);
            const double theta = delta + (i_star - 1) / 2.0;
            target.stream() << fmt_double(theta) << ',' << i_star << ',' << fmt_double(delta)
                            << ',' << fmt_double(m.regret) << ',' << fmt_double(m.std_err)
                            << ',' << fmt_double(u.regret) << ',' << fmt_double(u.std_err)
                            << '\n';
        }
    }
    return kExitOk;
}

int run_simulate(const ExperimentConfig& cfg) {
    if (cfg.means.empty()) {
        throw std::invalid_argument("simulate requires --means (comma-separated rewards)");
    }
    if (static_cast<int>(cfg.means.size()) != cfg.k) {
        throw std::invalid_argument("means has " + std::to_string(cfg.means.size()) +
                                    " entries, expected k = " + std::to_string(cfg.k));
    }
    const StochasticInstance inst(cfg.means, noise_from_string(cfg.noise));
    const PolicySpec spec = resolve_policy(cfg);
    const RegretEstimate est = monte_carlo(spec, inst, cfg.n, cfg.reps, cfg.seed, cfg.threads);

    OutputTarget target(cfg.out);
    write_csv_preamble(target.stream(), kVersion, cfg.canonical_json(), cfg.seed);
    target.stream() << "arm,mean_regret,stderr\n";
    for (int i = 0; i < inst.arms(); ++i) {
        target.stream() << (i + 1) << ',' << fmt_double(est.mean[static_cast<std::size_t>(i)])
                        << ',' << fmt_double(est.std_err[static_cast<std::size_t>(i)]) << '\n';
    }
    if (cfg.trace) {
        if (cfg.out.empty()) {
            throw std::invalid_argument("--trace requires --out (trace goes to <out>.trace.csv)");
        }
        const EpisodeResult ep =
            run_episode(spec, inst, cfg.n, child_seed(cfg.seed, 0), /*trace=*/true);
        std::ofstream tf(cfg.out + ".trace.csv", std::ios::binary);
        if (!tf) throw std::invalid_argument("cannot open trace file");
        tf << "step,arm,reward\n";
        for (std::size_t t = 0; t < ep.chosen.size(); ++t) {
            tf << (t + 1) << ',' << (ep.chosen[t] + 1) << ',' << fmt_double(ep.rewards[t])
               << '\n';
        }
    }
    return kExitOk;
}

int run_frontier_check(const ExperimentConfig& cfg, const std::string& b_text) {
    const std::vector<double> v = parse_vector(b_text, cfg.n);
    const BoundVector b(cfg.n, v);
    const FrontierReport rep = contains(b);

    OutputTarget target(cfg.out);
    target.stream() << "member: " << (rep.member ? "true" : "false") << "\n";
    target.stream() << "slack: ";
    for (std::size_t i = 0; i < rep.slack.size(); ++i) {
        if (i > 0) target.stream() << ',';
        target.stream() << fmt_double(rep.slack[i]);
    }
    target.stream() << "\n";
    return rep.member ? kExitOk : kExitNegative;
}

int run_frontier_point(const ExperimentConfig& cfg, const std::string& kind,
                       std::optional<double> b1, std::optional<double> p) {
    BoundVector b = [&] {
        if (kind == "uniform") return uniform_point(cfg.n, cfg.k);
        if (kind == "harmonic") {
            if (!b1) throw std::invalid_argument("harmonic point requires --b1");
            return harmonic_point(*b1, cfg.n, cfg.k);
        }
        if (kind == "power") {
            if (!p) throw std::invalid_argument("power point requires --p");
            return power_point(*p, cfg.n, cfg.k);
        }
        throw std::invalid_argument("unknown point kind '" + kind +
                                    "' (expected uniform|harmonic|power)");
    }();

    OutputTarget target(cfg.out);
    for (std::size_t i = 0; i < b.bounds.size(); ++i) {
        if (i > 0) target.stream() << ',';
        target.stream() << fmt_double(b.bounds[i]);
    }
    target.stream() << "\n";
    return kExitOk;
}

int run_frontier_certificate(const ExperimentConfig& cfg, const std::string& r_text) {
    const std::vector<double> r = parse_vector(r_text, cfg.n);
    const FrontierReport rep = lower_bound_certificate(r, cfg.n);

    OutputTarget target(cfg.out);
    target.stream() << "member: " << (rep.member ? "true" : "false") << "\n";
    target.stream() << "slack: ";
    for (std::size_t i = 0; i < rep.slack.size(); ++i) {
        if (i > 0) target.stream() << ',';
        target.stream() << fmt_double(rep.slack[i]);
    }
    target.stream() << "\n";
    if (!rep.member) {
        std::cerr << "note: a non-member certificate contradicts the lower bound only for "
                     "true worst-case vectors; for Monte Carlo underestimates it is a "
                     "diagnostic.\n";
    }
    return rep.member ? kExitOk : kExitNegative;
}

std::vector<BoundCheckReport> verify_concentration(std::int64_t reps, std::uint64_t seed,
                                                   int threads) {
    const std::int64_t tau_reps = std::max<std::int64_t>(100, reps / 10);
    std::vector<BoundCheckReport> reports;
    std::uint64_t salt = 0;
    for (double eps : {20.0, 30.0}) {
        reports.push_back(check_maximal(100, eps, reps, child_seed(seed, salt++), threads));
    }
    for (double delta : {0.25, 0.5, 1.0}) {
        reports.push_back(
            check_peeling(1000.0, 1000, delta, reps, child_seed(seed, salt++), threads));
    }
    for (double n_j : {16.0, 1000.0}) {
        for (double dbar : {0.5, 1.0, 2.0}) {
            reports.push_back(
                check_tau(n_j, dbar, tau_reps, child_seed(seed, salt++), threads));
        }
    }
    return reports;
}

std::vector<BoundCheckReport> verify_regret(std::int64_t reps, std::uint64_t seed,
                                            int threads) {
    std::vector<BoundCheckReport> reports;

    // Fig. 1 setting: n = 5000, B = (n^(1/3), n^(2/3)), mu = (0, -Delta)
    const std::int64_t n = 5000;
    const BoundVector b1v = fig1_bounds(n);
    GridSpec g1;  // [-0.5, 0.5] step 0.025
    auto r1 = check_regret_bound(PolicySpec::umoss(b1v), b1v, fig1_grid(g1), n, reps,
                                 child_seed(seed, 1), threads);
    for (auto& r : r1) {
        r.name = "fig1_" + r.name;
        reports.push_back(std::move(r));
    }

    // Fig. 2 setting: K = 10, harmonic B with B_1 = sqrt(n)
    const int k = 10;
    const BoundVector b2v = fig2_bounds(n, k);
    GridSpec g2{0.0, 0.5, 0.025};
    auto r2 = check_regret_bound(PolicySpec::umoss(b2v), b2v, fig2_grid(g2, k), n, reps,
                                 child_seed(seed, 2), threads);
    for (auto& r : r2) {
        r.name = "fig2_" + r.name;
        reports.push_back(std::move(r));
    }

    // Unbalanced UCB small-gap shape: worst regret over |Delta| <= 0.1 against
    // the envelope B_{i*} sqrt(log n). The interesting output is the ratio
    // (an empirically calibrated constant, ~0.45 at these settings); the
    // envelope constant 1 is deliberately loose.
    const PolicySpec uucb = PolicySpec::uucb(b1v, 0.05);
    const double root_log_n = std::sqrt(std::log(static_cast<double>(n)));
    for (int side = 0; side < 2; ++side) {
        BoundCheckReport rep;
        rep.name = side == 0 ? "uucb_shape_favoured" : "uucb_shape_unfavoured";
        rep.reps = reps;
        for (double d = 0.0; d <= 0.1 + 1e-9; d += 0.025) {
            const StochasticInstance inst({0.0, side == 0 ? -d : d}, Noise::GaussianUnit);
            const RegretEstimate est =
                monte_carlo(uucb, inst, n, reps, child_seed(seed, 3), threads);
            const int opt = gaps(inst).optimal_arm;
            if (est.mean[static_cast<std::size_t>(opt)] > rep.empirical) {
                rep.empirical = est.mean[static_cast<std::size_t>(opt)];
                rep.std_err = est.std_err[static_cast<std::size_t>(opt)];
            }
        }
        rep.theoretical =
            b1v.bounds[side == 0 ? 0 : 1] * root_log_n;
        rep.status = rep.empirical <= rep.theoretical + 3.0 * rep.std_err
                         ? BoundCheckReport::Status::Pass
                         : BoundCheckReport::Status::Fail;
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<BoundCheckReport> verify_exp3(std::int64_t reps, std::uint64_t seed,
                                          int threads) {
    const std::int64_t n = 5000;
    std::vector<BoundCheckReport> reports;
    std::uint64_t salt = 0;
    for (int k : {2, 10}) {
        std::vector<LabeledGains> gains;
        for (const std::string& kind : gain_matrix_kinds()) {
            gains.push_back({kind + "_k" + std::to_string(k), make_gain_matrix(kind, n, k)});
        }
        for (double b1 : {50.0, 200.0}) {
            auto batch =
                check_exp3_bound(b1, n, k, gains, reps, child_seed(seed, salt++), threads);
            for (auto& r : batch) {
                r.name += "_b" + fmt_double(b1);
                reports.push_back(std::move(r));
            }
        }
    }
    return reports;
}

int run_verify(const ExperimentConfig& cfg, const std::string& suite) {
    json resolved;
    resolved["experiment"] = "verify";
    resolved["suite"] = suite;
    resolved["seed"] = cfg.seed;

    std::vector<BoundCheckReport> reports;
    if (suite == "concentration" || suite == "all") {
        const std::int64_t reps = cfg.reps > 0 ? cfg.reps : 100000;
        resolved["reps_concentration"] = reps;
        auto batch = verify_concentration(reps, child_seed(cfg.seed, 0xC0), cfg.threads);
        reports.insert(reports.end(), batch.begin(), batch.end());
    }
    if (suite == "regret" || suite == "all") {
        const std::int64_t reps = cfg.reps > 0 ? cfg.reps : 300;
        resolved["reps_regret"] = reps;
        auto batch = verify_regret(reps, child_seed(cfg.seed, 0xB2), cfg.threads);
        reports.insert(reports.end(), batch.begin(), batch.end());
    }
    if (suite == "exp3" || suite == "all") {
        const std::int64_t reps = cfg.reps > 0 ? cfg.reps : 1000;
        resolved["reps_exp3"] = reps;
        auto batch = verify_exp3(reps, child_seed(cfg.seed, 0xE3), cfg.threads);
        reports.insert(reports.end(), batch.begin(), batch.end());
    }
    if (reports.empty()) {
        throw std::invalid_argument("unknown verify suite '" + suite +
                                    "' (expected concentration|regret|exp3|all)");
    }
    emit_reports(cfg, suite, resolved, reports);
    return verify_exit_code(reports);
}

} // namespace unbal
