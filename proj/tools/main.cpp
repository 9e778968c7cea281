// unbal: unbalanced multi-armed bandit experiments, frontier tools, and
// statistical verification of the regret bounds.
//
//   unbal fig1 [--n 5000 --reps 2000 --seed 1 --out fig1.csv ...]
//   unbal fig2 [--n 5000 --k 10 --reps 2000 ...]
//   unbal frontier check --n 5000 --b n,n
//   unbal frontier point --kind uniform|harmonic|power [--b1 X | --p P]
//   unbal frontier certificate --n 5000 --r 0,0
//   unbal verify concentration|regret|exp3|all [--reps N --seed S --out F]
//   unbal simulate --policy umoss --means 0,-0.3 [--noise gaussian ...]
//
// Precedence: experiment defaults < --config file < explicit flags.

#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "unbal/experiments.hpp"

namespace {

using unbal::ExperimentConfig;

struct CliState {
    ExperimentConfig flags;   // raw flag storage
    std::string config_path;
    std::string r_text;       // frontier certificate
    std::string point_kind;   // frontier point
    double b1_val = 0.0;
    double p_val = 0.0;
    std::string means_text;   // simulate
    std::string noise = "gaussian";
};

void add_common_flags(CLI::App* app, CliState& st) {
    app->add_option("--config", st.config_path, "JSON config file (flags override it)");
    app->add_option("--n", st.flags.n, "horizon");
    app->add_option("--k", st.flags.k, "number of arms");
    app->add_option("--reps", st.flags.reps, "Monte Carlo replications");
    app->add_option("--seed", st.flags.seed, "master seed");
    app->add_option("--out", st.flags.out, "output CSV path (default stdout)");
    app->add_option("--threads", st.flags.threads,
                    "worker threads (0 = hardware concurrency; results identical)");
    app->add_option("--policy", st.flags.policy, "umoss|moss|uucb|ucb|exp3g");
    app->add_option("--b", st.flags.b_spec,
                    "bounds: uniform | harmonic:<B1> | power:<p> | v1,v2,... ('n' = horizon)");
    app->add_option("--ucb-eps", st.flags.ucb_eps, "UCB exploration constant epsilon");
    app->add_option("--exp3-b1", st.flags.exp3_b1, "Exp3-gamma favoured-arm bound B_1");
    app->add_option("--delta-min", st.flags.grid.delta_min, "grid lower end");
    app->add_option("--delta-max", st.flags.grid.delta_max, "grid upper end");
    app->add_option("--delta-step", st.flags.grid.delta_step, "grid step");
    app->add_flag("--trace", st.flags.trace, "dump an episode trace next to --out");
}

// explicit flags win over config-file values
void overlay_flags(CLI::App* app, const CliState& st, ExperimentConfig& cfg) {
    if (app->count("--n")) cfg.n = st.flags.n;
    if (app->count("--k")) cfg.k = st.flags.k;
    if (app->count("--reps")) cfg.reps = st.flags.reps;
    if (app->count("--seed")) cfg.seed = st.flags.seed;
    if (app->count("--out")) cfg.out = st.flags.out;
    if (app->count("--threads")) cfg.threads = st.flags.threads;
    if (app->count("--policy")) cfg.policy = st.flags.policy;
    if (app->count("--b")) cfg.b_spec = st.flags.b_spec;
    if (app->count("--ucb-eps")) cfg.ucb_eps = st.flags.ucb_eps;
    if (app->count("--exp3-b1")) cfg.exp3_b1 = st.flags.exp3_b1;
    if (app->count("--delta-min")) cfg.grid.delta_min = st.flags.grid.delta_min;
    if (app->count("--delta-max")) cfg.grid.delta_max = st.flags.grid.delta_max;
    if (app->count("--delta-step")) cfg.grid.delta_step = st.flags.grid.delta_step;
    if (app->count("--trace")) cfg.trace = st.flags.trace;
}

ExperimentConfig resolve(CLI::App* sub, const CliState& st, ExperimentConfig defaults) {
    ExperimentConfig cfg = std::move(defaults);
    if (!st.config_path.empty()) cfg = unbal::load_config_file(st.config_path, cfg);
    overlay_flags(sub, st, cfg);
    if (cfg.threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        cfg.threads = hw > 0 ? static_cast<int>(hw) : 1;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"unbalanced bandit experiments and bound verification"};
    app.require_subcommand(1);

    CliState st;

    CLI::App* fig1 = app.add_subcommand("fig1", "two-arm regret curves, MOSS vs U-MOSS");
    add_common_flags(fig1, st);

    CLI::App* fig2 = app.add_subcommand("fig2", "K-arm regret curves over (i*, Delta)");
    add_common_flags(fig2, st);

    CLI::App* frontier = app.add_subcommand("frontier", "regret-frontier geometry tools");
    frontier->require_subcommand(1);
    CLI::App* fcheck = frontier->add_subcommand("check", "test a bound vector for membership");
    add_common_flags(fcheck, st);
    CLI::App* fpoint = frontier->add_subcommand("point", "emit a canonical frontier point");
    add_common_flags(fpoint, st);
    fpoint->add_option("--kind", st.point_kind, "uniform|harmonic|power")->required();
    auto* b1_opt = fpoint->add_option("--b1", st.b1_val, "favoured-arm bound (harmonic)");
    auto* p_opt = fpoint->add_option("--p", st.p_val, "exponent (power)");
    CLI::App* fcert = frontier->add_subcommand(
        "certificate", "membership of min(n, 8(R+K)) for a regret vector");
    add_common_flags(fcert, st);
    fcert->add_option("--r", st.r_text, "regret vector, e.g. 0,0,0")->required();

    CLI::App* verify = app.add_subcommand("verify", "statistical bound checks");
    verify->require_subcommand(1);
    CLI::App* vconc = verify->add_subcommand("concentration", "maximal + peeling + tau");
    CLI::App* vregret = verify->add_subcommand("regret", "252B and per-instance bounds");
    CLI::App* vexp3 = verify->add_subcommand("exp3", "adversarial Exp3-gamma bounds");
    CLI::App* vall = verify->add_subcommand("all", "every suite");
    for (CLI::App* v : {vconc, vregret, vexp3, vall}) add_common_flags(v, st);

    CLI::App* simulate = app.add_subcommand("simulate", "free-form single-instance run");
    add_common_flags(simulate, st);
    simulate->add_option("--means", st.means_text, "arm means, e.g. 0,-0.3")->required();
    simulate->add_option("--noise", st.noise, "gaussian|bernoulli");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : unbal::kExitUsage;
    }

    try {
        if (fig1->parsed()) {
            ExperimentConfig defaults;
            defaults.experiment = "fig1";
            defaults.k = 2;
            return unbal::run_fig1(resolve(fig1, st, defaults));
        }
        if (fig2->parsed()) {
            ExperimentConfig defaults;
            defaults.experiment = "fig2";
            defaults.k = 10;
            defaults.grid = unbal::GridSpec{0.0, 0.5, 0.025};
            return unbal::run_fig2(resolve(fig2, st, defaults));
        }
        if (fcheck->parsed()) {
            ExperimentConfig cfg = resolve(fcheck, st, ExperimentConfig{});
            if (cfg.b_spec.empty()) {
                throw std::invalid_argument("frontier check requires --b <vector>");
            }
            return unbal::run_frontier_check(cfg, cfg.b_spec);
        }
        if (fpoint->parsed()) {
            ExperimentConfig cfg = resolve(fpoint, st, ExperimentConfig{});
            std::optional<double> b1, p;
            if (b1_opt->count()) b1 = st.b1_val;
            if (p_opt->count()) p = st.p_val;
            return unbal::run_frontier_point(cfg, st.point_kind, b1, p);
        }
        if (fcert->parsed()) {
            ExperimentConfig cfg = resolve(fcert, st, ExperimentConfig{});
            return unbal::run_frontier_certificate(cfg, st.r_text);
        }
        if (verify->parsed()) {
            CLI::App* sub = vconc->parsed()     ? vconc
                            : vregret->parsed() ? vregret
                            : vexp3->parsed()   ? vexp3
                                                : vall;
            const std::string suite = vconc->parsed()     ? "concentration"
                                      : vregret->parsed() ? "regret"
                                      : vexp3->parsed()   ? "exp3"
                                                          : "all";
            ExperimentConfig defaults;
            defaults.experiment = "verify";
            defaults.reps = 0;  // 0 = per-suite calibrated default
            return unbal::run_verify(resolve(sub, st, defaults), suite);
        }
        if (simulate->parsed()) {
            ExperimentConfig defaults;
            defaults.experiment = "simulate";
            ExperimentConfig cfg = resolve(simulate, st, defaults);
            cfg.noise = st.noise;
            cfg.means = unbal::parse_vector(st.means_text, cfg.n);
            if (!simulate->count("--k")) cfg.k = static_cast<int>(cfg.means.size());
            return unbal::run_simulate(cfg);
        }
    } catch (const unbal::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unbal::kExitNegative;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unbal::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unbal::kExitUsage;
    }
    return unbal::kExitUsage;
}
