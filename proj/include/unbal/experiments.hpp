#pragma once
/*
Experiment registry and configuration. Every run resolves to a fully
explicit plan that is echoed into the output's '#' preamble, so a file
alone is enough to reproduce itself. Config values come from (lowest to
highest precedence): experiment defaults, a JSON config file, CLI flags.

Exit codes across the CLI: 0 success / member / all checks pass,
1 usage or config error, 2 semantic negative (non-member, failed check,
infeasible point).
*/

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unbal/frontier.hpp"
#include "unbal/policies.hpp"
#include "unbal/verification.hpp"

namespace unbal {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNegative = 2;

struct GridSpec {
    double delta_min = -0.5;
    double delta_max = 0.5;
    double delta_step = 0.025;

    std::vector<double> values() const;
};

struct ExperimentConfig {
    std::string experiment;
    std::int64_t n = 5000;
    int k = 2;
    std::int64_t reps = 2000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string policy = "umoss";
    std::string b_spec;             // "uniform" | "harmonic:<B1>" | "power:<p>" | "v1,v2,..."
    GridSpec grid;
    std::string out;                // empty = stdout
    bool trace = false;
    std::vector<double> means;      // simulate
    std::string noise = "gaussian"; // simulate
    double ucb_eps = 0.05;
    double exp3_b1 = 200.0;

    // canonical single-line JSON of the resolved plan
    std::string canonical_json() const;
};

// Throws std::invalid_argument on malformed config (mapped to exit 1).
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base);

// Resolve a bound-vector specification against (n, K). An empty spec
// defaults to "uniform".
BoundVector resolve_bounds(const std::string& b_spec, std::int64_t n, int k);

// Parse "a,b,c" where each component is a real or the literal "n".
std::vector<double> parse_vector(const std::string& text, std::int64_t n);

PolicySpec resolve_policy(const ExperimentConfig& cfg);

// Experiment entry points. Each writes CSV to cfg.out (stdout when empty)
// and returns a process exit code.
int run_fig1(const ExperimentConfig& cfg);
int run_fig2(const ExperimentConfig& cfg);
int run_simulate(const ExperimentConfig& cfg);

int run_frontier_check(const ExperimentConfig& cfg, const std::string& b_text);
int run_frontier_point(const ExperimentConfig& cfg, const std::string& kind,
                       std::optional<double> b1, std::optional<double> p);
int run_frontier_certificate(const ExperimentConfig& cfg, const std::string& r_text);

int run_verify(const ExperimentConfig& cfg, const std::string& suite);

// Building blocks shared with the acceptance suite.
std::vector<StochasticInstance> fig1_grid(const GridSpec& grid);
std::vector<StochasticInstance> fig2_grid(const GridSpec& grid, int k);
BoundVector fig1_bounds(std::int64_t n);
BoundVector fig2_bounds(std::int64_t n, int k);

std::vector<BoundCheckReport> verify_concentration(std::int64_t reps, std::uint64_t seed,
                                                   int threads);
std::vector<BoundCheckReport> verify_regret(std::int64_t reps, std::uint64_t seed,
                                            int threads);
std::vector<BoundCheckReport> verify_exp3(std::int64_t reps, std::uint64_t seed,
                                          int threads);

} // namespace unbal
