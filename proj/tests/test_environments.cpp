#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "unbal/environments.hpp"

using namespace unbal;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/unbal_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("instance validation") {
    CHECK_NOTHROW(StochasticInstance({0.0, -1.0}, Noise::GaussianUnit));
    CHECK_THROWS_AS(StochasticInstance({0.0, -1.5}, Noise::GaussianUnit),
                    std::invalid_argument);  // spread > 1
    CHECK_THROWS_AS(StochasticInstance({0.5, -0.1}, Noise::Bernoulli),
                    std::invalid_argument);  // Bernoulli mean outside [0,1]
    CHECK_THROWS_AS(StochasticInstance({}, Noise::GaussianUnit), std::invalid_argument);
}

TEST_CASE("degenerate Bernoulli pulls") {
    const StochasticInstance inst({1.0, 0.0}, Noise::Bernoulli);
    RandomStream rng(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(pull(inst, 0, rng) == 1.0);
        CHECK(pull(inst, 1, rng) == 0.0);
    }
    CHECK_THROWS_AS(pull(inst, 2, rng), std::out_of_range);
    CHECK_THROWS_AS(pull(inst, -1, rng), std::out_of_range);
}

TEST_CASE("Gaussian pull sample mean over 10^6 draws") {
    const StochasticInstance inst({0.5}, Noise::GaussianUnit);
    RandomStream rng(7);
    double sum = 0.0;
    const int reps = 1000000;
    for (int i = 0; i < reps; ++i) sum += pull(inst, 0, rng);
    const double mean = sum / reps;
    CHECK(std::abs(mean - 0.5) <= 0.004);  // 3 sigma of the CLT band wants 0.003
}

TEST_CASE("Gaussian pull sample variance is unit") {
    const StochasticInstance inst({0.0}, Noise::GaussianUnit);
    RandomStream rng(11);
    double sum = 0.0, sq = 0.0;
    const int reps = 400000;
    for (int i = 0; i < reps; ++i) {
        const double x = pull(inst, 0, rng);
        sum += x;
        sq += x * x;
    }
    const double var = sq / reps - (sum / reps) * (sum / reps);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("gaps anchors") {
    const GapTable two = gaps(StochasticInstance({0.0, -0.3}, Noise::GaussianUnit));
    CHECK(two.optimal_arm == 0);
    CHECK(two.delta[0] == 0.0);
    CHECK(two.delta[1] == doctest::Approx(0.3));

    const GapTable tie = gaps(StochasticInstance({0.5, 0.5}, Noise::GaussianUnit));
    CHECK(tie.optimal_arm == 0);  // tie broken to the lowest index
    CHECK(tie.delta[0] == 0.0);
    CHECK(tie.delta[1] == 0.0);

    const GapTable three = gaps(StochasticInstance({0.3, 0.5, 0.4}, Noise::GaussianUnit));
    CHECK(three.optimal_arm == 1);
    CHECK(three.pair(0, 2) == doctest::Approx(0.1));   // Delta_13 = mu_3 - mu_1
    CHECK(three.pair(2, 0) == doctest::Approx(-0.1));  // antisymmetric
}

TEST_CASE("gaps antisymmetry and zero diagonal") {
    const GapTable t = gaps(StochasticInstance({0.1, 0.9, 0.4, 0.4}, Noise::GaussianUnit));
    for (int j = 0; j < 4; ++j) {
        CHECK(t.pair(j, j) == 0.0);
        for (int i = 0; i < 4; ++i) CHECK(t.pair(j, i) == -t.pair(i, j));
    }
    CHECK(t.delta[t.optimal_arm] == 0.0);
}

TEST_CASE("gaps commutes with arm relabeling") {
    const std::vector<double> means = {0.2, 0.7, 0.7, 0.1};
    const GapTable base = gaps(StochasticInstance(means, Noise::GaussianUnit));
    // rotate arms by one position
    const std::vector<double> rot = {0.1, 0.2, 0.7, 0.7};
    const GapTable rotated = gaps(StochasticInstance(rot, Noise::GaussianUnit));
    for (int j = 0; j < 4; ++j) {
        CHECK(rotated.delta[static_cast<std::size_t>((j + 1) % 4)] ==
              doctest::Approx(base.delta[static_cast<std::size_t>(j)]));
    }
    // tie at the top: rotation moves the lowest-index winner accordingly
    CHECK(base.optimal_arm == 1);
    CHECK(rotated.optimal_arm == 2);
}

TEST_CASE("lower_bound_family anchors") {
    const auto fam2 = lower_bound_family({0.1, 0.2});
    REQUIRE(fam2.size() == 2);
    CHECK(fam2[0].means[0] == doctest::Approx(0.5));
    CHECK(fam2[0].means[1] == doctest::Approx(0.3));
    CHECK(fam2[1].means[0] == doctest::Approx(0.5));
    CHECK(fam2[1].means[1] == doctest::Approx(0.7));

    const auto fam3 = lower_bound_family({0.1, 0.1, 0.1});
    CHECK(fam3[0].means[0] == doctest::Approx(0.5));
    CHECK(fam3[0].means[1] == doctest::Approx(0.4));
    CHECK(fam3[0].means[2] == doctest::Approx(0.4));
}

TEST_CASE("lower_bound_family invariants") {
    const std::vector<double> eps = {0.05, 0.3, 0.5, 0.05, 0.121};
    const auto fam = lower_bound_family(eps);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        const GapTable t = gaps(fam[k]);
        CHECK(t.optimal_arm == static_cast<int>(k));  // instance k has optimal arm k
        double spread_lo = fam[k].means[0], spread_hi = fam[k].means[0];
        for (int j = 0; j < fam[k].arms(); ++j) {
            spread_lo = std::min(spread_lo, fam[k].means[static_cast<std::size_t>(j)]);
            spread_hi = std::max(spread_hi, fam[k].means[static_cast<std::size_t>(j)]);
            if (j != static_cast<int>(k)) {
                CHECK(t.delta[static_cast<std::size_t>(j)] >= eps[k] - 1e-15);
            }
        }
        CHECK(spread_hi - spread_lo <= 1.0);
    }
}

TEST_CASE("lower_bound_family precondition errors") {
    CHECK_THROWS_AS(lower_bound_family({0.0, 0.1}), std::invalid_argument);   // eps = 0
    CHECK_THROWS_AS(lower_bound_family({0.1, 0.6}), std::invalid_argument);   // eps > 1/2
    CHECK_THROWS_AS(lower_bound_family({0.2, 0.1}), std::invalid_argument);   // eps_1 not minimal
    CHECK_THROWS_AS(lower_bound_family({0.2}), std::invalid_argument);        // K < 2
}

TEST_CASE("eps_schedule anchors") {
    const auto capped = eps_schedule({5000.0, 5000.0}, 5000);
    CHECK(capped[0] == 0.5);
    CHECK(capped[1] == 0.5);

    const auto mid = eps_schedule({10.0, 100.0}, 5000);
    CHECK(mid[0] == doctest::Approx(0.008));
    CHECK(mid[1] == doctest::Approx(0.08));

    const auto floored = eps_schedule({0.0, 50.0}, 5000);
    CHECK(floored[0] == 0.001);  // default floor

    const auto custom = eps_schedule({0.0, 50.0}, 5000, 4.0, 0.01);
    CHECK(custom[0] == 0.01);

    CHECK_THROWS_AS(eps_schedule({1.0, 2.0}, 5000, 2.0), std::invalid_argument);  // c <= 2
    CHECK_THROWS_AS(eps_schedule({-1.0, 2.0}, 5000), std::invalid_argument);
}

TEST_CASE("eps_schedule feeds lower_bound_family") {
    // sorted regret vector (minimal first) stays a valid family input
    const auto eps = eps_schedule({0.0, 10.0, 500.0, 5000.0}, 5000);
    CHECK_NOTHROW(lower_bound_family(eps));
}

TEST_CASE("gain matrix validation and totals") {
    CHECK_NOTHROW(GainMatrix(2, 2, {1.0, 0.0, 0.0, 1.0}));
    CHECK_THROWS_AS(GainMatrix(2, 2, {1.0, 0.0, 1.5, 1.0}), CsvError);
    try {
        GainMatrix(2, 2, {1.0, 0.0, 1.5, 1.0});
    } catch (const CsvError& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 1);
    }
    const GainMatrix m(3, 2, {1.0, 0.0, 0.5, 0.25, 0.0, 1.0});
    const auto totals = m.arm_totals();
    CHECK(totals[0] == doctest::Approx(1.5));
    CHECK(totals[1] == doctest::Approx(1.25));
}

TEST_CASE("gains CSV load anchors") {
    TempFile f("gains_basic.csv");
    {
        std::ofstream out(f.path, std::ios::binary);
        out << "1,0\n0,1\n";
    }
    const GainMatrix m = load_gains(f.path);
    CHECK(m.steps == 2);
    CHECK(m.arms == 2);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 1) == 0.0);
    CHECK(m.at(1, 0) == 0.0);
    CHECK(m.at(1, 1) == 1.0);
}

TEST_CASE("gains CSV parse and range errors carry locations") {
    TempFile bad("gains_bad.csv");
    {
        std::ofstream out(bad.path, std::ios::binary);
        out << "1,0\n0,abc\n";
    }
    try {
        load_gains(bad.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 2);
    }

    TempFile range("gains_range.csv");
    {
        std::ofstream out(range.path, std::ios::binary);
        out << "1,0\n1.5,1\n";
    }
    try {
        load_gains(range.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.row == 2);
        CHECK(e.col == 1);
    }

    TempFile ragged("gains_ragged.csv");
    {
        std::ofstream out(ragged.path, std::ios::binary);
        out << "1,0\n0\n";
    }
    CHECK_THROWS_AS(load_gains(ragged.path), CsvError);
}

TEST_CASE("gains CSV round-trip is byte identical on canonical files") {
    TempFile canon("gains_canon.csv");
    {
        std::ofstream out(canon.path, std::ios::binary);
        out << "1,0\n0.5,0.25\n0,1\n";
    }
    TempFile copy("gains_copy.csv");
    save_gains(load_gains(canon.path), copy.path);
    CHECK(slurp(copy.path) == slurp(canon.path));

    // and save -> load -> save is a fixed point for arbitrary values
    TempFile a("gains_a.csv"), b("gains_b.csv");
    RandomStream rng(3);
    std::vector<double> vals(20 * 3);
    for (double& v : vals) v = rng.uniform01();
    save_gains(GainMatrix(20, 3, vals), a.path);
    save_gains(load_gains(a.path), b.path);
    CHECK(slurp(a.path) == slurp(b.path));
}
