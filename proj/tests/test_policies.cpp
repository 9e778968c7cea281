#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "unbal/policies.hpp"
#include "unbal/rng.hpp"

using namespace unbal;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("umoss_index anchors") {
    CHECK(umoss_index(0.33, 0, 100.0) == kInf);
    // 0.5 + sqrt(log 25) - 0.1
    CHECK(umoss_index(0.5, 4, 100.0) ==
          doctest::Approx(0.5 + std::sqrt(std::log(25.0)) - 0.1).epsilon(1e-15));
    CHECK(umoss_index(0.5, 4, 100.0) == doctest::Approx(2.1941225779941015).epsilon(1e-13));
    // log+ clamps once s >= n_i
    CHECK(umoss_index(0.5, 200, 100.0) == doctest::Approx(0.4));
}

TEST_CASE("umoss_index monotonicity") {
    for (double m : {-0.5, 0.0, 0.7}) {
        CHECK(umoss_index(m + 0.1, 5, 50.0) > umoss_index(m, 5, 50.0));
    }
    for (double n_i : {2.0, 50.0, 5000.0}) {
        double prev = umoss_index(0.0, 1, n_i);
        for (std::int64_t s = 2; s <= 300; ++s) {
            const double cur = umoss_index(0.0, s, n_i);
            CHECK(cur <= prev + 1e-15);
            prev = cur;
        }
    }
}

TEST_CASE("uucb_index anchor") {
    CHECK(uucb_index(0.1, 0, 5, 100, 25.0, 0.05) == kInf);
    // formula check at integer arguments against inline recomputation
    const double v = uucb_index(0.5, 4, 7, 55, 90.0, 0.05);
    CHECK(v == doctest::Approx(0.5 + std::sqrt(2.05 * std::log(7.0) / 4.0) -
                               std::sqrt(std::log(55.0) / 90.0))
                   .epsilon(1e-15));
    // hand anchor for the same formula at log t = 2, log n = 4, n_i = e^4:
    // 0.5 + sqrt(2.05 * 2 / 4) - 2/e^2
    const double exact = 0.5 + std::sqrt(2.05 * 2.0 / 4.0) - 2.0 / std::exp(2.0);
    CHECK(exact == doctest::Approx(1.2417522700926038).epsilon(1e-14));
}

TEST_CASE("uniform n_i makes uucb argmax match classical ucb") {
    RandomStream rng(17);
    const std::int64_t n = 5000;
    for (int trial = 0; trial < 2000; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 6);
        const BoundVector b = uniform_point(n, k);
        UnbalancedParams params(b, 0.05);
        PolicyState st(k);
        st.t = 1;
        for (int i = 0; i < k; ++i) {
            st.counts[static_cast<std::size_t>(i)] = 1 + static_cast<std::int64_t>(rng.next_u64() % 50);
            st.sums[static_cast<std::size_t>(i)] =
                (rng.uniform01() * 2.0 - 1.0) * static_cast<double>(st.counts[static_cast<std::size_t>(i)]);
            st.t += st.counts[static_cast<std::size_t>(i)];
        }
        CHECK(uucb_select(st, params) == ucb_select(st, 0.05));
    }
}

TEST_CASE("select sentinels and tie-breaking") {
    const BoundVector b(100, {10.0, 10.0});
    UnbalancedParams params(b, 0.05);

    PolicyState fresh(2);
    CHECK(umoss_select(fresh, params) == 0);  // all-sentinel tie -> arm 1
    CHECK(moss_select(fresh, 100) == 0);
    CHECK(uucb_select(fresh, params) == 0);
    CHECK(ucb_select(fresh, 0.05) == 0);

    PolicyState one(2);
    one.counts = {1, 0};
    one.sums = {5.0, 0.0};
    one.t = 2;
    CHECK(umoss_select(one, params) == 1);  // sentinel beats any finite index

    // equal finite indices break to the lowest arm
    PolicyState equal(2);
    equal.counts = {4, 4};
    equal.sums = {2.0, 2.0};
    equal.t = 9;
    UnbalancedParams eq_params(BoundVector(100, {10.0, 10.0}), 0.05);
    CHECK(umoss_select(equal, eq_params) == 0);
}

TEST_CASE("every index policy opens with a round robin") {
    const std::int64_t n = 100;
    const int k = 5;
    for (const char* name : {"umoss", "moss", "uucb", "ucb"}) {
        PolicySpec spec = [&]() -> PolicySpec {
            const std::string s = name;
            if (s == "umoss") return PolicySpec::umoss(uniform_point(n, k));
            if (s == "moss") return PolicySpec::moss();
            if (s == "uucb") return PolicySpec::uucb(uniform_point(n, k));
            return PolicySpec::ucb();
        }();
        auto policy = make_policy(spec, n, k);
        RandomStream rng(1);
        for (int t = 0; t < k; ++t) {
            const int arm = policy->select(rng);
            CHECK(arm == t);  // arm order
            policy->update(arm, 0.0);
        }
        for (std::int64_t c : policy->state().counts) CHECK(c == 1);
    }
}

TEST_CASE("uniform-B U-MOSS argmax equals classical MOSS argmax") {
    // acceptance-scale property: 10^4 random histories, 100% agreement
    RandomStream rng(20240915);
    const std::int64_t n = 5000;
    int trials = 0;
    for (; trials < 10000; ++trials) {
        const int k = 2 + static_cast<int>(rng.next_u64() % 9);
        const double b_uni = std::sqrt(static_cast<double>(n) * k);  // n_i = n / K
        UnbalancedParams params(BoundVector(n, std::vector<double>(static_cast<std::size_t>(k), b_uni)),
                                0.05);
        PolicyState st(k);
        st.t = 1;
        for (int i = 0; i < k; ++i) {
            st.counts[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(rng.next_u64() % 40);
            st.sums[static_cast<std::size_t>(i)] =
                (rng.uniform01() * 2.0 - 1.0) * static_cast<double>(st.counts[static_cast<std::size_t>(i)]);
            st.t += st.counts[static_cast<std::size_t>(i)];
        }
        REQUIRE(umoss_select(st, params) == moss_select(st, n));
    }
    CHECK(trials == 10000);
}

TEST_CASE("exp3_params anchors") {
    const Exp3Params p = exp3_params(200.0, 5000, 10);
    CHECK(p.eta == doctest::Approx(0.002).epsilon(1e-15));
    CHECK(p.prior[0] == doctest::Approx(0.8187307530779818).epsilon(1e-14));
    for (int i = 1; i < 10; ++i) {
        CHECK(p.prior[static_cast<std::size_t>(i)] ==
              doctest::Approx((1.0 - 0.8187307530779818) / 9.0).epsilon(1e-12));
    }
    double sum = 0.0;
    for (double v : p.prior) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    // B_1 = sqrt(4 K n log 2) puts exactly half the prior on arm 1
    const int k = 4;
    const std::int64_t n = 1000;
    const double b1 = std::sqrt(4.0 * k * static_cast<double>(n) * std::log(2.0));
    const Exp3Params half = exp3_params(b1, n, k);
    CHECK(half.prior[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half.prior[1] == doctest::Approx(0.5 / 3.0).epsilon(1e-14));

    // B_1 -> 0+ pushes the favoured-arm prior toward 1 from below
    const Exp3Params tiny = exp3_params(1.0, 5000, 10);
    CHECK(tiny.prior[0] > 0.999994);
    CHECK(tiny.prior[0] < 1.0);

    CHECK_THROWS_AS(exp3_params(0.0, 5000, 10), std::invalid_argument);
    CHECK_THROWS_AS(exp3_params(100.0, 5000, 1), std::invalid_argument);
}

TEST_CASE("exp3_probs anchors") {
    const auto uniform = exp3_probs({1.7, 1.7, 1.7});
    for (double v : uniform) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto weighted = exp3_probs({std::log(3.0), std::log(1.0)});
    CHECK(weighted[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(weighted[1] == doctest::Approx(0.25).epsilon(1e-14));

    // shift invariance
    const auto base = exp3_probs({0.1, -2.0, 1.4});
    const auto shifted = exp3_probs({0.1 + 55.0, -2.0 + 55.0, 1.4 + 55.0});
    for (int i = 0; i < 3; ++i) {
        CHECK(shifted[static_cast<std::size_t>(i)] ==
              doctest::Approx(base[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }

    // strictly inside (0,1) across the representable working range
    for (double spread : {1.0, 10.0, 30.0}) {
        const auto p = exp3_probs({0.0, -spread});
        CHECK(p[0] < 1.0);
        CHECK(p[1] > 0.0);
    }
    // beyond ~36 nats the dominant entry saturates to 1.0 at double
    // precision, but the tiny entries must stay strictly positive
    const auto extreme = exp3_probs({0.0, -5000.0});
    CHECK(extreme[1] > 0.0);
    double sum = 0.0;
    for (double v : extreme) sum += v;
    CHECK(std::abs(sum - 1.0) <= 1e-12);

    CHECK_THROWS_AS(exp3_probs({1.0, kInf}), std::invalid_argument);
    CHECK_THROWS_AS(exp3_probs({-kInf, -kInf}), std::logic_error);
}

TEST_CASE("exp3_update anchors") {
    std::vector<double> lw = {0.0, -1.0};
    exp3_update(lw, 0, 1.0, 0.6, 0.002);  // gain 1 -> zero loss estimate
    CHECK(lw[0] == 0.0);
    CHECK(lw[1] == -1.0);

    exp3_update(lw, 0, 0.0, 0.5, 0.002);  // gain 0, prob 1/2 -> drop by 0.004
    CHECK(lw[0] == doctest::Approx(-0.004).epsilon(1e-15));
    CHECK(lw[1] == -1.0);  // unchosen arm untouched

    CHECK_THROWS_AS(exp3_update(lw, 0, 0.5, 0.0, 0.002), std::invalid_argument);
    CHECK_THROWS_AS(exp3_update(lw, 5, 0.5, 0.5, 0.002), std::out_of_range);
}

TEST_CASE("importance-weighted loss estimate is unbiased") {
    // E_{I ~ p}[ell_tilde_i] = 1 - g_i for every arm, by exhaustive sum
    const std::vector<double> lw = {0.3, -0.2, 0.9};
    const std::vector<double> g = {0.25, 1.0, 0.0};
    const auto p = exp3_probs(lw);
    for (int i = 0; i < 3; ++i) {
        double expectation = 0.0;
        for (int chosen = 0; chosen < 3; ++chosen) {
            // estimate for arm i when `chosen` is pulled
            const double est = chosen == i
                                   ? (1.0 - g[static_cast<std::size_t>(chosen)]) /
                                         p[static_cast<std::size_t>(chosen)]
                                   : 0.0;
            expectation += p[static_cast<std::size_t>(chosen)] * est;
        }
        CHECK(expectation == doctest::Approx(1.0 - g[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("shifted_gap anchors and antisymmetry") {
    const StochasticInstance inst({0.5, 0.4}, Noise::GaussianUnit);
    UnbalancedParams params(BoundVector(10000, {100.0, 1000.0}), 0.05);
    // n_1 = 10^8/10^4 = 10^4, n_2 = 10^8/10^6 = 10^2
    CHECK(params.n_i[0] == doctest::Approx(10000.0));
    CHECK(params.n_i[1] == doctest::Approx(100.0));

    CHECK(shifted_gap(inst, params, 0, 0) == 0.0);
    // bar Delta_{21} = mu_1 - mu_2 + sqrt(1/n_2) - sqrt(1/n_1) = 0.1 + 0.1 - 0.01
    CHECK(shifted_gap(inst, params, 0, 1) == doctest::Approx(0.19).epsilon(1e-12));
    // bar Delta_{12} = mu_2 - mu_1 + sqrt(1/n_1) - sqrt(1/n_2) = -0.1 + 0.01 - 0.1
    CHECK(shifted_gap(inst, params, 1, 0) == doctest::Approx(-0.19).epsilon(1e-12));
    CHECK(shifted_gap(inst, params, 0, 1) == -shifted_gap(inst, params, 1, 0));

    // uniform n_i: the shift cancels and the plain gap remains
    UnbalancedParams uni(uniform_point(10000, 2), 0.05);
    CHECK(shifted_gap(inst, uni, 0, 1) == doctest::Approx(0.1));
}

TEST_CASE("policy trajectories match the free-function selectors") {
    // the cached-index fast path must agree with full recomputation
    const std::int64_t n = 300;
    const int k = 3;
    const BoundVector b = harmonic_point(10.0, n, k);
    const StochasticInstance inst({0.4, 0.2, 0.0}, Noise::GaussianUnit);
    UnbalancedParams params(b, 0.05);

    auto policy = make_policy(PolicySpec::umoss(b), n, k);
    PolicyState shadow(k);
    RandomStream rng(5);
    RandomStream noise(55);
    for (std::int64_t t = 1; t <= n; ++t) {
        const int arm = policy->select(rng);
        CHECK(arm == umoss_select(shadow, params));
        const double reward = pull(inst, arm, noise);
        policy->update(arm, reward);
        shadow.counts[static_cast<std::size_t>(arm)] += 1;
        shadow.sums[static_cast<std::size_t>(arm)] += reward;
        shadow.t += 1;
    }
}

TEST_CASE("make_policy validation") {
    CHECK_THROWS_AS(make_policy(PolicySpec::umoss(uniform_point(100, 2)), 200, 2),
                    std::invalid_argument);  // horizon mismatch
    CHECK_THROWS_AS(make_policy(PolicySpec::umoss(uniform_point(100, 2)), 100, 3),
                    std::invalid_argument);  // arm-count mismatch
    CHECK_NOTHROW(make_policy(PolicySpec::moss(), 100, 1));
}
