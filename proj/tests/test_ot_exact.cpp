#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otda/cost.hpp"
#include "otda/ot_exact.hpp"
#include "otda/rng.hpp"
#include "support/oracle_lp.hpp"
#include "support/test_util.hpp"

using namespace otda;

TEST_CASE("forced couplings on tiny instances") {
    const CostSpec euclid;

    const DiscreteMeasure two = make_empirical({{0.0, 0.0}, {1.0, 1.0}});
    const OtSolution self = solve_exact(two, two, cost_matrix(two, two, euclid));
    CHECK(self.cost_value == doctest::Approx(0.0).epsilon(1e-15));

    CHECK(w1(make_empirical({{0.0}}), make_empirical({{1.0}}), euclid) ==
          doctest::Approx(1.0).epsilon(1e-15));

    const DiscreteMeasure pair = make_empirical({{0.0}, {1.0}});
    const DiscreteMeasure mid = make_empirical({{0.5}});
    CHECK(w1(pair, mid, euclid) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("4x4 instances match brute-force tree enumeration") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng.below(3), n = 2 + rng.below(3);
        const DiscreteMeasure mu = testutil::random_measure(rng, m, 2, trial % 2 == 0);
        const DiscreteMeasure nu = testutil::random_measure(rng, n, 2, trial % 3 == 0);
        const CostMatrix cost = cost_matrix(mu, nu, CostSpec{});
        const double expected = oracle::oracle_transport_trees(mu.weights, nu.weights, cost);
        CHECK(w1(mu, nu, cost) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("instances up to 8x8 match the Bland simplex oracle") {
    Rng rng(88);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + rng.below(7), n = 2 + rng.below(7);
        const DiscreteMeasure mu = testutil::random_measure(rng, m, 2, trial % 2 == 0);
        const DiscreteMeasure nu = testutil::random_measure(rng, n, 2, trial % 3 == 0);
        const CostMatrix cost = cost_matrix(mu, nu, CostSpec{});
        const OtSolution sol = solve_exact(mu, nu, cost);
        const double expected = oracle::oracle_transport_bland(mu.weights, nu.weights, cost);
        CHECK(std::abs(sol.cost_value - expected) <= 1e-9);
        CHECK(sol.coupling.marginal_violation() <= 1e-9);
        CHECK(std::abs(frobenius_dot(cost, sol.coupling.plan) - sol.cost_value) <= 1e-9);
    }
}

TEST_CASE("1-D solves match the CDF closed form at larger sizes") {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 2 + rng.below(120), n = 2 + rng.below(120);
        const DiscreteMeasure mu = testutil::random_measure(rng, m, 1, trial % 2 == 0, -3, 3);
        const DiscreteMeasure nu = testutil::random_measure(rng, n, 1, trial % 3 == 0, -3, 3);
        const double expected = oracle::oracle_w1_1d(mu, nu);
        CHECK(w1(mu, nu, CostSpec{}) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("w1 satisfies the metric axioms on random measures") {
    Rng rng(101);
    const CostSpec euclid;
    for (int trial = 0; trial < 200; ++trial) {
        const DiscreteMeasure a = testutil::random_measure(rng, 3 + rng.below(10), 2);
        const DiscreteMeasure b = testutil::random_measure(rng, 3 + rng.below(10), 2);
        CHECK(std::abs(w1(a, b, euclid) - w1(b, a, euclid)) <= 1e-9);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const DiscreteMeasure a = testutil::random_measure(rng, 3 + rng.below(8), 2);
        const DiscreteMeasure b = testutil::random_measure(rng, 3 + rng.below(8), 2);
        const DiscreteMeasure c = testutil::random_measure(rng, 3 + rng.below(8), 2);
        CHECK(w1(a, c, euclid) <= w1(a, b, euclid) + w1(b, c, euclid) + 1e-9);
    }
    const DiscreteMeasure a = testutil::random_measure(rng, 12, 2);
    CHECK(w1(a, a, euclid) <= 1e-12);
}

TEST_CASE("zero-weight atoms are pruned and get zero plan rows") {
    DiscreteMeasure mu = make_empirical({{0.0}, {1.0}, {2.0}});
    mu.weights = {0.5, 0.0, 0.5};
    const DiscreteMeasure nu = make_empirical({{0.0}, {2.0}});
    const OtSolution sol = solve_exact(mu, nu, cost_matrix(mu, nu, CostSpec{}));
    CHECK(sol.cost_value == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t j = 0; j < 2; ++j) CHECK(sol.coupling.plan(1, j) == 0.0);
    CHECK(sol.coupling.marginal_violation() <= 1e-9);
}

TEST_CASE("the variable cap advises the entropic solver") {
    Rng rng(7);
    const DiscreteMeasure mu = testutil::random_measure(rng, 30, 1);
    const DiscreteMeasure nu = testutil::random_measure(rng, 30, 1);
    ExactConfig cfg;
    cfg.max_variables = 100;
    CHECK_THROWS_WITH_AS(solve_exact(mu, nu, cost_matrix(mu, nu, CostSpec{}), cfg),
                         doctest::Contains("entropic"), std::invalid_argument);
}

TEST_CASE("solver rejects malformed cost matrices") {
    const DiscreteMeasure mu = make_empirical({{0.0}});
    const DiscreteMeasure nu = make_empirical({{1.0}});
    Matrix wrong_shape(2, 1);
    CHECK_THROWS_AS(solve_exact(mu, nu, wrong_shape), std::invalid_argument);
    Matrix negative(1, 1);
    negative(0, 0) = -1.0;
    CHECK_THROWS_AS(solve_exact(mu, nu, negative), std::invalid_argument);
}
