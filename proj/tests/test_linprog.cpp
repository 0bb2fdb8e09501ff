#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "otda/cost.hpp"
#include "otda/errors.hpp"
#include "otda/linprog.hpp"
#include "otda/rng.hpp"
#include "support/oracle_lp.hpp"
#include "support/test_util.hpp"

using namespace otda;

namespace {

lp::Problem transportation_lp(const std::vector<double>& a, const std::vector<double>& b,
                              const Matrix& cost) {
    const std::size_t m = a.size(), n = b.size();
    lp::Problem prob;
    prob.num_vars = m * n;
    prob.objective = cost.data();
    for (std::size_t i = 0; i < m; ++i) {
        lp::Constraint c;
        c.rhs = a[i];
        for (std::size_t j = 0; j < n; ++j) c.terms.push_back({i * n + j, 1.0});
        prob.equalities.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < n; ++j) {
        lp::Constraint c;
        c.rhs = b[j];
        for (std::size_t i = 0; i < m; ++i) c.terms.push_back({i * n + j, 1.0});
        prob.equalities.push_back(std::move(c));
    }
    return prob;
}

} // namespace

TEST_CASE("simplex matches the Bland oracle on random transportation LPs") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + rng.below(5), n = 2 + rng.below(5);
        const DiscreteMeasure mu = testutil::random_measure(rng, m, 2, trial % 2 == 0);
        const DiscreteMeasure nu = testutil::random_measure(rng, n, 2, trial % 3 == 0);
        const CostMatrix cost = cost_matrix(mu, nu, CostSpec{});
        const lp::Problem prob = transportation_lp(mu.weights, nu.weights, cost);
        const lp::Solution sol = lp::solve(prob);
        const double expected = oracle::oracle_transport_bland(mu.weights, nu.weights, cost);
        CHECK(sol.objective == doctest::Approx(expected).epsilon(1e-9));
        // solution satisfies the constraints
        for (const auto& row : prob.equalities) {
            double lhs = 0.0;
            for (const auto& [v, coef] : row.terms) lhs += coef * sol.x[v];
            CHECK(std::abs(lhs - row.rhs) <= 1e-9);
        }
        for (double x : sol.x) CHECK(x >= 0.0);
    }
}

TEST_CASE("simplex tolerates the redundant transportation constraint") {
    // row sums + column sums overdetermine by one equality; phase 1 must
    // blank the redundant artificial instead of failing
    const std::vector<double> a = {0.5, 0.5}, b = {0.25, 0.75};
    Matrix cost(2, 2);
    cost(0, 0) = 1.0;
    cost(0, 1) = 2.0;
    cost(1, 0) = 3.0;
    cost(1, 1) = 0.5;
    const lp::Solution sol = lp::solve(transportation_lp(a, b, cost));
    CHECK(sol.objective == doctest::Approx(oracle::oracle_transport_bland(a, b, cost))
                               .epsilon(1e-12));
}

TEST_CASE("simplex reports infeasibility") {
    lp::Problem prob;
    prob.num_vars = 1;
    prob.objective = {1.0};
    lp::Constraint c1;
    c1.terms = {{0, 1.0}};
    c1.rhs = 1.0;
    lp::Constraint c2;
    c2.terms = {{0, 1.0}};
    c2.rhs = 2.0;
    prob.equalities = {c1, c2};
    CHECK_THROWS_AS(lp::solve(prob), NumericalError);
}
