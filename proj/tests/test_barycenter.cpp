#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otda/barycenter.hpp"
#include "otda/ot_exact.hpp"
#include "otda/rng.hpp"
#include "support/test_util.hpp"

using namespace otda;

namespace {

double tv_between(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    REQUIRE(a.points == b.points);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.weights[i] - b.weights[i]);
    return 0.5 * s;
}

} // namespace

TEST_CASE("a single input is its own barycenter") {
    Rng rng(1);
    const DiscreteMeasure input = testutil::random_measure(rng, 8, 2, false);
    BarycenterConfig cfg;
    const auto [bary, objective] = [&] {
        const BarycenterResult r = barycenter({input}, cfg);
        return std::make_pair(r.barycenter, r.objective);
    }();
    CHECK(objective <= 1e-9);
    CHECK(bary.points == input.points);
    CHECK(tv_between(bary, input) <= 1e-9);
}

TEST_CASE("identical inputs return that measure") {
    Rng rng(2);
    const DiscreteMeasure input = testutil::random_measure(rng, 10, 2, false);
    BarycenterConfig cfg;
    cfg.weights_a = {0.25, 0.75};
    const BarycenterResult r = barycenter({input, input}, cfg);
    CHECK(r.objective <= 1e-6);
    CHECK(tv_between(r.barycenter, input) <= 1e-6);
}

TEST_CASE("two-Dirac barycenter lands on the weighted median") {
    const DiscreteMeasure d0 = make_empirical({{0.0}});
    const DiscreteMeasure d1 = make_empirical({{1.0}});
    std::vector<Point> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back({k / 10.0});

    BarycenterConfig cfg;
    cfg.support = grid;
    cfg.weights_a = {0.3, 0.7};
    const BarycenterResult r = barycenter({d0, d1}, cfg);

    // brute-force oracle over single-atom placements on the grid
    double best = std::numeric_limits<double>::infinity();
    double best_z = 0.0;
    for (const auto& z : grid) {
        const double value = 0.3 * std::abs(z[0] - 0.0) + 0.7 * std::abs(z[0] - 1.0);
        if (value < best) {
            best = value;
            best_z = z[0];
        }
    }
    CHECK(best == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(best_z == 1.0);
    CHECK(r.objective == doctest::Approx(best).epsilon(1e-9));
    // the W1 functional is linear in the weights here, so the optimum is the
    // unique vertex with all mass at 1
    CHECK(r.barycenter.weights.back() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("entropic path approximates the weighted median") {
    const DiscreteMeasure d0 = make_empirical({{0.0}});
    const DiscreteMeasure d1 = make_empirical({{1.0}});
    std::vector<Point> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back({k / 10.0});

    BarycenterConfig cfg;
    cfg.support = grid;
    cfg.weights_a = {0.3, 0.7};
    cfg.solver = BarycenterConfig::Solver::entropic;
    cfg.entropic.epsilon_reg = 0.01;
    cfg.tolerance = 1e-9;
    const BarycenterResult r = barycenter({d0, d1}, cfg);
    CHECK(r.objective == doctest::Approx(0.3).epsilon(0.05));

    double mean = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) mean += grid[k][0] * r.barycenter.weights[k];
    CHECK(mean >= 0.9);
}

TEST_CASE("barycenter objective beats every input used as candidate") {
    Rng rng(3);
    std::vector<DiscreteMeasure> inputs;
    for (int k = 0; k < 3; ++k) inputs.push_back(testutil::random_measure(rng, 5, 2));
    BarycenterConfig cfg;
    const BarycenterResult r = barycenter(inputs, cfg);

    const CostSpec euclid;
    for (const auto& candidate : inputs) {
        double value = 0.0;
        for (const auto& input : inputs) value += w1(candidate, input, euclid) / 3.0;
        CHECK(r.objective <= value + 1e-9);
    }
    double sum = 0.0;
    for (double w : r.barycenter.weights) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("exact and entropic barycenters agree on the objective") {
    Rng rng(4);
    std::vector<DiscreteMeasure> inputs = {testutil::random_measure(rng, 6, 2),
                                           testutil::random_measure(rng, 6, 2)};
    BarycenterConfig exact_cfg;
    const BarycenterResult exact = barycenter(inputs, exact_cfg);

    BarycenterConfig ent_cfg;
    ent_cfg.solver = BarycenterConfig::Solver::entropic;
    ent_cfg.entropic.epsilon_reg = 0.005;
    ent_cfg.max_outer_iters = 5000;
    ent_cfg.tolerance = 1e-9;
    const BarycenterResult entropic = barycenter(inputs, ent_cfg);
    CHECK(entropic.objective == doctest::Approx(exact.objective).epsilon(0.05));
    CHECK(entropic.objective + 1e-9 >= exact.objective);
}

TEST_CASE("dimension mismatch is rejected") {
    BarycenterConfig cfg;
    CHECK_THROWS_AS(barycenter({make_empirical({{0.0}}), make_empirical({{0.0, 1.0}})}, cfg),
                    std::invalid_argument);
    cfg.weights_a = {0.4, 0.4}; // does not sum to 1
    CHECK_THROWS_AS(barycenter({make_empirical({{0.0}}), make_empirical({{1.0}})}, cfg),
                    std::invalid_argument);
}

TEST_CASE("multisource_adapt on sources equal to the target is the identity") {
    Rng rng(5);
    const DiscreteMeasure base = testutil::random_measure(rng, 30, 2);
    LabeledSample s1{base, std::vector<int>(30, 0), "s1"};
    LabeledSample s2{base, std::vector<int>(30, 1), "s2"};

    BarycenterConfig cfg;
    const auto [mapped, report] = multisource_adapt({s1, s2}, base, {0.5, 0.5}, CostSpec{}, cfg);

    CHECK(report.pipeline_objective <= 1e-6);
    REQUIRE(mapped.measure.size() == 60);
    for (std::size_t i = 0; i < 60; ++i) {
        const Point& original = base.points[i % 30];
        CHECK(std::abs(mapped.measure.points[i][0] - original[0]) <= 1e-6);
        CHECK(std::abs(mapped.measure.points[i][1] - original[1]) <= 1e-6);
    }
}

TEST_CASE("multisource report satisfies the triangle bound") {
    Rng rng(6);
    std::vector<LabeledSample> sources;
    for (int j = 0; j < 2; ++j) {
        LabeledSample s;
        s.measure = testutil::random_measure(rng, 12, 2);
        s.labels.assign(12, j);
        s.domain_tag = "s" + std::to_string(j);
        sources.push_back(s);
    }
    const DiscreteMeasure target = testutil::random_measure(rng, 12, 2);
    const std::vector<double> alphas = {0.4, 0.6};

    BarycenterConfig cfg;
    const auto [mapped, report] = multisource_adapt(sources, target, alphas, CostSpec{}, cfg);

    // sum_j alpha_j W1(mu_j, mu_T) <= sum_j alpha_j W1(mu_j, bary) + N W1(bary, mu_T)
    double lhs = report.sum_alpha_w1_to_target;
    double rhs = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j)
        rhs += alphas[j] * report.per_source_w1_to_bary[j];
    rhs += 2.0 * report.w1_bary_to_target;
    CHECK(lhs <= rhs + 1e-9);

    // the pipeline objective of the returned barycenter does not lose to the
    // target or to any source used as candidate
    const CostSpec euclid;
    auto pipeline_at = [&](const DiscreteMeasure& candidate) {
        double value = 0.0;
        for (std::size_t j = 0; j < sources.size(); ++j)
            value += alphas[j] * w1(sources[j].measure, candidate, euclid) / 2.0;
        return value + w1(candidate, target, euclid);
    };
    CHECK(report.pipeline_objective <= pipeline_at(target) + 1e-9);
    for (const auto& s : sources) CHECK(report.pipeline_objective <= pipeline_at(s.measure) + 1e-9);
}

TEST_CASE("symmetric gaussian sources center the barycenter near the target") {
    auto gaussians = [&](double shift_x, std::uint64_t seed) {
        DatasetConfig d;
        d.generator = GeneratorKind::gaussian_shift;
        d.n_points = 100;
        d.class_separation = 0.0;
        d.shift_vector = {shift_x, 0.0};
        d.seed = seed;
        return generate(d).target;
    };
    std::vector<LabeledSample> sources = {gaussians(-2.0, 11), gaussians(2.0, 12)};
    const DiscreteMeasure target = gaussians(0.0, 13).measure;

    BarycenterConfig cfg;
    cfg.solver = BarycenterConfig::Solver::entropic;
    cfg.entropic.epsilon_reg = 0.1;
    cfg.max_outer_iters = 3000;
    cfg.tolerance = 1e-6;
    const auto [mapped, report] =
        multisource_adapt(sources, target, {0.5, 0.5}, CostSpec{}, cfg);

    double mean_x = 0.0;
    for (std::size_t i = 0; i < mapped.measure.size(); ++i)
        mean_x += mapped.measure.weights[i] * mapped.measure.points[i][0];
    CHECK(std::abs(mean_x) <= 0.3);
}
