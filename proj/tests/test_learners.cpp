#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "otda/learners.hpp"
#include "otda/rng.hpp"
#include "support/test_util.hpp"

using namespace otda;

namespace {

LabeledSample labeled(const DiscreteMeasure& m, std::vector<int> labels, std::string tag) {
    return {m, std::move(labels), std::move(tag)};
}

LabeledSample two_clusters(double sep, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Point> pts;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = static_cast<int>(i % 2);
        pts.push_back({(cls ? sep : -sep) + 0.1 * rng.gaussian(), 0.1 * rng.gaussian()});
        labels.push_back(cls);
    }
    return labeled(make_empirical(pts), labels, "clusters");
}

} // namespace

TEST_CASE("1-NN memorizes its training set") {
    Rng rng(1);
    LabeledSample s;
    s.measure = testutil::random_measure(rng, 40, 2);
    for (int i = 0; i < 40; ++i) s.labels.push_back(static_cast<int>(rng.below(2)));
    s.domain_tag = "train";
    const Hypothesis h = train(s, LearnerSpec{});
    CHECK(error(h, s).value == 0.0);
}

TEST_CASE("linear threshold separates distant clusters") {
    const LabeledSample s = two_clusters(5.0, 60, 2);
    const Hypothesis h = train(s, {Hypothesis::Kind::linear_threshold, 1});
    CHECK(error(h, s).value == 0.0);
}

TEST_CASE("linear threshold rejects single-class data") {
    Rng rng(3);
    LabeledSample s;
    s.measure = testutil::random_measure(rng, 10, 2);
    s.labels.assign(10, 1);
    s.domain_tag = "const";
    CHECK_THROWS_AS(train(s, {Hypothesis::Kind::linear_threshold, 1}), std::invalid_argument);
    CHECK_NOTHROW(train(s, LearnerSpec{})); // nearest_neighbor never errors
}

TEST_CASE("zero-one error endpoints") {
    const LabeledSample s = two_clusters(5.0, 20, 4);
    const Hypothesis perfect = train(s, LearnerSpec{});
    CHECK(error(perfect, s).value == 0.0);

    LabeledSample flipped = s;
    for (auto& y : flipped.labels) y = 1 - y;
    CHECK(error(perfect, flipped).value == doctest::Approx(1.0).epsilon(1e-12));

    // hypothesis agreeing on exactly half the uniform-weight points
    LabeledSample half = s;
    for (std::size_t i = 0; i < half.labels.size(); i += 2) half.labels[i] = 1 - half.labels[i];
    CHECK(error(perfect, half).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("combined error interpolates linearly in alpha") {
    const LabeledSample source = two_clusters(5.0, 30, 5);
    LabeledSample target = two_clusters(5.0, 30, 6);
    for (std::size_t i = 0; i < target.labels.size(); i += 3)
        target.labels[i] = 1 - target.labels[i];

    const Hypothesis h = train(source, LearnerSpec{});
    const double err_t = error(h, target).value;
    const double err_s = error(h, source).value;
    CHECK(combined_error(h, target, source, 1.0) == doctest::Approx(err_t).epsilon(1e-15));
    CHECK(combined_error(h, target, source, 0.0) == doctest::Approx(err_s).epsilon(1e-15));
    for (int k = 0; k <= 10; ++k) {
        const double alpha = k / 10.0;
        CHECK(combined_error(h, target, source, alpha) ==
              doctest::Approx(alpha * err_t + (1 - alpha) * err_s).epsilon(1e-12));
    }
    CHECK_THROWS_AS(combined_error(h, target, source, 1.5), std::invalid_argument);
}

TEST_CASE("combined error arithmetic example") {
    // errors 0.2 / 0.4 at alpha 0.5 combine to 0.3
    LabeledSample target = two_clusters(5.0, 10, 7);
    LabeledSample source = two_clusters(5.0, 10, 8);
    const Hypothesis h = train(source, LearnerSpec{});
    for (int i = 0; i < 2; ++i) target.labels[i] = 1 - target.labels[i];   // 0.2
    for (int i = 0; i < 4; ++i) source.labels[i] = 1 - source.labels[i];   // 0.4
    CHECK(error(h, target).value == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(error(h, source).value == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(combined_error(h, target, source, 0.5) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("weighted multi-source error") {
    const LabeledSample s = two_clusters(5.0, 20, 9);
    const Hypothesis h = train(s, LearnerSpec{});
    LabeledSample agree = s;
    LabeledSample disagree = s;
    for (auto& y : disagree.labels) y = 1 - y;

    CHECK(weighted_multisource_error(h, {agree}, {1.0}) == 0.0);
    CHECK(weighted_multisource_error(h, {agree, disagree}, {0.5, 0.5}) ==
          doctest::Approx(0.5).epsilon(1e-12));

    LabeledSample e01 = s, e05 = s;
    for (int i = 0; i < 2; ++i) e01.labels[i] = 1 - e01.labels[i];  // error 0.1
    for (int i = 0; i < 10; ++i) e05.labels[i] = 1 - e05.labels[i]; // error 0.5
    CHECK(weighted_multisource_error(h, {e01, e05}, {0.9, 0.1}) ==
          doctest::Approx(0.14).epsilon(1e-12));

    CHECK_THROWS_AS(weighted_multisource_error(h, {agree, disagree}, {0.9, 0.3}),
                    std::invalid_argument);
}

TEST_CASE("lambda estimate on identical domains is zero") {
    const LabeledSample s = two_clusters(5.0, 30, 10);
    const LambdaEstimate est = estimate_lambda_joint(s, s, LearnerSpec{});
    CHECK(est.value == 0.0);
    CHECK(est.class_id == "knn1 (class-restricted)");
}

TEST_CASE("flipped labels pin the joint error at one") {
    const LabeledSample s = two_clusters(5.0, 30, 11);
    LabeledSample flipped = s;
    for (auto& y : flipped.labels) y = 1 - y;
    for (auto spec : {LearnerSpec{}, LearnerSpec{Hypothesis::Kind::linear_threshold, 1}}) {
        const LambdaEstimate est = estimate_lambda_joint(s, flipped, spec, 3);
        CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("lambda estimate is consistent with its minimizer and candidates") {
    DatasetConfig cfg;
    cfg.generator = GeneratorKind::two_moons;
    cfg.n_points = 60;
    cfg.rotation_deg = 25.0;
    cfg.seed = 12;
    const DomainPair pair = generate(cfg);
    for (auto spec : {LearnerSpec{}, LearnerSpec{Hypothesis::Kind::linear_threshold, 1}}) {
        const LambdaEstimate est = estimate_lambda_joint(pair.source, pair.target, spec, 5);
        const double rejoined =
            error(est.minimizer, pair.source).value + error(est.minimizer, pair.target).value;
        CHECK(est.value == doctest::Approx(rejoined).epsilon(1e-12));
        for (const auto& [name, value] : est.candidates) CHECK(est.value <= value + 1e-12);
    }
}

TEST_CASE("small rotations keep the joint 1-NN error low across seeds") {
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        DatasetConfig cfg;
        cfg.generator = GeneratorKind::two_moons;
        cfg.n_points = 100;
        cfg.rotation_deg = 10.0;
        cfg.seed = 5000 + seed;
        const DomainPair pair = generate(cfg);
        if (estimate_lambda_joint(pair.source, pair.target, LearnerSpec{}).value <= 0.1) ++ok;
    }
    CHECK(ok == 100);
}

TEST_CASE("knn order must be odd") {
    CHECK_THROWS_AS(learner_from_string("knn2"), std::invalid_argument);
    CHECK(learner_from_string("knn3").k == 3);
    CHECK(learner_from_string("linear").kind == Hypothesis::Kind::linear_threshold);
    CHECK_THROWS_AS(learner_from_string("svm"), std::invalid_argument);
}
