#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "otda/measures.hpp"

namespace otda {

// Binary classifiers h: R^d -> {0,1}. nearest_neighbor stores its training
// sample; linear_threshold is sign(w.x + bias).
struct Hypothesis {
    enum class Kind { nearest_neighbor, linear_threshold };
    Kind kind = Kind::nearest_neighbor;

    int k = 1; // odd
    std::vector<Point> train_points;
    std::vector<int> train_labels;

    std::vector<double> weights;
    double bias = 0.0;

    int predict(const Point& x) const;
};

struct LearnerSpec {
    Hypothesis::Kind kind = Hypothesis::Kind::nearest_neighbor;
    int k = 1; // nearest_neighbor only; must be odd

    std::string id() const;
};

LearnerSpec learner_from_string(const std::string& name); // "knn1", "knn3", "linear"

// Deterministic fit. linear_threshold is ridge regression on +-1 targets
// thresholded at 0 and requires both classes present.
Hypothesis train(const LabeledSample& sample, const LearnerSpec& spec);

struct ErrorReport {
    double value = 0.0; // in [0,1]
    std::string loss = "zero_one";
    std::size_t n_points = 0;
};

// Weight-averaged zero-one disagreement of h with the sample labels.
ErrorReport error(const Hypothesis& h, const LabeledSample& sample);

// alpha * target error + (1 - alpha) * source error.
double combined_error(const Hypothesis& h, const LabeledSample& target,
                      const LabeledSample& source, double alpha);

double weighted_multisource_error(const Hypothesis& h, const std::vector<LabeledSample>& sources,
                                  const std::vector<double>& alphas);

struct LambdaEstimate {
    double value = 0.0; // min found of eps_S(h) + eps_T(h) within the class
    Hypothesis minimizer;
    std::string class_id; // e.g. "knn1 (class-restricted)"
    // every candidate the search enumerated, with its joint error
    std::vector<std::pair<std::string, double>> candidates;
};

// Upper estimate of the ideal joint error lambda within the chosen class:
// pooled fits plus random restarts for the linear class.
LambdaEstimate estimate_lambda_joint(const LabeledSample& source, const LabeledSample& target,
                                     const LearnerSpec& spec, std::uint64_t seed = 0);

} // namespace otda
