#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace otda {

using Point = std::vector<double>;

// Weighted point cloud in R^d. Weights are nonnegative and sum to 1.
struct DiscreteMeasure {
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    std::size_t dim() const { return points.empty() ? 0 : points.front().size(); }

    // Throws std::invalid_argument when any invariant is broken:
    // nonempty, uniform dimension d >= 1, weights >= 0 summing to 1
    // within 1e-12, one weight per point.
    void validate() const;

    // Rescales weights to sum exactly to 1; absorbs rounding from
    // construction so the coupling solvers see exactly feasible marginals.
    void renormalize();
};

// Uniform empirical measure on the given support, in input order.
DiscreteMeasure make_empirical(std::vector<Point> points);

struct LabeledSample {
    DiscreteMeasure measure;
    std::vector<int> labels; // each in {0,1}
    std::string domain_tag;

    void validate() const;
};

enum class GeneratorKind { two_moons, gaussian_shift, square_annulus };

GeneratorKind generator_from_string(const std::string& name);
std::string to_string(GeneratorKind kind);

struct DatasetConfig {
    GeneratorKind generator = GeneratorKind::two_moons;
    int n_points = 100; // per domain

    // two_moons: target = source rotated by rotation_deg about the source centroid
    double rotation_deg = 0.0;
    double noise_std = 0.0;

    // gaussian_shift: class centers at origin and (class_separation, 0, ...);
    // target is an independent draw shifted by shift_vector
    std::vector<double> shift_vector;
    double class_separation = 4.0;

    // square_annulus: source uniform in [0,1]^2, target uniform in the annulus
    // about the square center; inner must cover the square's half-diagonal
    double inner_radius = 0.75;
    double outer_radius = 1.25;

    std::uint64_t seed = 0;

    void validate() const;
};

struct DomainPair {
    LabeledSample source;
    LabeledSample target;
};

// Pure function of the config including seed: equal configs give
// bit-identical samples.
DomainPair generate(const DatasetConfig& config);

// CSV with header x1,...,xd[,label]; coordinates serialized with 17
// significant digits so save -> load round-trips bit-exactly.
LabeledSample load_csv(const std::string& path, const std::string& domain_tag = "");
void save_csv(const LabeledSample& sample, const std::string& path);

nlohmann::json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

} // namespace otda
