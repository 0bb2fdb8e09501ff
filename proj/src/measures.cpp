#include "otda/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "otda/rng.hpp"

namespace otda {

namespace {

constexpr double kWeightSumTol = 1e-12;

void check_uniform_dimension(const std::vector<Point>& points) {
    if (points.empty()) throw std::invalid_argument("empty support");
    const std::size_t d = points.front().size();
    if (d < 1) throw std::invalid_argument("dimension mismatch: zero-dimensional point");
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("dimension mismatch");
}

} // namespace

void DiscreteMeasure::validate() const {
    check_uniform_dimension(points);
    if (weights.size() != points.size())
        throw std::invalid_argument("weight count does not match point count");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol)
        throw std::invalid_argument("weights do not sum to 1");
}

void DiscreteMeasure::renormalize() {
    double sum = 0.0;
    for (double w : weights) sum += w;
    if (sum <= 0.0) throw std::invalid_argument("total weight is zero");
    for (double& w : weights) w /= sum;
}

DiscreteMeasure make_empirical(std::vector<Point> points) {
    check_uniform_dimension(points);
    DiscreteMeasure m;
    m.weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
    m.points = std::move(points);
    m.renormalize();
    return m;
}

void LabeledSample::validate() const {
    measure.validate();
    if (labels.size() != measure.size())
        throw std::invalid_argument("label count does not match support size");
    for (int y : labels)
        if (y != 0 && y != 1) throw std::invalid_argument("label outside {0,1}");
}

GeneratorKind generator_from_string(const std::string& name) {
    if (name == "two_moons") return GeneratorKind::two_moons;
    if (name == "gaussian_shift") return GeneratorKind::gaussian_shift;
    if (name == "square_annulus") return GeneratorKind::square_annulus;
    throw std::invalid_argument("unknown generator: " + name);
}

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::two_moons: return "two_moons";
        case GeneratorKind::gaussian_shift: return "gaussian_shift";
        case GeneratorKind::square_annulus: return "square_annulus";
    }
    return "?";
}

void DatasetConfig::validate() const {
    if (n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    if (generator == GeneratorKind::square_annulus) {
        const double half_diagonal = std::numbers::sqrt2 / 2.0;
        if (inner_radius < half_diagonal)
            throw std::invalid_argument("inner radius does not cover the unit square");
        if (outer_radius <= inner_radius)
            throw std::invalid_argument("outer radius must exceed inner radius");
    }
    if (generator == GeneratorKind::two_moons && noise_std < 0.0)
        throw std::invalid_argument("noise_std must be >= 0");
}

namespace {

std::vector<double> resolve_shift(const DatasetConfig& cfg) {
    if (!cfg.shift_vector.empty()) return cfg.shift_vector;
    return {0.0, 0.0};
}

DomainPair generate_two_moons(const DatasetConfig& cfg) {
    Rng rng(cfg.seed);
    const int n = cfg.n_points;
    std::vector<Point> pts(n);
    std::vector<int> labels(n);
    // Interleaved half circles; even indices on the upper moon, odd on the
    // lower, so both classes are present for any n >= 2.
    for (int i = 0; i < n; ++i) {
        const double t = rng.uniform() * std::numbers::pi;
        Point p(2);
        if (i % 2 == 0) {
            p[0] = std::cos(t);
            p[1] = std::sin(t);
            labels[i] = 0;
        } else {
            p[0] = 1.0 - std::cos(t);
            p[1] = 0.5 - std::sin(t);
            labels[i] = 1;
        }
        if (cfg.noise_std > 0.0) {
            p[0] += cfg.noise_std * rng.gaussian();
            p[1] += cfg.noise_std * rng.gaussian();
        }
        pts[i] = p;
    }

    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
        cx += p[0];
        cy += p[1];
    }
    cx /= n;
    cy /= n;

    // zero rotation is the exact identity
    std::vector<Point> rotated = pts;
    if (cfg.rotation_deg != 0.0) {
        const double theta = cfg.rotation_deg * std::numbers::pi / 180.0;
        const double c = std::cos(theta), s = std::sin(theta);
        for (int i = 0; i < n; ++i) {
            const double dx = pts[i][0] - cx, dy = pts[i][1] - cy;
            rotated[i] = {cx + c * dx - s * dy, cy + s * dx + c * dy};
        }
    }

    DomainPair out;
    out.source = {make_empirical(std::move(pts)), labels, "source"};
    out.target = {make_empirical(std::move(rotated)), labels, "target"};
    return out;
}

DomainPair generate_gaussian_shift(const DatasetConfig& cfg) {
    Rng rng(cfg.seed);
    const int n = cfg.n_points;
    const std::vector<double> shift = resolve_shift(cfg);
    const std::size_t d = std::max<std::size_t>(2, shift.size());

    auto draw_domain = [&](bool shifted) {
        std::vector<Point> pts(n);
        std::vector<int> labels(n);
        for (int i = 0; i < n; ++i) {
            const int cls = i % 2;
            Point p(d, 0.0);
            for (std::size_t k = 0; k < d; ++k) p[k] = rng.gaussian();
            p[0] += cls == 1 ? cfg.class_separation : 0.0;
            if (shifted)
                for (std::size_t k = 0; k < shift.size(); ++k) p[k] += shift[k];
            pts[i] = std::move(p);
            labels[i] = cls;
        }
        return std::make_pair(std::move(pts), std::move(labels));
    };

    auto [src_pts, src_labels] = draw_domain(false);
    auto [tgt_pts, tgt_labels] = draw_domain(true);

    DomainPair out;
    out.source = {make_empirical(std::move(src_pts)), std::move(src_labels), "source"};
    out.target = {make_empirical(std::move(tgt_pts)), std::move(tgt_labels), "target"};
    return out;
}

DomainPair generate_square_annulus(const DatasetConfig& cfg) {
    Rng rng(cfg.seed);
    const int n = cfg.n_points;
    const double cx = 0.5, cy = 0.5; // annulus centered on the unit square

    std::vector<Point> src(n);
    std::vector<int> src_labels(n);
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const double y = rng.uniform();
        src[i] = {x, y};
        src_labels[i] = x >= cx ? 1 : 0;
    }

    std::vector<Point> tgt(n);
    std::vector<int> tgt_labels(n);
    const double r2_in = cfg.inner_radius * cfg.inner_radius;
    const double r2_out = cfg.outer_radius * cfg.outer_radius;
    for (int i = 0; i < n; ++i) {
        const double theta = rng.uniform() * 2.0 * std::numbers::pi;
        const double r = std::sqrt(r2_in + rng.uniform() * (r2_out - r2_in)); // area-uniform
        const double x = cx + r * std::cos(theta);
        tgt[i] = {x, cy + r * std::sin(theta)};
        tgt_labels[i] = x >= cx ? 1 : 0;
    }

    DomainPair out;
    out.source = {make_empirical(std::move(src)), std::move(src_labels), "source"};
    out.target = {make_empirical(std::move(tgt)), std::move(tgt_labels), "target"};
    return out;
}

} // namespace

DomainPair generate(const DatasetConfig& config) {
    config.validate();
    switch (config.generator) {
        case GeneratorKind::two_moons: return generate_two_moons(config);
        case GeneratorKind::gaussian_shift: return generate_gaussian_shift(config);
        case GeneratorKind::square_annulus: return generate_square_annulus(config);
    }
    throw std::invalid_argument("unknown generator");
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_double_field(const std::string& field, std::size_t row_number) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed row " + std::to_string(row_number) +
                                    ": cannot parse '" + field + "'");
    }
    while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
    if (pos != field.size())
        throw std::invalid_argument("malformed row " + std::to_string(row_number) +
                                    ": cannot parse '" + field + "'");
    return v;
}

} // namespace

LabeledSample load_csv(const std::string& path, const std::string& domain_tag) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    LabeledSample sample;
    sample.domain_tag = domain_tag.empty() ? path : domain_tag;

    std::string line;
    std::size_t row_number = 0;
    bool has_labels = false;
    std::size_t dim = 0;
    bool first_data_row = true;

    while (std::getline(in, line)) {
        ++row_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = split_csv_row(line);
        if (row_number == 1 && !fields.empty() && fields.front().rfind("x1", 0) == 0) {
            // header row: x1,...,xd[,label]
            has_labels = fields.back() == "label";
            dim = fields.size() - (has_labels ? 1 : 0);
            first_data_row = false;
            continue;
        }
        if (first_data_row) {
            // headerless file: infer shape from the first row; a trailing
            // integer column is treated as the label
            has_labels = fields.size() >= 2 &&
                         fields.back().find('.') == std::string::npos &&
                         fields.back().find('e') == std::string::npos &&
                         (fields.back() == "0" || fields.back() == "1");
            dim = fields.size() - (has_labels ? 1 : 0);
            first_data_row = false;
        }
        const std::size_t expected = dim + (has_labels ? 1 : 0);
        if (fields.size() != expected)
            throw std::invalid_argument("malformed row " + std::to_string(row_number) +
                                        ": expected " + std::to_string(expected) + " fields, got " +
                                        std::to_string(fields.size()));

        Point p(dim);
        for (std::size_t k = 0; k < dim; ++k) p[k] = parse_double_field(fields[k], row_number);
        sample.measure.points.push_back(std::move(p));
        if (has_labels) {
            const double y = parse_double_field(fields[dim], row_number);
            if (y != 0.0 && y != 1.0)
                throw std::invalid_argument("malformed row " + std::to_string(row_number) +
                                            ": label outside {0,1}");
            sample.labels.push_back(static_cast<int>(y));
        }
    }

    if (sample.measure.points.empty()) throw std::invalid_argument("empty support");
    sample.measure.weights.assign(sample.measure.size(), 1.0 / sample.measure.size());
    sample.measure.renormalize();
    if (!has_labels) sample.labels.assign(sample.measure.size(), 0);
    sample.validate();
    return sample;
}

void save_csv(const LabeledSample& sample, const std::string& path) {
    sample.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);

    const std::size_t d = sample.measure.dim();
    for (std::size_t k = 0; k < d; ++k) out << (k ? "," : "") << "x" << (k + 1);
    out << ",label\n";
    for (std::size_t i = 0; i < sample.measure.size(); ++i) {
        for (std::size_t k = 0; k < d; ++k)
            out << (k ? "," : "") << format_double(sample.measure.points[i][k]);
        out << "," << sample.labels[i] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

nlohmann::json measure_to_json(const DiscreteMeasure& m) {
    nlohmann::json j;
    j["points"] = m.points;
    j["weights"] = m.weights;
    return j;
}

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
    DiscreteMeasure m;
    m.points = j.at("points").get<std::vector<Point>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.validate();
    return m;
}

} // namespace otda
