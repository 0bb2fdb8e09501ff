#include "otda/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otda/rng.hpp"

namespace otda {

namespace {

double sq_dist(const Point& x, const Point& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

} // namespace

int Hypothesis::predict(const Point& x) const {
    if (kind == Kind::linear_threshold) {
        if (weights.size() != x.size()) throw std::invalid_argument("dimension mismatch");
        double s = bias;
        for (std::size_t j = 0; j < x.size(); ++j) s += weights[j] * x[j];
        return s >= 0.0 ? 1 : 0;
    }

    // k nearest neighbors; distance ties resolve to the lowest index, so
    // duplicate points with conflicting labels are deterministic
    const std::size_t n = train_points.size();
    const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {sq_dist(x, train_points[i]), i};
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    int votes = 0;
    for (std::size_t i = 0; i < kk; ++i) votes += train_labels[dist[i].second];
    return 2 * votes > static_cast<int>(kk) ? 1 : 0;
}

std::string LearnerSpec::id() const {
    if (kind == Hypothesis::Kind::linear_threshold) return "linear";
    return "knn" + std::to_string(k);
}

LearnerSpec learner_from_string(const std::string& name) {
    LearnerSpec spec;
    if (name == "linear") {
        spec.kind = Hypothesis::Kind::linear_threshold;
        return spec;
    }
    if (name.rfind("knn", 0) == 0) {
        spec.kind = Hypothesis::Kind::nearest_neighbor;
        spec.k = std::stoi(name.substr(3));
        if (spec.k < 1 || spec.k % 2 == 0)
            throw std::invalid_argument("knn order must be odd and >= 1");
        return spec;
    }
    throw std::invalid_argument("unknown learner: " + name);
}

namespace {

// Weighted ridge fit on +-1 targets; the (d+1)x(d+1) normal equations are
// solved by Gaussian elimination with partial pivoting.
Hypothesis fit_linear(const LabeledSample& sample) {
    const std::size_t n = sample.measure.size();
    const std::size_t d = sample.measure.dim();
    bool has0 = false, has1 = false;
    for (int y : sample.labels) (y ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::invalid_argument("linear_threshold needs both classes in the training data");

    const std::size_t dim = d + 1;
    std::vector<double> A(dim * dim, 0.0), rhs(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sample.measure.weights[i];
        const double y = sample.labels[i] ? 1.0 : -1.0;
        std::vector<double> x(dim);
        for (std::size_t j = 0; j < d; ++j) x[j] = sample.measure.points[i][j];
        x[d] = 1.0;
        for (std::size_t r = 0; r < dim; ++r) {
            rhs[r] += w * x[r] * y;
            for (std::size_t c = 0; c < dim; ++c) A[r * dim + c] += w * x[r] * x[c];
        }
    }
    for (std::size_t r = 0; r < dim; ++r) A[r * dim + r] += 1e-8;

    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < dim; ++r)
            if (std::abs(A[r * dim + col]) > std::abs(A[piv * dim + col])) piv = r;
        if (piv != col) {
            for (std::size_t c = 0; c < dim; ++c) std::swap(A[col * dim + c], A[piv * dim + c]);
            std::swap(rhs[col], rhs[piv]);
        }
        const double diag = A[col * dim + col];
        for (std::size_t r = col + 1; r < dim; ++r) {
            const double f = A[r * dim + col] / diag;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < dim; ++c) A[r * dim + c] -= f * A[col * dim + c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> theta(dim);
    for (std::size_t r = dim; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t c = r + 1; c < dim; ++c) s -= A[r * dim + c] * theta[c];
        theta[r] = s / A[r * dim + r];
    }

    Hypothesis h;
    h.kind = Hypothesis::Kind::linear_threshold;
    h.weights.assign(theta.begin(), theta.begin() + d);
    h.bias = theta[d];
    for (double w : h.weights)
        if (!std::isfinite(w)) throw std::invalid_argument("linear fit produced non-finite weights");
    return h;
}

} // namespace

Hypothesis train(const LabeledSample& sample, const LearnerSpec& spec) {
    sample.validate();
    if (spec.kind == Hypothesis::Kind::linear_threshold) return fit_linear(sample);
    if (spec.k < 1 || spec.k % 2 == 0)
        throw std::invalid_argument("knn order must be odd and >= 1");
    Hypothesis h;
    h.kind = Hypothesis::Kind::nearest_neighbor;
    h.k = spec.k;
    h.train_points = sample.measure.points;
    h.train_labels = sample.labels;
    return h;
}

ErrorReport error(const Hypothesis& h, const LabeledSample& sample) {
    sample.validate();
    ErrorReport rep;
    rep.n_points = sample.measure.size();
    double err = 0.0;
    for (std::size_t i = 0; i < sample.measure.size(); ++i)
        if (h.predict(sample.measure.points[i]) != sample.labels[i])
            err += sample.measure.weights[i];
    rep.value = err;
    return rep;
}

double combined_error(const Hypothesis& h, const LabeledSample& target,
                      const LabeledSample& source, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    return alpha * error(h, target).value + (1.0 - alpha) * error(h, source).value;
}

double weighted_multisource_error(const Hypothesis& h, const std::vector<LabeledSample>& sources,
                                  const std::vector<double>& alphas) {
    if (sources.size() != alphas.size())
        throw std::invalid_argument("alphas size does not match sources");
    double sum = 0.0;
    for (double a : alphas) {
        if (!(a >= 0.0)) throw std::invalid_argument("alphas must be >= 0");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("alphas must sum to 1");
    double value = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j)
        value += alphas[j] * error(h, sources[j]).value;
    return value;
}

namespace {

LabeledSample pool(const LabeledSample& a, const LabeledSample& b) {
    LabeledSample pooled;
    pooled.domain_tag = "pooled";
    pooled.measure.points = a.measure.points;
    pooled.measure.points.insert(pooled.measure.points.end(), b.measure.points.begin(),
                                 b.measure.points.end());
    pooled.labels = a.labels;
    pooled.labels.insert(pooled.labels.end(), b.labels.begin(), b.labels.end());
    // equal domain mass, matching eps_S + eps_T
    pooled.measure.weights.resize(pooled.measure.points.size());
    for (std::size_t i = 0; i < a.measure.size(); ++i)
        pooled.measure.weights[i] = 0.5 * a.measure.weights[i];
    for (std::size_t i = 0; i < b.measure.size(); ++i)
        pooled.measure.weights[a.measure.size() + i] = 0.5 * b.measure.weights[i];
    pooled.measure.renormalize();
    return pooled;
}

} // namespace

LambdaEstimate estimate_lambda_joint(const LabeledSample& source, const LabeledSample& target,
                                     const LearnerSpec& spec, std::uint64_t seed) {
    source.validate();
    target.validate();

    const LabeledSample pooled = pool(source, target);
    LambdaEstimate est;
    est.class_id = spec.id() + " (class-restricted)";
    est.value = std::numeric_limits<double>::infinity();

    auto consider = [&](const std::string& name, const Hypothesis& h) {
        const double joint = error(h, source).value + error(h, target).value;
        est.candidates.emplace_back(name, joint);
        if (joint < est.value) {
            est.value = joint;
            est.minimizer = h;
        }
    };

    if (spec.kind == Hypothesis::Kind::nearest_neighbor) {
        consider("pooled", train(pooled, spec));
        return est;
    }

    bool pooled_fit_ok = true;
    try {
        consider("pooled", train(pooled, spec));
    } catch (const std::invalid_argument&) {
        pooled_fit_ok = false; // single-class pool; restarts below still run
    }

    // random-restart hyperplanes: direction from a unit gaussian draw,
    // thresholds swept over projection quantiles
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const std::size_t d = pooled.measure.dim();
    const int n_directions = 32;
    const int n_thresholds = 16;
    std::vector<double> proj(pooled.measure.size());
    for (int r = 0; r < n_directions; ++r) {
        std::vector<double> dir(d);
        double norm = 0.0;
        for (auto& v : dir) {
            v = rng.gaussian();
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (auto& v : dir) v /= norm;

        for (std::size_t i = 0; i < pooled.measure.size(); ++i) {
            proj[i] = 0.0;
            for (std::size_t j = 0; j < d; ++j) proj[i] += dir[j] * pooled.measure.points[i][j];
        }
        auto sorted = proj;
        std::sort(sorted.begin(), sorted.end());
        for (int q = 0; q < n_thresholds; ++q) {
            const std::size_t idx =
                std::min(sorted.size() - 1, (q + 1) * sorted.size() / (n_thresholds + 1));
            const double thr = sorted[idx];
            for (int sign = 0; sign < 2; ++sign) {
                Hypothesis h;
                h.kind = Hypothesis::Kind::linear_threshold;
                h.weights = dir;
                h.bias = -thr;
                if (sign) {
                    for (auto& v : h.weights) v = -v;
                    h.bias = thr;
                }
                consider("restart" + std::to_string(r) + ":" + std::to_string(q) +
                             (sign ? "-" : "+"),
                         h);
            }
        }
    }
    if (!pooled_fit_ok && est.candidates.empty())
        throw std::invalid_argument("lambda search found no feasible linear candidate");
    return est;
}

} // namespace otda
