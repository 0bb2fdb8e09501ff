#include "otda/cost.hpp"

#include <cmath>
#include <stdexcept>

namespace otda {

CostKind cost_kind_from_string(const std::string& name) {
    if (name == "euclidean") return CostKind::euclidean;
    if (name == "sq_euclidean") return CostKind::sq_euclidean;
    if (name == "kernel_induced") return CostKind::kernel_induced;
    throw std::invalid_argument("unknown cost kind: " + name);
}

std::string to_string(CostKind kind) {
    switch (kind) {
        case CostKind::euclidean: return "euclidean";
        case CostKind::sq_euclidean: return "sq_euclidean";
        case CostKind::kernel_induced: return "kernel_induced";
    }
    return "?";
}

void CostSpec::validate() const {
    if (kernel_bound <= 0.0) throw std::invalid_argument("kernel_bound must be > 0");
    if (kind == CostKind::kernel_induced) {
        if (!kernel) throw std::invalid_argument("kernel_induced cost requires a kernel");
        if (kernel->sigma <= 0.0) throw std::invalid_argument("kernel bandwidth must be > 0");
    }
}

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

double pair_cost(const Point& x, const Point& y, const CostSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case CostKind::euclidean: return std::sqrt(sq_dist(x, y));
        case CostKind::sq_euclidean: return sq_dist(x, y);
        case CostKind::kernel_induced: {
            const double s2 = 2.0 * spec.kernel->sigma * spec.kernel->sigma;
            // gaussian kernel: k(x,x) = k(y,y) = 1
            const double sq = 2.0 - 2.0 * std::exp(-sq_dist(x, y) / s2);
            // cancellation can leave a tiny negative value under the root
            return std::sqrt(sq < 0.0 ? 0.0 : sq);
        }
    }
    throw std::invalid_argument("unknown cost kind");
}

CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target,
                       const CostSpec& spec) {
    spec.validate();
    source.validate();
    target.validate();
    if (source.dim() != target.dim()) throw std::invalid_argument("dimension mismatch");

    CostMatrix c(source.size(), target.size());
    for (std::size_t i = 0; i < source.size(); ++i)
        for (std::size_t j = 0; j < target.size(); ++j)
            c(i, j) = pair_cost(source.points[i], target.points[j], spec);
    return c;
}

double diameter(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& spec) {
    spec.validate();
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");

    std::vector<const Point*> pts;
    pts.reserve(a.size() + b.size());
    for (const auto& p : a.points) pts.push_back(&p);
    for (const auto& p : b.points) pts.push_back(&p);

    double m = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            m = std::max(m, pair_cost(*pts[i], *pts[j], spec));
    return m;
}

} // namespace otda
