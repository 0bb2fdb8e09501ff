#pragma once

#include <optional>
#include <string>

#include "otda/matrix.hpp"
#include "otda/measures.hpp"

namespace otda {

enum class CostKind { euclidean, sq_euclidean, kernel_induced };

CostKind cost_kind_from_string(const std::string& name);
std::string to_string(CostKind kind);

// Gaussian kernel k(x,y) = exp(-||x-y||^2 / (2 sigma^2)); values in (0,1].
struct GaussianKernel {
    double sigma = 1.0;
};

struct CostSpec {
    CostKind kind = CostKind::euclidean;
    std::optional<GaussianKernel> kernel; // required for kernel_induced
    double kernel_bound = 1.0;            // K with 0 <= k(x,y) <= K

    void validate() const;
};

using CostMatrix = Matrix;

double pair_cost(const Point& x, const Point& y, const CostSpec& spec);

// C[i][j] = c(source_i, target_j). euclidean: ||x-y||, sq_euclidean: ||x-y||^2,
// kernel_induced: sqrt(k(x,x) - 2 k(x,y) + k(y,y)), the RKHS feature-map
// distance.
CostMatrix cost_matrix(const DiscreteMeasure& source, const DiscreteMeasure& target,
                       const CostSpec& spec);

// Maximum pairwise cost over the union of both supports.
double diameter(const DiscreteMeasure& a, const DiscreteMeasure& b, const CostSpec& spec);

} // namespace otda
