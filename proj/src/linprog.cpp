#include "otda/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otda/errors.hpp"

namespace otda::lp {

namespace {

class Tableau {
public:
    Tableau(const Problem& p) : m_(p.equalities.size()), n_(p.num_vars) {
        if (p.objective.size() != p.num_vars)
            throw std::invalid_argument("objective size does not match num_vars");
        width_ = n_ + m_ + 1; // structural vars, artificials, rhs
        t_.assign(m_ * width_, 0.0);
        basis_.resize(m_);

        double scale = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const auto& row = p.equalities[r];
            const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
            for (const auto& [v, coef] : row.terms) {
                if (v >= n_) throw std::invalid_argument("constraint references unknown variable");
                at(r, v) += sign * coef;
                scale = std::max(scale, std::abs(coef));
            }
            at(r, n_ + r) = 1.0;
            rhs(r) = sign * row.rhs;
            scale = std::max(scale, std::abs(row.rhs));
            basis_[r] = n_ + r;
        }
        tol_ = 1e-11 * scale;
    }

    void run_phase1() {
        // cost row: minimize the sum of artificials
        std::vector<double> cost(width_, 0.0);
        for (std::size_t r = 0; r < m_; ++r) cost[n_ + r] = 1.0;
        price_out(cost);
        optimize(cost);

        double infeas = 0.0;
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] >= n_ && basis_[r] != kBlankRow) infeas += std::abs(rhs(r));
        if (infeas > 1e-7) throw NumericalError("linear program is infeasible");

        // pivot remaining zero-level artificials out of the basis; a rank-
        // carrying row has O(1) entries while a redundant one is roundoff, so
        // pivot on the largest element and blank rows below a hard threshold
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < n_ || basis_[r] == kBlankRow) continue;
            std::size_t col = n_;
            double best = 1e-7;
            for (std::size_t c = 0; c < n_; ++c)
                if (std::abs(at(r, c)) > best) {
                    best = std::abs(at(r, c));
                    col = c;
                }
            if (col == n_) {
                for (std::size_t c = 0; c < width_; ++c) at(r, c) = 0.0;
                basis_[r] = kBlankRow;
                continue;
            }
            pivot(r, col);
        }
    }

    void run_phase2(const std::vector<double>& objective) {
        std::vector<double> cost(width_, 0.0);
        std::copy(objective.begin(), objective.end(), cost.begin());
        price_out(cost);
        optimize(cost);
    }

    Solution extract(const std::vector<double>& objective) const {
        Solution s;
        s.x.assign(n_, 0.0);
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] < n_ && basis_[r] != kBlankRow) s.x[basis_[r]] = rhs(r);
        for (double& v : s.x)
            if (v < 0.0) v = 0.0; // clamp pivot dust
        s.objective = 0.0;
        for (std::size_t v = 0; v < n_; ++v) s.objective += objective[v] * s.x[v];
        s.pivots = pivots_;
        return s;
    }

private:
    static constexpr std::size_t kBlankRow = static_cast<std::size_t>(-1);
    std::size_t m_, n_, width_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
    double tol_ = 1e-11;
    std::int64_t pivots_ = 0;

    double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
    double& rhs(std::size_t r) { return t_[r * width_ + width_ - 1]; }
    double rhs(std::size_t r) const { return t_[r * width_ + width_ - 1]; }

    // make the cost row consistent with the current basis
    void price_out(std::vector<double>& cost) const {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] == kBlankRow) continue;
            const double cb = cost[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c < width_; ++c) cost[c] -= cb * at(r, c);
        }
    }

    // Entries of these tableaus are O(1) (transportation bases are
    // unimodular); anything at roundoff scale is dust and must never be
    // chosen as a pivot element, or it amplifies into the basis.
    static constexpr double kSnap = 1e-11;
    static constexpr double kMinPivot = 1e-7;

    void pivot(std::size_t row, std::size_t col) {
        const double piv = at(row, col);
        const double inv = 1.0 / piv;
        for (std::size_t c = 0; c < width_; ++c) {
            double& v = at(row, c);
            v *= inv;
            if (std::abs(v) < kSnap) v = 0.0;
        }
        at(row, col) = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == row) continue;
            const double f = at(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width_; ++c) {
                double& v = at(r, c);
                v -= f * at(row, c);
                if (std::abs(v) < kSnap) v = 0.0;
            }
            at(r, col) = 0.0;
        }
        basis_[row] = col;
        ++pivots_;
    }

    void optimize(std::vector<double>& cost) {
        // artificial columns never re-enter the basis
        const std::size_t scan_limit = n_;
        const std::int64_t pivot_limit = 20000 + 50 * static_cast<std::int64_t>(m_ + n_);
        std::int64_t since_progress = 0;
        bool bland = false;
        double last_obj = std::numeric_limits<double>::infinity();

        for (std::int64_t iter = 0;; ++iter) {
            if (iter > pivot_limit) throw NumericalError("simplex exceeded pivot limit");

            std::size_t col = scan_limit;
            if (!bland) {
                double best = -tol_;
                for (std::size_t c = 0; c < scan_limit; ++c)
                    if (cost[c] < best) {
                        best = cost[c];
                        col = c;
                    }
            } else {
                for (std::size_t c = 0; c < scan_limit; ++c)
                    if (cost[c] < -tol_) {
                        col = c;
                        break;
                    }
            }
            if (col == scan_limit) return; // optimal

            // min-ratio rule; ties go to the largest pivot element, which
            // keeps the elimination stable under degeneracy
            std::size_t row = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = at(r, col);
                if (a <= kMinPivot) continue;
                const double ratio = std::max(rhs(r), 0.0) / a;
                const bool tie = row < m_ && ratio <= best_ratio + 1e-12 &&
                                 ratio >= best_ratio - 1e-12;
                if (ratio < best_ratio - 1e-12 || (tie && a > at(row, col))) {
                    best_ratio = ratio;
                    row = r;
                }
            }
            if (row == m_) throw NumericalError("linear program is unbounded");

            const double cb = cost[col];
            pivot(row, col);
            for (std::size_t c = 0; c < width_; ++c) cost[c] -= cb * at(row, c);
            cost[col] = 0.0;

            const double obj = -cost[width_ - 1];
            if (obj < last_obj - tol_) {
                since_progress = 0;
                last_obj = obj;
            } else if (++since_progress > 200 + static_cast<std::int64_t>(m_)) {
                bland = true;
            }
        }
    }
};

} // namespace

Solution solve(const Problem& problem) {
    Tableau tab(problem);
    tab.run_phase1();
    tab.run_phase2(problem.objective);
    return tab.extract(problem.objective);
}

} // namespace otda::lp
