#pragma once

// Dense simplex on the compact (Tucker) tableau for
//   maximize c.y  subject to  A y <= b,  y >= 0,  with b >= 0,
// so the origin is a feasible starting vertex. Dantzig pricing, with Bland's
// rule while pivots stay degenerate so that cycling cannot occur. Instances
// here have at most a few thousand rows and a dozen columns.

#include <cmath>
#include <vector>

#include "hamsplit/core.hpp"

namespace hamsplit::lp {

enum class Status { optimal, unbounded, iteration_limit, numerical };

struct Solution {
    Status status = Status::optimal;
    Vec y;
    double objective = 0.0;
};

inline Solution maximize(const Mat& a, const Vec& b, const Vec& c, double eps = 1e-12, int max_pivots = 100000) {
    const Eigen::Index m = a.rows();
    const Eigen::Index k = a.cols();
    if (b.size() != m || c.size() != k) throw DimensionError("lp::maximize: shape mismatch");
    if (m > 0 && b.minCoeff() < 0.0) throw DomainError("lp::maximize: right-hand side must be nonnegative");
    // pivots smaller than this amplify roundoff past what the callers tolerate
    const double pivot_tol = 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff());

    Mat t(m + 1, k + 1);
    t.topLeftCorner(m, k) = a;
    t.topRightCorner(m, 1) = b;
    t.bottomLeftCorner(1, k) = -c.transpose();
    t(m, k) = 0.0;
    std::vector<Eigen::Index> nonbasic(static_cast<std::size_t>(k)), basic(static_cast<std::size_t>(m));
    for (Eigen::Index j = 0; j < k; ++j) nonbasic[static_cast<std::size_t>(j)] = j;
    for (Eigen::Index i = 0; i < m; ++i) basic[static_cast<std::size_t>(i)] = k + i;
    auto label_of_basic = [&](Eigen::Index i) { return basic[static_cast<std::size_t>(i)]; };
    auto label_of_nonbasic = [&](Eigen::Index j) { return nonbasic[static_cast<std::size_t>(j)]; };

    Solution out;
    int pivots = 0;
    int degenerate = 0;
    while (true) {
        const bool bland = degenerate > 20;
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (t(m, j) >= -eps) continue;
            if (enter < 0 || (bland ? label_of_nonbasic(j) < label_of_nonbasic(enter) : t(m, j) < t(m, enter))) enter = j;
        }
        if (enter < 0) break;
        Eigen::Index leave = -1;
        double best = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double col = t(i, enter);
            if (col <= pivot_tol) continue;
            const double ratio = std::max(t(i, k), 0.0) / col;
            if (leave < 0 || ratio < best - 1e-13) {
                leave = i;
                best = ratio;
            } else if (ratio <= best + 1e-13) {
                const bool better = bland ? label_of_basic(i) < label_of_basic(leave) : col > t(leave, enter);
                if (better) {
                    leave = i;
                    best = std::min(best, ratio);
                }
            }
        }
        if (leave < 0) {
            out.status = Status::unbounded;
            break;
        }
        if (++pivots > max_pivots) {
            out.status = Status::iteration_limit;
            break;
        }
        degenerate = best <= 1e-13 ? degenerate + 1 : 0;
        const double p = t(leave, enter);
        const Eigen::RowVectorXd pivot_row = t.row(leave) / p;
        const Vec pivot_col = t.col(enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = pivot_col[i];
            if (f != 0.0) t.row(i) -= f * pivot_row;
            t(i, enter) = -f / p;
        }
        t.row(leave) = pivot_row;
        t(leave, enter) = 1.0 / p;
        for (Eigen::Index i = 0; i < m; ++i) t(i, k) = std::max(t(i, k), 0.0);
        std::swap(nonbasic[static_cast<std::size_t>(enter)], basic[static_cast<std::size_t>(leave)]);
    }
    out.y = Vec::Zero(k);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index label = basic[static_cast<std::size_t>(i)];
        if (label < k) out.y[label] = t(i, k);
    }
    out.objective = c.dot(out.y);
    if (out.status == Status::optimal && m > 0) {
        const double slack = 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());
        if ((a * out.y - b).maxCoeff() > slack) out.status = Status::numerical;
    }
    return out;
}

/// Whether A y = b has a solution y >= 0 (b >= 0): maximizes the row sum of
/// A y under A y <= b; equality holds everywhere iff the optimum reaches sum(b).
inline bool equality_feasible(const Mat& a, const Vec& b, double rel_tol = 1e-9) {
    const Vec c = a.colwise().sum().transpose();
    const Solution s = maximize(a, b, c);
    if (s.status != Status::optimal) return false;
    return s.objective >= b.sum() - rel_tol * std::max(1.0, b.sum());
}

}  // namespace hamsplit::lp
