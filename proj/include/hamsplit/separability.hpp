#pragma once

// Strict separability of sets S_1..S_n in R^n by hyperplanes: for every sign
// pattern sigma there must be a hyperplane with S_i in the open side
// sigma(i). Sets are finite point sets (vertices or covering samples); each
// pattern is a small linear program.

#include <optional>
#include <string>
#include <vector>

#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/lp.hpp"

namespace hamsplit {

/// Partial map index -> {-1, +1}; 0 marks an unassigned index.
struct SignPattern {
    std::vector<int> signs;

    bool total() const {
        return std::all_of(signs.begin(), signs.end(), [](int s) { return s == 1 || s == -1; });
    }
    SignPattern negated() const {
        SignPattern out = *this;
        for (int& s : out.signs) s = -s;
        return out;
    }
    std::string str() const {
        std::string out;
        for (int s : signs) out += s > 0 ? '+' : (s < 0 ? '-' : '.');
        return out;
    }
    bool operator==(const SignPattern&) const = default;
};

struct Witness {
    SignPattern pattern;
    Hyperplane hyperplane;
    double margin = 0.0;  // achieved Euclidean margin
};

struct SeparabilityReport {
    bool separable = false;
    double margin = 0.0;  // required margin
    std::vector<Witness> witnesses;
    std::optional<SignPattern> failing_pattern;
};

namespace detail {

inline void check_sets(const std::vector<PointSet>& sets, const char* what) {
    if (sets.empty()) throw DomainError(std::string(what) + ": empty set list");
    const auto n = sets.front().empty() ? 0 : sets.front().front().size();
    for (const auto& s : sets) {
        if (s.empty()) throw DomainError(std::string(what) + ": empty point set");
        for (const auto& p : s) {
            require_dimension(p.size(), n, what);
            if (!p.allFinite()) throw DomainError(std::string(what) + ": non-finite point");
        }
    }
}

inline std::pair<Vec, double> normalization(const std::vector<PointSet>& sets) {
    const auto n = sets.front().front().size();
    Vec lo = sets.front().front(), hi = lo;
    for (const auto& s : sets) {
        for (const auto& p : s) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    }
    const Vec center = 0.5 * (lo + hi);
    double scale = 0.0;
    for (const auto& s : sets) {
        for (const auto& p : s) scale = std::max(scale, (p - center).norm());
    }
    if (!(scale > 0.0)) scale = 1.0;
    (void)n;
    return {center, scale};
}

}  // namespace detail

/// Instance diameter times 1e-7.
inline double default_margin(const std::vector<PointSet>& sets) {
    detail::check_sets(sets, "default_margin");
    return 2e-7 * detail::normalization(sets).second;
}

/// Hyperplane (unit normal v, offset lambda) with
/// sigma(i) (<v, x> - lambda) >= margin for every x in S_i, or nothing.
/// Maximizes the margin under |w|_inf <= 1, which is within a factor sqrt(n)
/// of the Euclidean optimum.
inline std::optional<Witness> separating_hyperplane(const std::vector<PointSet>& sets, const SignPattern& sigma,
                                                    double margin) {
    detail::check_sets(sets, "separating_hyperplane");
    if (sigma.signs.size() != sets.size() || !sigma.total()) {
        throw DomainError("separating_hyperplane: sign pattern must be total on the set list");
    }
    if (!(margin > 0.0)) throw DomainError("separating_hyperplane: margin must be positive");
    const auto n = sets.front().front().size();
    const auto [center, scale] = detail::normalization(sets);

    // all sets on one side: the LP would return w = 0, so place a plane past them
    if (std::all_of(sigma.signs.begin(), sigma.signs.end(), [&](int s) { return s == sigma.signs.front(); })) {
        const int s = sigma.signs.front();
        const Vec v = Vec::Unit(n, 0);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& set : sets) {
            for (const auto& p : set) {
                lo = std::min(lo, p[0]);
                hi = std::max(hi, p[0]);
            }
        }
        const double gap = std::max(scale, 2.0 * margin);
        const Hyperplane h(v, s > 0 ? lo - gap : hi + gap);
        return Witness{sigma, h, gap};
    }

    std::size_t rows = 0;
    for (const auto& s : sets) rows += s.size();
    // variables: w+ (n), w- (n), b+, b-, t
    const Eigen::Index k = 2 * n + 3;
    const Eigen::Index m = static_cast<Eigen::Index>(rows) + 2 * n + 3;
    Mat a = Mat::Zero(m, k);
    Vec b = Vec::Zero(m);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const double s = sigma.signs[i];
        for (const auto& p : sets[i]) {
            const Vec x = (p - center) / scale;
            a.block(r, 0, 1, n) = -s * x.transpose();
            a.block(r, n, 1, n) = s * x.transpose();
            a(r, 2 * n) = s;
            a(r, 2 * n + 1) = -s;
            a(r, 2 * n + 2) = 1.0;
            ++r;
        }
    }
    for (Eigen::Index j = 0; j < 2 * n; ++j, ++r) {
        a(r, j) = 1.0;
        b[r] = 1.0;
    }
    const double bound = static_cast<double>(n) + 1.0;
    a(r, 2 * n) = 1.0;
    b[r++] = bound;
    a(r, 2 * n + 1) = 1.0;
    b[r++] = bound;
    a(r, 2 * n + 2) = 1.0;
    b[r++] = 1.0;
    Vec c = Vec::Zero(k);
    c[2 * n + 2] = 1.0;

    const lp::Solution sol = lp::maximize(a, b, c);
    if (sol.status != lp::Status::optimal) return std::nullopt;
    const Vec w = sol.y.head(n) - sol.y.segment(n, n);
    const double offset = sol.y[2 * n] - sol.y[2 * n + 1];
    const double len = w.norm();
    if (!(len > 0.0) || !(sol.y[2 * n + 2] > 0.0)) return std::nullopt;
    const Vec v = w / len;
    const double lambda = offset / len * scale + v.dot(center);
    const Hyperplane h = Hyperplane::normalized(v, lambda);
    // recompute the margin on the original coordinates
    double achieved = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (const auto& p : sets[i]) achieved = std::min(achieved, sigma.signs[i] * h.signed_distance(p));
    }
    if (!(achieved >= margin)) return std::nullopt;
    return Witness{sigma, h, achieved};
}

/// Runs the 2^(n-1) patterns with sigma(1) = +1 in binary order (bit j of the
/// counter set means sigma(j+2) = -1). Requires as many sets as dimensions.
inline SeparabilityReport check_separable(const std::vector<PointSet>& sets, double margin = 0.0) {
    detail::check_sets(sets, "check_separable");
    const auto n = sets.front().front().size();
    if (static_cast<std::size_t>(n) != sets.size()) {
        throw UnsupportedError("check_separable: count != dimension (" + std::to_string(sets.size()) + " sets in R^" +
                               std::to_string(n) + ")");
    }
    if (margin <= 0.0) margin = default_margin(sets);
    SeparabilityReport report;
    report.margin = margin;
    report.separable = true;
    const std::size_t patterns = std::size_t{1} << (sets.size() - 1);
    for (std::size_t code = 0; code < patterns; ++code) {
        SignPattern sigma{std::vector<int>(sets.size(), 1)};
        for (std::size_t j = 1; j < sets.size(); ++j) {
            if ((code >> (j - 1)) & 1U) sigma.signs[j] = -1;
        }
        if (auto w = separating_hyperplane(sets, sigma, margin)) {
            report.witnesses.push_back(std::move(*w));
        } else {
            report.separable = false;
            if (!report.failing_pattern) report.failing_pattern = sigma;
        }
    }
    return report;
}

/// Whether p lies in conv(points), as an LP feasibility question.
inline bool in_convex_hull(const Vec& p, const PointSet& points, double rel_tol = 1e-9) {
    const auto n = p.size();
    const Eigen::Index k = static_cast<Eigen::Index>(points.size());
    // rows: sum(l) = 1; sum(l (x_j + shift)) = p_j + shift with shift making everything positive
    double shift = 1.0;
    for (const auto& q : points) shift = std::max(shift, 1.0 - q.minCoeff());
    shift = std::max(shift, 1.0 - p.minCoeff());
    Mat a(n + 1, k);
    Vec b(n + 1);
    for (Eigen::Index j = 0; j < k; ++j) {
        a(0, j) = 1.0;
        a.block(1, j, n, 1) = points[static_cast<std::size_t>(j)] + Vec::Constant(n, shift);
    }
    b[0] = 1.0;
    b.tail(n) = p + Vec::Constant(n, shift);
    return lp::equality_feasible(a, b, rel_tol);
}

/// Points of the set that are not convex combinations of the others.
inline PointSet hull_vertices(const PointSet& points) {
    PointSet out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        PointSet others;
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (j == i) continue;
            // keep one copy of duplicates
            if ((points[j] - points[i]).norm() == 0.0 && j > i) continue;
            others.push_back(points[j]);
        }
        bool duplicate_earlier = false;
        for (std::size_t j = 0; j < i; ++j) duplicate_earlier |= (points[j] - points[i]).norm() == 0.0;
        if (duplicate_earlier) continue;
        if (others.empty() || !in_convex_hull(points[i], others)) out.push_back(points[i]);
    }
    return out;
}

/// Planar sets only: conv(a) and conv(b) are disjoint iff no common convex
/// combination exists.
inline bool hulls_disjoint(const PointSet& a, const PointSet& b) {
    detail::check_sets({a, b}, "hulls_disjoint");
    if (a.front().size() != 2) throw UnsupportedError("hulls_disjoint: only planar sets are supported");
    const Eigen::Index ka = static_cast<Eigen::Index>(a.size());
    const Eigen::Index kb = static_cast<Eigen::Index>(b.size());
    double shift = 1.0;
    for (const auto& p : a) shift = std::max(shift, std::abs(p.minCoeff()) + std::abs(p.maxCoeff()) + 1.0);
    for (const auto& p : b) shift = std::max(shift, std::abs(p.minCoeff()) + std::abs(p.maxCoeff()) + 1.0);
    // rows: sum(l) = 1, sum(m) = 1, sum(l a_j) + sum(m (K - b_j)) = K for j = x, y
    Mat mat = Mat::Zero(4, ka + kb);
    Vec rhs(4);
    for (Eigen::Index i = 0; i < ka; ++i) {
        mat(0, i) = 1.0;
        mat(2, i) = a[static_cast<std::size_t>(i)][0] + shift;
        mat(3, i) = a[static_cast<std::size_t>(i)][1] + shift;
    }
    for (Eigen::Index i = 0; i < kb; ++i) {
        mat(1, ka + i) = 1.0;
        mat(2, ka + i) = 2.0 * shift - (b[static_cast<std::size_t>(i)][0] + shift);
        mat(3, ka + i) = 2.0 * shift - (b[static_cast<std::size_t>(i)][1] + shift);
    }
    rhs << 1.0, 1.0, 2.0 * shift, 2.0 * shift;
    return !lp::equality_feasible(mat, rhs);
}

/// Affine independence of n points in R^n: the n-1 differences to the first
/// point have rank n-1 (relative singular value threshold).
inline bool in_general_position(const PointSet& points, double tol = 1e-9) {
    if (points.empty()) return false;
    const auto n = points.front().size();
    if (points.size() == 1) return true;
    Mat diffs(static_cast<Eigen::Index>(points.size()) - 1, n);
    for (std::size_t i = 1; i < points.size(); ++i) diffs.row(static_cast<Eigen::Index>(i) - 1) = (points[i] - points[0]).transpose();
    Eigen::JacobiSVD<Mat> svd(diffs);
    const Vec sv = svd.singularValues();
    const double scale = std::max(sv.maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] <= tol * scale) return false;
    }
    return sv.size() == static_cast<Eigen::Index>(points.size()) - 1;
}

/// Vertices of a polytope, or covering points of a ball.
inline PointSet separator_points(const ConvexSet& s) {
    if (s.is_ball()) return covering_points(Measure::uniform_ball(s.as_ball().center, s.as_ball().radius));
    return s.vertices();
}

/// Point sets of the supports of several measures, as used by the separator
/// checks.
inline std::vector<PointSet> support_point_sets(const std::vector<Measure>& measures, std::size_t refinement = 0) {
    std::vector<PointSet> out;
    for (const auto& m : measures) out.push_back(covering_points(m, refinement));
    return out;
}

}  // namespace hamsplit
