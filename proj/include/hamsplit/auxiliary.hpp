#pragma once

// Auxiliary functions: for a normal v, a point f(v) whose hyperplane with
// normal v cuts off mass alpha on its positive side.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/measures.hpp"

namespace hamsplit {

inline constexpr double kDefaultLambdaTol = 1e-13;

/// Offsets achieving mass alpha for one normal: every lambda in
/// [lambda_min, lambda_max] gives mu(H+) = alpha; chosen is the midpoint.
struct LambdaSolution {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double chosen = 0.0;

    double width() const { return lambda_max - lambda_min; }
};

namespace detail {

inline void check_unit(const Vec& v, const char* what) {
    if (v.size() == 0 || !v.allFinite() || std::abs(v.norm() - 1.0) > kUnitTolerance) {
        throw DomainError(std::string(what) + ": normal is not a unit vector");
    }
}

inline void check_alpha(double alpha, const char* what) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError(std::string(what) + ": alpha outside [0, 1]");
}

/// The node-count mass is a step function of lambda, so the achieving
/// interval is read off the sorted projections: with K = alpha * count,
/// mass > alpha up to the (floor(K)+1)-th largest projection and
/// mass >= alpha up to the ceil(K)-th.
inline LambdaSolution cloud_quantile(const PolytopeCloud& cloud, const Vec& v, double alpha, double lo, double hi) {
    const Eigen::Index count = cloud.nodes.cols();
    std::vector<double> proj(static_cast<std::size_t>(count));
    Eigen::Map<Eigen::RowVectorXd>(proj.data(), count) = v.transpose() * cloud.nodes;
    const long double k = static_cast<long double>(alpha) * static_cast<long double>(count);
    auto nth = [&](long double j, double fallback_low, double fallback_high) {
        if (j < 1.0L) return fallback_high;
        if (j > static_cast<long double>(count)) return fallback_low;
        const auto it = proj.begin() + static_cast<std::ptrdiff_t>(j) - 1;
        std::nth_element(proj.begin(), it, proj.end(), std::greater<>());
        return *it;
    };
    double lower = nth(std::floor(k) + 1.0L, lo, hi);
    double upper = nth(std::ceil(k), lo, hi);
    if (alpha <= 0.0) upper = hi;
    if (alpha >= 1.0) lower = lo;
    if (upper < lower) upper = lower;
    return {lower, upper, 0.5 * (lower + upper)};
}

}  // namespace detail

/// Bisection on the nonincreasing map lambda -> mu(H+_{v,lambda}), bracketed
/// by the projection range of the support. Both ends of the achieving
/// interval are located to `tol` in lambda (or to floating-point resolution).
inline LambdaSolution solve_lambda(const Measure& m, const Vec& v, double alpha, double tol = kDefaultLambdaTol) {
    require_dimension(v.size(), m.dim(), "solve_lambda");
    detail::check_unit(v, "solve_lambda");
    detail::check_alpha(alpha, "solve_lambda");
    if (!(tol > 0.0)) throw DomainError("solve_lambda: tolerance must be positive");

    const auto [lo, hi] = detail::support_range(m, v);
    if (const auto* poly = std::get_if<UniformPolytope>(&m.model()); poly && poly->cloud) {
        return detail::cloud_quantile(*poly->cloud, v, alpha, lo, hi);
    }
    const long double target = alpha;
    auto mass = [&](double lambda) { return detail::halfspace_ld(m, Hyperplane(v, lambda)).value; };

    // Shrinks [x, y] around the switch of a monotone predicate (true at x).
    auto bisect = [&](double x, double y, auto&& pred) {
        while (y - x > tol) {
            const double mid = 0.5 * (x + y);
            if (mid <= x || mid >= y) break;
            if (pred(mid)) {
                x = mid;
            } else {
                y = mid;
            }
        }
        return std::make_pair(x, y);
    };
    auto above = [&](double lambda) { return mass(lambda) > target; };
    auto not_below = [&](double lambda) { return mass(lambda) >= target; };

    double lower = lo;
    double upper_left = lo;
    double upper_right = lo;
    if (alpha < 1.0) {
        const auto [x, y] = bisect(lo, hi, above);
        lower = 0.5 * (x + y);
        upper_left = x;
        upper_right = y;
    }
    double upper = hi;
    if (alpha > 0.0) {
        // the upper end is usually inside the same bracket
        if (!not_below(upper_right)) {
            const auto [x, y] = bisect(upper_left, upper_right, not_below);
            upper = 0.5 * (x + y);
        } else {
            const auto [x, y] = bisect(upper_right, hi, not_below);
            upper = 0.5 * (x + y);
        }
    }
    if (alpha >= 1.0) upper = std::max(upper, lower);
    if (upper < lower) upper = lower;
    return {lower, upper, 0.5 * (lower + upper)};
}

enum class AuxMode { interval_midpoint, central_sphere };

/// Which construction produced an auxiliary point: the hyperplane was slid to
/// touch S from the positive side (1), from the negative side (2), or it
/// already met S (3).
enum class AuxCase { positive_contains = 1, negative_contains = 2, meets = 3 };

struct AuxPoint {
    Vec point;
    double lambda = 0.0;
    AuxCase which = AuxCase::meets;
    bool fallback = false;  // central sphere: density vanished on the slice
};

/// Offset for normal v whose hyperplane achieves alpha and meets S.
inline std::pair<double, AuxCase> container_offset(const Measure& m, const ConvexSet& s, const Vec& v, double alpha,
                                                   double tol = kDefaultLambdaTol) {
    const LambdaSolution sol = solve_lambda(m, v, alpha, tol);
    const auto [smin, smax] = s.range(v);
    if (sol.chosen <= smin) return {smin, AuxCase::positive_contains};
    if (sol.chosen >= smax) return {smax, AuxCase::negative_contains};
    return {sol.chosen, AuxCase::meets};
}

/// Central sphere value c(v) in the plane: center of mass of the density on
/// the chord H_{v,lambda} inside S, or the chord midpoint when that density
/// integrates to (almost) zero.
inline AuxPoint central_sphere_point(const Measure& m, const ConvexSet& s, double alpha, const Vec& v,
                                     double tol = kDefaultLambdaTol) {
    if (m.dim() != 2 || s.dim() != 2) throw UnsupportedError("central_sphere_point: only planar measures are supported");
    detail::check_unit(v, "central_sphere_point");
    detail::check_alpha(alpha, "central_sphere_point");
    const auto [lambda, which] = container_offset(m, s, v, alpha, tol);
    const Vec base = lambda * v;
    Vec dir(2);
    dir << -v[1], v[0];
    const auto [t0, t1] = s.chord(base, dir);
    if (t0 > t1 + 1e-12) throw Error("central_sphere_point: hyperplane misses the container");
    const double a = std::min(t0, t1), b = std::max(t0, t1);
    const LineMoments mom = line_moments(m, base, dir, a, b);
    // threshold relative to the unit total mass
    if (mom.mass < 1e-10) return {base + 0.5 * (a + b) * dir, lambda, which, true};
    return {base + (mom.first / mom.mass) * dir, lambda, which, false};
}

/// f_i built from a measure, a ratio and a compact convex container S with
/// mu(S) >= max(alpha, 1 - alpha). Immutable; safe to query concurrently.
class AuxFunction {
public:
    AuxFunction(Measure m, double alpha, ConvexSet container, AuxMode mode = AuxMode::interval_midpoint,
                double tol = kDefaultLambdaTol)
        : measure_(std::move(m)), alpha_(alpha), container_(std::move(container)), mode_(mode), tol_(tol) {
        detail::check_alpha(alpha, "AuxFunction");
        require_dimension(container_.dim(), measure_.dim(), "AuxFunction");
        if (mode_ == AuxMode::central_sphere && measure_.dim() != 2) {
            throw UnsupportedError("AuxFunction: central spheres are planar only");
        }
        container_mass_ = container_.mass(measure_);
        const double need = std::max(alpha_, 1.0 - alpha_);
        if (container_mass_.value + container_mass_.error_bound + 1e-12 < need) {
            throw DomainError("AuxFunction: container mass " + std::to_string(container_mass_.value) +
                              " is below max(alpha, 1 - alpha) = " + std::to_string(need));
        }
        centroid_ = container_.centroid();
    }

    const Measure& measure() const { return measure_; }
    double alpha() const { return alpha_; }
    const ConvexSet& container() const { return container_; }
    AuxMode mode() const { return mode_; }
    const MassValue& container_mass() const { return container_mass_; }

    AuxPoint evaluate(const Vec& v) const {
        detail::check_unit(v, "aux_point");
        if (mode_ == AuxMode::central_sphere) return central_sphere_point(measure_, container_, alpha_, v, tol_);
        const auto [lambda, which] = container_offset(measure_, container_, v, alpha_, tol_);
        const Hyperplane h(v, lambda);
        Vec p;
        switch (which) {
            case AuxCase::positive_contains:
                p = container_.support_point(-v);
                break;
            case AuxCase::negative_contains:
                p = container_.support_point(v);
                break;
            case AuxCase::meets:
                p = container_.nearest_on_slice(h, centroid_);
                break;
        }
        return {std::move(p), lambda, which, false};
    }

    Vec operator()(const Vec& v) const { return evaluate(v).point; }

private:
    Measure measure_;
    double alpha_;
    ConvexSet container_;
    AuxMode mode_;
    double tol_;
    MassValue container_mass_;
    Vec centroid_;
};

inline Vec aux_point(const AuxFunction& f, const Vec& v) { return f(v); }

// ---------------------------------------------------------------------------
// Central sphere curves

struct CurveSample {
    std::vector<double> angles;
    std::vector<Vec> points;
    std::vector<bool> fallback;
};

inline CurveSample sample_central_sphere(const Measure& m, const ConvexSet& s, double alpha, std::size_t grid_size,
                                         double tol = kDefaultLambdaTol) {
    if (grid_size < 16) throw DomainError("sample_central_sphere: grid_size must be at least 16");
    CurveSample out;
    out.angles.reserve(grid_size);
    for (std::size_t j = 0; j < grid_size; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_size);
        Vec v(2);
        v << std::cos(angle), std::sin(angle);
        const AuxPoint p = central_sphere_point(m, s, alpha, v, tol);
        out.angles.push_back(angle);
        out.points.push_back(p.point);
        out.fallback.push_back(p.fallback);
    }
    return out;
}

class DegenerateCurveError : public Error {
public:
    using Error::Error;
};

/// Signed number of turns of the discrete tangent of the closed polyline
/// through the samples. Repeated consecutive points are dropped first.
inline int turning_number(const CurveSample& c, double rel_tol = 1e-9) {
    if (c.points.empty()) throw DegenerateCurveError("turning_number: empty curve");
    double scale = 0.0;
    for (const auto& p : c.points) scale = std::max(scale, (p - c.points.front()).norm());
    if (!(scale > rel_tol)) throw DegenerateCurveError("turning_number: curve collapses to a point");
    const double eps = rel_tol * scale;
    std::vector<Vec> pts;
    for (const auto& p : c.points) {
        if (pts.empty() || (p - pts.back()).norm() > eps) pts.push_back(p);
    }
    while (pts.size() > 1 && (pts.back() - pts.front()).norm() <= eps) pts.pop_back();
    if (pts.size() < 3) throw DegenerateCurveError("turning_number: fewer than three distinct points");
    const std::size_t n = pts.size();
    double total = 0.0;
    auto heading = [&](std::size_t i) {
        const Vec d = pts[(i + 1) % n] - pts[i];
        return std::atan2(d[1], d[0]);
    };
    double prev = heading(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double cur = heading(i);
        total += std::remainder(cur - prev, 2.0 * std::numbers::pi);
        prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

/// Orientation-free turning number (Whitney index up to the choice of
/// traversal direction).
inline int whitney_index(const CurveSample& c) { return std::abs(turning_number(c)); }

struct StableTurning {
    int turning = 0;
    std::size_t grid = 0;  // finest grid evaluated
};

/// Doubles the grid until two consecutive turning numbers agree.
inline StableTurning stable_turning_number(const Measure& m, const ConvexSet& s, double alpha, std::size_t grid = 360,
                                           int max_doublings = 5) {
    int previous = turning_number(sample_central_sphere(m, s, alpha, grid));
    for (int k = 0; k < max_doublings; ++k) {
        grid *= 2;
        const int current = turning_number(sample_central_sphere(m, s, alpha, grid));
        if (current == previous) return {current, grid};
        previous = current;
    }
    throw DegenerateCurveError("stable_turning_number: no agreement under grid refinement");
}

}  // namespace hamsplit
