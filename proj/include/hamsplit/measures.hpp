#pragma once

// Continuous probability measures on R^n with bounded support, and their
// half-space masses.
//
// Radially symmetric models (uniform ball, smooth cap, the bump kernels of a
// kernel cloud) are evaluated in closed form through the regularized
// incomplete beta function. Planar polygons are clipped exactly. Polytopes in
// dimension >= 3 use a fixed Halton node set inside their bounding box.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "hamsplit/core.hpp"
#include "hamsplit/geometry2d.hpp"
#include "hamsplit/numerics.hpp"

namespace hamsplit {

inline constexpr int kMaxCapExponent = 12;
inline constexpr std::size_t kDefaultPolytopeNodes = std::size_t{1} << 20;

namespace detail {

/// Density proportional to (1 - |x - center|^2 / radius^2)^exponent on the
/// ball, normalized to total mass one. exponent = 0 is the uniform ball.
struct Radial {
    Vec center;
    double radius = 1.0;
    int exponent = 0;

    std::ptrdiff_t dim() const { return center.size(); }

    double profile_exponent() const { return exponent + 0.5 * static_cast<double>(dim() - 1); }

    double normalizer() const {
        return 1.0 / (std::pow(radius, static_cast<double>(dim())) *
                      numerics::unit_profile_integral(static_cast<int>(dim()), exponent));
    }

    long double halfspace(const Hyperplane& h) const {
        const long double t = (static_cast<long double>(h.offset()) - center.dot(h.normal())) / radius;
        return numerics::cap_fraction(t, profile_exponent());
    }

    double density(const Vec& x) const {
        const double rho2 = (x - center).squaredNorm() / (radius * radius);
        if (rho2 > 1.0) return 0.0;
        return normalizer() * std::pow(1.0 - rho2, exponent);
    }

    /// Exact mass of a convex planar polygon (counter-clockwise) via the flux of
    /// a radial field whose divergence is the density.
    double polygon_mass(const geometry2d::Polygon& poly) const {
        using geometry2d::cross;
        using geometry2d::Point;
        if (poly.size() < 3) return 0.0;
        const Point c(center[0], center[1]);
        const int k = exponent;
        // G(u) = sum_{j<=k} (1-u)^j / (2 pi), u = rho^2 in unit coordinates.
        auto g = [k](double u) {
            double s = 0.0;
            double term = 1.0;
            for (int j = 0; j <= k; ++j) {
                s += term;
                term *= (1.0 - u);
            }
            return s / (2.0 * std::numbers::pi);
        };
        auto angle = [](const Point& a, const Point& b) { return std::atan2(cross(a, b), a.dot(b)); };
        double total = 0.0;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point a = (poly[i] - c) / radius;
            const Point b = (poly[(i + 1) % n] - c) / radius;
            const Point d = b - a;
            const double dd = d.squaredNorm();
            if (dd <= 0.0) continue;
            // |a + t d|^2 = 1
            const double bq = a.dot(d);
            const double cq = a.squaredNorm() - 1.0;
            const double disc = bq * bq - dd * cq;
            double lo = 1.0, hi = 0.0;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                lo = std::max(0.0, (-bq - sq) / dd);
                hi = std::min(1.0, (-bq + sq) / dd);
            }
            if (lo < hi) {
                const double cr = cross(a, d);
                auto f = [&](double t) { return g((a + t * d).squaredNorm()); };
                total += cr * boost::math::quadrature::gauss<double, 16>::integrate(f, lo, hi);
                const Point pin = a + lo * d;
                const Point pout = a + hi * d;
                if (lo > 0.0) total += angle(a, pin) / (2.0 * std::numbers::pi);
                if (hi < 1.0) total += angle(pout, b) / (2.0 * std::numbers::pi);
            } else {
                total += angle(a, b) / (2.0 * std::numbers::pi);
            }
        }
        return std::clamp(total, 0.0, 1.0);
    }

    template <class Rng>
    Vec sample(Rng& rng) const {
        const std::ptrdiff_t n = dim();
        std::normal_distribution<double> normal;
        Vec dir(n);
        double len = 0.0;
        do {
            for (std::ptrdiff_t j = 0; j < n; ++j) dir[j] = normal(rng);
            len = dir.norm();
        } while (len == 0.0);
        // rho^2 ~ Beta(n/2, exponent + 1)
        std::gamma_distribution<double> ga(0.5 * static_cast<double>(n), 1.0);
        std::gamma_distribution<double> gb(exponent + 1.0, 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        const double rho = std::sqrt(x / (x + y));
        return center + dir * (radius * rho / len);
    }

    /// Line parameters where p + t d crosses the sphere.
    void chord_breaks(const Vec& p, const Vec& d, std::vector<double>& out) const {
        const Vec q = p - center;
        const double a = d.squaredNorm();
        const double b = q.dot(d);
        const double c = q.squaredNorm() - radius * radius;
        const double disc = b * b - a * c;
        if (disc <= 0.0 || a == 0.0) return;
        const double sq = std::sqrt(disc);
        out.push_back((-b - sq) / a);
        out.push_back((-b + sq) / a);
    }
};

/// Uniform polytope in dimension >= 3: facets for membership, plus the Halton
/// nodes of the bounding box that fall inside.
struct PolytopeCloud {
    std::vector<Vec> facet_normals;
    std::vector<double> facet_offsets;
    Mat nodes;  // n x count
    double volume = 0.0;
    Vec centroid;

    bool contains(const Vec& x, double slack = 1e-12) const {
        for (std::size_t f = 0; f < facet_normals.size(); ++f) {
            if (x.dot(facet_normals[f]) > facet_offsets[f] + slack) return false;
        }
        return true;
    }
};

/// Facets {x : <x, a> <= b} of conv(vertices) by enumerating n-subsets.
inline void enumerate_facets(const std::vector<Vec>& vertices, std::vector<Vec>& normals,
                             std::vector<double>& offsets) {
    const std::ptrdiff_t n = vertices.front().size();
    const std::size_t m = vertices.size();
    double scale = 0.0;
    for (const auto& v : vertices) scale = std::max(scale, (v - vertices.front()).norm());
    const double tol = 1e-10 * std::max(scale, 1.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (m < static_cast<std::size_t>(n) + 1) throw DomainError("polytope: too few vertices");
    while (true) {
        Mat diffs(n - 1, n);
        for (std::ptrdiff_t r = 1; r < n; ++r) {
            diffs.row(r - 1) = (vertices[idx[static_cast<std::size_t>(r)]] - vertices[idx[0]]).transpose();
        }
        Eigen::FullPivLU<Mat> lu(diffs);
        lu.setThreshold(1e-10);
        if (lu.rank() == n - 1) {
            Vec a = lu.kernel().col(0);
            a.normalize();
            double b = a.dot(vertices[idx[0]]);
            int above = 0, below = 0;
            for (const auto& v : vertices) {
                const double s = v.dot(a) - b;
                if (s > tol) ++above;
                if (s < -tol) ++below;
            }
            if (above == 0 || below == 0) {
                if (above > 0) {
                    a = -a;
                    b = -b;
                }
                bool duplicate = false;
                for (std::size_t f = 0; f < normals.size(); ++f) {
                    if ((normals[f] - a).norm() < 1e-9 && std::abs(offsets[f] - b) < tol) duplicate = true;
                }
                if (!duplicate && (above + below) > 0) {
                    normals.push_back(a);
                    offsets.push_back(b);
                }
            }
        }
        // next combination
        std::ptrdiff_t i = n - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - static_cast<std::size_t>(n) + static_cast<std::size_t>(i)) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (std::ptrdiff_t j = i + 1; j < n; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    if (normals.size() < static_cast<std::size_t>(n) + 1) throw DomainError("polytope: vertices are not full-dimensional");
}

}  // namespace detail

class Measure;

struct UniformBall {
    Vec center;
    double radius = 1.0;
};

struct UniformPolytope {
    std::vector<Vec> vertices;
    std::size_t quadrature_nodes = kDefaultPolytopeNodes;
    // derived
    geometry2d::Polygon hull;  // planar case, counter-clockwise
    double area = 0.0;
    std::shared_ptr<const detail::PolytopeCloud> cloud;  // dimension >= 3
};

struct SmoothCap {
    Vec center;
    double radius = 1.0;
    int exponent = 2;
};

struct Mixture {
    std::vector<double> weights;
    std::vector<Measure> parts;
};

struct KernelCloud {
    std::vector<Vec> points;
    double bandwidth = 1.0;
    int exponent = 2;
};

/// The base measure restricted to the positive side of a half-space and
/// renormalized.
struct Restricted {
    std::shared_ptr<const Measure> base;
    Hyperplane halfspace;
    double base_mass = 1.0;
};

/// An immutable continuous probability measure. Copies share cached data.
class Measure {
public:
    using Model = std::variant<UniformBall, UniformPolytope, SmoothCap, Mixture, KernelCloud, Restricted>;

    static Measure uniform_ball(Vec center, double radius) {
        check_center_radius(center, radius, "uniform_ball");
        return Measure(UniformBall{std::move(center), radius});
    }

    static Measure smooth_cap(Vec center, double radius, int exponent = 2) {
        check_center_radius(center, radius, "smooth_cap");
        if (exponent < 0 || exponent > kMaxCapExponent) throw DomainError("smooth_cap: exponent out of range [0, 12]");
        return Measure(SmoothCap{std::move(center), radius, exponent});
    }

    static Measure uniform_polytope(std::vector<Vec> vertices, std::size_t quadrature_nodes = kDefaultPolytopeNodes);

    static Measure mixture(std::vector<double> weights, std::vector<Measure> parts);

    static Measure kernel_cloud(std::vector<Vec> points, double bandwidth, int exponent = 2) {
        if (points.empty()) throw DomainError("kernel_cloud: no points");
        if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("kernel_cloud: bandwidth must be positive");
        if (exponent < 0 || exponent > kMaxCapExponent) throw DomainError("kernel_cloud: exponent out of range [0, 12]");
        const auto n = points.front().size();
        for (const auto& p : points) {
            require_dimension(p.size(), n, "kernel_cloud");
            if (!p.allFinite()) throw DomainError("kernel_cloud: non-finite point");
        }
        return Measure(KernelCloud{std::move(points), bandwidth, exponent});
    }

    /// Conditional measure on H+ of `halfspace`; requires positive mass there.
    static Measure restricted(const Measure& base, const Hyperplane& halfspace);

    const Model& model() const { return model_; }
    std::ptrdiff_t dim() const { return dim_; }

    /// True when half-space masses come from closed-form expressions rather
    /// than node counting.
    bool analytic() const;

    /// Applies x -> rotation * x + shift to the measure.
    Measure transformed(const Mat& rotation, const Vec& shift) const;

private:
    explicit Measure(Model model);

    static void check_center_radius(const Vec& center, double radius, const char* what) {
        if (center.size() == 0 || !center.allFinite()) throw DomainError(std::string(what) + ": bad center");
        if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError(std::string(what) + ": radius must be positive");
    }

    Model model_;
    std::ptrdiff_t dim_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

MassValue mass_halfspace(const Measure& m, const Hyperplane& h);
double density_at(const Measure& m, const Vec& x);
Ball bounding_ball(const Measure& m);

namespace detail {

struct MassLD {
    long double value = 0.0L;
    double error = 0.0;
};

MassLD halfspace_ld(const Measure& m, const Hyperplane& h);
MassLD region_ld(const Measure& m, std::span<const Hyperplane> halfspaces);

inline Radial as_radial(const UniformBall& b) { return Radial{b.center, b.radius, 0}; }
inline Radial as_radial(const SmoothCap& c) { return Radial{c.center, c.radius, c.exponent}; }

inline double rounding_bound(long double value) {
    return 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, static_cast<double>(std::fabs(value)));
}

/// Projection range of the support in direction v; exact where cheap,
/// otherwise the bounding ball's range.
std::pair<double, double> support_range(const Measure& m, const Vec& v);

inline geometry2d::Polygon clip_box(const Ball& ball, std::span<const Hyperplane> halfspaces) {
    geometry2d::Polygon poly = geometry2d::square(geometry2d::to_point(ball.center), 2.0 * ball.radius + 1.0);
    for (const auto& h : halfspaces) {
        poly = geometry2d::clip(poly, h);
        if (poly.size() < 3) return {};
    }
    return poly;
}

/// Density-weighted Halton quadrature over the bounding box, for region masses
/// that have no closed form.
inline MassLD qmc_region(const Measure& m, std::span<const Hyperplane> halfspaces, std::size_t nodes = std::size_t{1} << 17) {
    const Ball ball = bounding_ball(m);
    const std::ptrdiff_t n = m.dim();
    long double total = 0.0L, inside = 0.0L;
    std::size_t hits = 0, support_hits = 0;
    for (std::size_t i = 1; i <= nodes; ++i) {
        Vec x = ball.center + ball.radius * (2.0 * numerics::halton(i, n) - Vec::Ones(n));
        const double w = density_at(m, x);
        if (w <= 0.0) continue;
        ++support_hits;
        total += w;
        bool in = true;
        for (const auto& h : halfspaces) {
            if (!h.contains_positive(x)) {
                in = false;
                break;
            }
        }
        if (in) {
            inside += w;
            ++hits;
        }
    }
    if (total <= 0.0L) return {0.0L, 1.0};
    const long double p = inside / total;
    const double ps = static_cast<double>(p);
    const double neff = static_cast<double>(std::max<std::size_t>(support_hits, 1));
    return {p, 3.0 * std::sqrt((ps * (1.0 - ps) + 1.0 / neff) / neff)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Construction

inline Measure::Measure(Model model) : model_(std::move(model)) {
    dim_ = std::visit(
        [](const auto& x) -> std::ptrdiff_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                return x.center.size();
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                return x.vertices.front().size();
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return x.parts.front().dim();
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                return x.points.front().size();
            } else {
                return x.base->dim();
            }
        },
        model_);
}

inline Measure Measure::uniform_polytope(std::vector<Vec> vertices, std::size_t quadrature_nodes) {
    if (vertices.empty()) throw DomainError("uniform_polytope: no vertices");
    const auto n = vertices.front().size();
    for (const auto& v : vertices) {
        require_dimension(v.size(), n, "uniform_polytope");
        if (!v.allFinite()) throw DomainError("uniform_polytope: non-finite vertex");
    }
    if (quadrature_nodes < 1024) throw DomainError("uniform_polytope: quadrature budget below 1024 nodes");
    UniformPolytope p{std::move(vertices), quadrature_nodes, {}, 0.0, nullptr};
    if (n == 1) {
        double lo = p.vertices.front()[0], hi = lo;
        for (const auto& v : p.vertices) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        if (!(hi > lo)) throw DomainError("uniform_polytope: degenerate interval");
    } else if (n == 2) {
        geometry2d::Polygon pts;
        for (const auto& v : p.vertices) pts.push_back(geometry2d::to_point(v));
        p.hull = geometry2d::convex_hull(std::move(pts));
        if (p.hull.size() < 3) throw DomainError("uniform_polytope: vertices are collinear");
        p.area = geometry2d::signed_area(p.hull);
        if (!(p.area > 0.0)) throw DomainError("uniform_polytope: zero area");
    } else {
        auto cloud = std::make_shared<detail::PolytopeCloud>();
        detail::enumerate_facets(p.vertices, cloud->facet_normals, cloud->facet_offsets);
        Vec lo = p.vertices.front(), hi = lo;
        for (const auto& v : p.vertices) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        const Vec span = hi - lo;
        std::vector<Vec> inside;
        Vec acc = Vec::Zero(n);
        for (std::size_t i = 1; i <= quadrature_nodes; ++i) {
            Vec x = lo + span.cwiseProduct(numerics::halton(i, n));
            if (cloud->contains(x, 0.0)) {
                acc += x;
                inside.push_back(std::move(x));
            }
        }
        if (inside.empty()) throw DomainError("uniform_polytope: no quadrature node inside");
        cloud->nodes.resize(n, static_cast<Eigen::Index>(inside.size()));
        for (std::size_t j = 0; j < inside.size(); ++j) cloud->nodes.col(static_cast<Eigen::Index>(j)) = inside[j];
        cloud->volume = span.prod() * static_cast<double>(inside.size()) / static_cast<double>(quadrature_nodes);
        cloud->centroid = acc / static_cast<double>(inside.size());
        p.cloud = std::move(cloud);
    }
    return Measure(std::move(p));
}

inline Measure Measure::mixture(std::vector<double> weights, std::vector<Measure> parts) {
    if (parts.empty() || weights.size() != parts.size()) throw DomainError("mixture: weights and parts must match and be nonempty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mixture: weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw DomainError("mixture: zero total weight");
    for (const auto& part : parts) require_dimension(part.dim(), parts.front().dim(), "mixture");
    for (double& w : weights) w /= total;
    return Measure(Mixture{std::move(weights), std::move(parts)});
}

inline Measure Measure::restricted(const Measure& base, const Hyperplane& halfspace) {
    require_dimension(halfspace.dim(), base.dim(), "restricted");
    const MassValue side = mass_halfspace(base, halfspace);
    if (!(side.value > 0.0)) throw DomainError("restricted: the conditioning half-space has zero mass");
    return Measure(Restricted{std::make_shared<const Measure>(base), halfspace, side.value});
}

inline bool Measure::analytic() const {
    return std::visit(
        [](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformPolytope>) {
                return x.cloud == nullptr;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                return std::all_of(x.parts.begin(), x.parts.end(), [](const Measure& p) { return p.analytic(); });
            } else if constexpr (std::is_same_v<T, Restricted>) {
                return x.base->dim() == 2 && x.base->analytic();
            } else {
                return true;
            }
        },
        model_);
}

inline Measure Measure::transformed(const Mat& rotation, const Vec& shift) const {
    auto map = [&](const Vec& x) -> Vec { return rotation * x + shift; };
    return std::visit(
        [&](const auto& x) -> Measure {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformBall>) {
                return uniform_ball(map(x.center), x.radius);
            } else if constexpr (std::is_same_v<T, SmoothCap>) {
                return smooth_cap(map(x.center), x.radius, x.exponent);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                std::vector<Vec> vs;
                for (const auto& v : x.vertices) vs.push_back(map(v));
                return uniform_polytope(std::move(vs), x.quadrature_nodes);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                std::vector<Measure> parts;
                for (const auto& p : x.parts) parts.push_back(p.transformed(rotation, shift));
                return mixture(x.weights, std::move(parts));
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                std::vector<Vec> ps;
                for (const auto& p : x.points) ps.push_back(map(p));
                return kernel_cloud(std::move(ps), x.bandwidth, x.exponent);
            } else {
                const Vec normal = rotation * x.halfspace.normal();
                const double offset = x.halfspace.offset() + normal.dot(shift);
                return restricted(x.base->transformed(rotation, shift), Hyperplane::normalized(normal, offset));
            }
        },
        model_);
}

// ---------------------------------------------------------------------------
// Half-space and region masses

namespace detail {

inline MassLD polytope_count(const PolytopeCloud& cloud, std::span<const Hyperplane> halfspaces) {
    const Eigen::Index count = cloud.nodes.cols();
    Eigen::Array<bool, Eigen::Dynamic, 1> in = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(count, true);
    for (const auto& h : halfspaces) {
        const Eigen::ArrayXd proj = (h.normal().transpose() * cloud.nodes).transpose().array();
        in = in && (proj >= h.offset());
    }
    const double hits = static_cast<double>(in.count());
    const double total = static_cast<double>(count);
    const double p = hits / total;
    return {static_cast<long double>(p), 3.0 * std::sqrt((p * (1.0 - p) + 1.0 / total) / total)};
}

inline MassLD halfspace_ld(const Measure& m, const Hyperplane& h) {
    require_dimension(h.dim(), m.dim(), "mass_halfspace");
    return std::visit(
        [&](const auto& x) -> MassLD {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                const long double v = as_radial(x).halfspace(h);
                return {v, rounding_bound(v)};
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                if (m.dim() == 1) {
                    double lo = x.vertices.front()[0], hi = lo;
                    for (const auto& v : x.vertices) {
                        lo = std::min(lo, v[0]);
                        hi = std::max(hi, v[0]);
                    }
                    const Radial seg{Vec::Constant(1, 0.5 * (lo + hi)), 0.5 * (hi - lo), 0};
                    const long double v = seg.halfspace(h);
                    return {v, rounding_bound(v)};
                }
                if (m.dim() == 2) {
                    const auto clipped = geometry2d::clip(x.hull, h);
                    const long double v = clipped.size() < 3 ? 0.0L : std::clamp(geometry2d::signed_area(clipped) / x.area, 0.0, 1.0);
                    return {v, rounding_bound(1.0L)};
                }
                const auto [lo, hi] = support_range(m, h.normal());
                if (h.offset() >= hi) return {0.0L, 0.0};
                if (h.offset() <= lo) return {1.0L, 0.0};
                const Hyperplane hs[1] = {h};
                return polytope_count(*x.cloud, hs);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                MassLD acc;
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (x.weights[i] == 0.0) continue;
                    const MassLD part = halfspace_ld(x.parts[i], h);
                    acc.value += static_cast<long double>(x.weights[i]) * part.value;
                    acc.error += x.weights[i] * part.error;
                }
                return acc;
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                long double acc = 0.0L;
                for (const auto& p : x.points) acc += Radial{p, x.bandwidth, x.exponent}.halfspace(h);
                const long double v = acc / static_cast<long double>(x.points.size());
                return {v, rounding_bound(v)};
            } else {
                const Hyperplane hs[2] = {x.halfspace, h};
                MassLD joint = region_ld(*x.base, hs);
                joint.value /= static_cast<long double>(x.base_mass);
                joint.error /= x.base_mass;
                joint.value = std::clamp(joint.value, 0.0L, 1.0L);
                return joint;
            }
        },
        m.model());
}

inline MassLD region_ld(const Measure& m, std::span<const Hyperplane> halfspaces) {
    for (const auto& h : halfspaces) require_dimension(h.dim(), m.dim(), "mass_region");
    if (halfspaces.empty()) return {1.0L, 0.0};
    if (halfspaces.size() == 1) return halfspace_ld(m, halfspaces.front());
    return std::visit(
        [&](const auto& x) -> MassLD {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Mixture>) {
                MassLD acc;
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (x.weights[i] == 0.0) continue;
                    const MassLD part = region_ld(x.parts[i], halfspaces);
                    acc.value += static_cast<long double>(x.weights[i]) * part.value;
                    acc.error += x.weights[i] * part.error;
                }
                return acc;
            } else if constexpr (std::is_same_v<T, Restricted>) {
                std::vector<Hyperplane> hs(halfspaces.begin(), halfspaces.end());
                hs.push_back(x.halfspace);
                MassLD joint = region_ld(*x.base, hs);
                joint.value = std::clamp(joint.value / static_cast<long double>(x.base_mass), 0.0L, 1.0L);
                joint.error /= x.base_mass;
                return joint;
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                if (m.dim() == 2) {
                    geometry2d::Polygon poly = x.hull;
                    for (const auto& h : halfspaces) {
                        poly = geometry2d::clip(poly, h);
                        if (poly.size() < 3) return {0.0L, rounding_bound(1.0L)};
                    }
                    return {std::clamp(geometry2d::signed_area(poly) / x.area, 0.0, 1.0), rounding_bound(1.0L)};
                }
                if (x.cloud) return polytope_count(*x.cloud, halfspaces);
                return qmc_region(m, halfspaces);
            } else if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                if (m.dim() != 2) return qmc_region(m, halfspaces);
                const Radial r = as_radial(x);
                const auto poly = clip_box(Ball{r.center, r.radius}, halfspaces);
                const long double v = poly.empty() ? 0.0L : r.polygon_mass(poly);
                return {v, 1e-13};
            } else {
                static_assert(std::is_same_v<T, KernelCloud>);
                if (m.dim() != 2) return qmc_region(m, halfspaces);
                long double acc = 0.0L;
                for (const auto& p : x.points) {
                    const Radial r{p, x.bandwidth, x.exponent};
                    const auto poly = clip_box(Ball{r.center, r.radius}, halfspaces);
                    if (!poly.empty()) acc += r.polygon_mass(poly);
                }
                return {acc / static_cast<long double>(x.points.size()), 1e-13};
            }
        },
        m.model());
}

inline std::pair<double, double> support_range(const Measure& m, const Vec& v) {
    return std::visit(
        [&](const auto& x) -> std::pair<double, double> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformPolytope>) {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (const auto& p : x.vertices) {
                    lo = std::min(lo, p.dot(v));
                    hi = std::max(hi, p.dot(v));
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, Mixture>) {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (std::size_t i = 0; i < x.parts.size(); ++i) {
                    if (x.weights[i] == 0.0) continue;
                    const auto r = support_range(x.parts[i], v);
                    lo = std::min(lo, r.first);
                    hi = std::max(hi, r.second);
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                double lo = std::numeric_limits<double>::infinity();
                double hi = -lo;
                for (const auto& p : x.points) {
                    lo = std::min(lo, p.dot(v) - x.bandwidth);
                    hi = std::max(hi, p.dot(v) + x.bandwidth);
                }
                return {lo, hi};
            } else if constexpr (std::is_same_v<T, Restricted>) {
                auto r = support_range(*x.base, v);
                // the kept side bounds the range only when v is (anti)parallel to its normal
                const double c = v.dot(x.halfspace.normal());
                if (c > 1.0 - 1e-15) r.first = std::max(r.first, x.halfspace.offset());
                if (c < -1.0 + 1e-15) r.second = std::min(r.second, -x.halfspace.offset());
                if (r.first > r.second) r.first = r.second;
                return r;
            } else {
                return bounding_ball(m).projection_range(v);
            }
        },
        m.model());
}

}  // namespace detail

/// mu(H+) for the closed positive half-space of h.
inline MassValue mass_halfspace(const Measure& m, const Hyperplane& h) {
    const detail::MassLD r = detail::halfspace_ld(m, h);
    return {std::clamp(static_cast<double>(r.value), 0.0, 1.0), r.error};
}

/// Mass of the intersection of the positive sides of all given half-spaces.
inline MassValue mass_region(const Measure& m, std::span<const Hyperplane> halfspaces) {
    const detail::MassLD r = detail::region_ld(m, halfspaces);
    return {std::clamp(static_cast<double>(r.value), 0.0, 1.0), r.error};
}

inline double density_at(const Measure& m, const Vec& x) {
    require_dimension(x.size(), m.dim(), "density_at");
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                return detail::as_radial(s).density(x);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                if (m.dim() == 1) {
                    double lo = s.vertices.front()[0], hi = lo;
                    for (const auto& v : s.vertices) {
                        lo = std::min(lo, v[0]);
                        hi = std::max(hi, v[0]);
                    }
                    return (x[0] >= lo && x[0] <= hi) ? 1.0 / (hi - lo) : 0.0;
                }
                if (m.dim() == 2) {
                    const auto [t0, t1] = geometry2d::line_clip(s.hull, geometry2d::to_point(x), geometry2d::Point(1.0, 0.0));
                    return (t0 <= 0.0 && 0.0 <= t1) ? 1.0 / s.area : 0.0;
                }
                return s.cloud->contains(x) ? 1.0 / s.cloud->volume : 0.0;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < s.parts.size(); ++i) acc += s.weights[i] * density_at(s.parts[i], x);
                return acc;
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                double acc = 0.0;
                for (const auto& p : s.points) acc += detail::Radial{p, s.bandwidth, s.exponent}.density(x);
                return acc / static_cast<double>(s.points.size());
            } else {
                if (!s.halfspace.contains_positive(x)) return 0.0;
                return density_at(*s.base, x) / s.base_mass;
            }
        },
        m.model());
}

inline Ball bounding_ball(const Measure& m) {
    auto enclose = [](const std::vector<Ball>& balls) {
        const auto n = balls.front().center.size();
        Vec lo = balls.front().center, hi = lo;
        for (const auto& b : balls) {
            lo = lo.cwiseMin(b.center - Vec::Constant(n, b.radius));
            hi = hi.cwiseMax(b.center + Vec::Constant(n, b.radius));
        }
        Ball out{0.5 * (lo + hi), 0.0};
        for (const auto& b : balls) out.radius = std::max(out.radius, (b.center - out.center).norm() + b.radius);
        return out;
    };
    return std::visit(
        [&](const auto& s) -> Ball {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                return Ball{s.center, s.radius};
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                Vec lo = s.vertices.front(), hi = lo;
                for (const auto& v : s.vertices) {
                    lo = lo.cwiseMin(v);
                    hi = hi.cwiseMax(v);
                }
                Ball out{0.5 * (lo + hi), 0.0};
                for (const auto& v : s.vertices) out.radius = std::max(out.radius, (v - out.center).norm());
                return out;
            } else if constexpr (std::is_same_v<T, Mixture>) {
                std::vector<Ball> balls;
                for (std::size_t i = 0; i < s.parts.size(); ++i) {
                    if (s.weights[i] > 0.0) balls.push_back(bounding_ball(s.parts[i]));
                }
                return enclose(balls);
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                std::vector<Ball> balls;
                for (const auto& p : s.points) balls.push_back(Ball{p, s.bandwidth});
                return enclose(balls);
            } else {
                return bounding_ball(*s.base);
            }
        },
        m.model());
}

// ---------------------------------------------------------------------------
// Sampling and the Monte-Carlo oracle

namespace detail {

template <class Rng>
Vec sample(const Measure& m, Rng& rng) {
    return std::visit(
        [&](const auto& s) -> Vec {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                return as_radial(s).sample(rng);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                const Ball ball = bounding_ball(m);
                std::uniform_real_distribution<double> unit(-1.0, 1.0);
                Vec x(m.dim());
                while (true) {
                    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = ball.center[j] + ball.radius * unit(rng);
                    if (density_at(m, x) > 0.0) return x;
                }
            } else if constexpr (std::is_same_v<T, Mixture>) {
                std::discrete_distribution<std::size_t> pick(s.weights.begin(), s.weights.end());
                return sample(s.parts[pick(rng)], rng);
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                std::uniform_int_distribution<std::size_t> pick(0, s.points.size() - 1);
                return Radial{s.points[pick(rng)], s.bandwidth, s.exponent}.sample(rng);
            } else {
                while (true) {
                    Vec x = sample(*s.base, rng);
                    if (s.halfspace.contains_positive(x)) return x;
                }
            }
        },
        m.model());
}

}  // namespace detail

/// Draws `count` points from m with a fixed-seed generator.
inline std::vector<Vec> sample_points(const Measure& m, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(detail::sample(m, rng));
    return out;
}

/// Monte-Carlo estimate of mu(H+); error_bound reaches the far end of a
/// three-sigma Wilson interval.
inline MassValue mass_halfspace_mc(const Measure& m, const Hyperplane& h, std::size_t samples, std::uint64_t seed) {
    require_dimension(h.dim(), m.dim(), "mass_halfspace_mc");
    if (samples < 1) throw DomainError("mass_halfspace_mc: need at least one sample");
    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        if (h.contains_positive(detail::sample(m, rng))) ++hits;
    }
    // Wilson score interval at z = 3, which stays honest when hits is 0 or n
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    const double z2 = 9.0;
    const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = 3.0 / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {p, std::max(std::abs(center - half - p), std::abs(center + half - p))};
}

// ---------------------------------------------------------------------------
// Line integrals (used by central spheres)

namespace detail {

inline void chord_breaks(const Measure& m, const Vec& p, const Vec& d, std::vector<double>& out) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                as_radial(s).chord_breaks(p, d, out);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                if (m.dim() == 2) {
                    const auto [t0, t1] = geometry2d::line_clip(s.hull, geometry2d::to_point(p), geometry2d::to_point(d));
                    if (t0 <= t1) {
                        out.push_back(t0);
                        out.push_back(t1);
                    }
                } else if (s.cloud) {
                    for (std::size_t f = 0; f < s.cloud->facet_normals.size(); ++f) {
                        const double den = d.dot(s.cloud->facet_normals[f]);
                        if (den != 0.0) out.push_back((s.cloud->facet_offsets[f] - p.dot(s.cloud->facet_normals[f])) / den);
                    }
                }
            } else if constexpr (std::is_same_v<T, Mixture>) {
                for (const auto& part : s.parts) chord_breaks(part, p, d, out);
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                for (const auto& q : s.points) Radial{q, s.bandwidth, s.exponent}.chord_breaks(p, d, out);
            } else {
                chord_breaks(*s.base, p, d, out);
                const double den = d.dot(s.halfspace.normal());
                if (den != 0.0) out.push_back((s.halfspace.offset() - p.dot(s.halfspace.normal())) / den);
            }
        },
        m.model());
}

}  // namespace detail

/// Zeroth and first moments of t -> h(p + t d) over [t0, t1], integrated
/// piecewise between support boundary crossings with 16-point Gauss-Legendre
/// (exact for the polynomial profiles used here).
struct LineMoments {
    double mass = 0.0;
    double first = 0.0;
};

inline LineMoments line_moments(const Measure& m, const Vec& p, const Vec& d, double t0, double t1) {
    std::vector<double> cuts{t0, t1};
    detail::chord_breaks(m, p, d, cuts);
    std::sort(cuts.begin(), cuts.end());
    LineMoments out;
    using GL = boost::math::quadrature::gauss<double, 16>;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::max(cuts[i], t0);
        const double b = std::min(cuts[i + 1], t1);
        if (!(b > a)) continue;
        // evaluate strictly inside the piece so that boundary ties do not matter
        out.mass += GL::integrate([&](double t) { return density_at(m, p + t * d); }, a, b);
        out.first += GL::integrate([&](double t) { return t * density_at(m, p + t * d); }, a, b);
    }
    return out;
}

}  // namespace hamsplit
