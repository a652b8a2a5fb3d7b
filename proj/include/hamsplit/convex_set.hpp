#pragma once

// Compact convex containers S (a ball or the hull of a vertex list), and
// finite point sets covering a measure's support.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <variant>
#include <vector>

#include "hamsplit/core.hpp"
#include "hamsplit/geometry2d.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/numerics.hpp"

namespace hamsplit {

using PointSet = std::vector<Vec>;

class ConvexSet {
public:
    static ConvexSet ball(Vec center, double radius) {
        if (!(radius >= 0.0) || !center.allFinite()) throw DomainError("convex set: bad ball");
        ConvexSet s;
        s.dim_ = center.size();
        s.ball_ = Ball{std::move(center), radius};
        return s;
    }

    /// Hull of the given vertices; must be full-dimensional.
    static ConvexSet polytope(PointSet vertices) {
        if (vertices.empty()) throw DomainError("convex set: no vertices");
        ConvexSet s;
        s.dim_ = vertices.front().size();
        for (const auto& v : vertices) require_dimension(v.size(), s.dim_, "convex set");
        if (s.dim_ == 2) {
            geometry2d::Polygon pts;
            for (const auto& v : vertices) pts.push_back(geometry2d::to_point(v));
            s.hull_ = geometry2d::convex_hull(std::move(pts));
            if (s.hull_.size() < 3) throw DomainError("convex set: degenerate polygon");
            vertices.clear();
            for (const auto& p : s.hull_) vertices.push_back(geometry2d::to_vec(p));
        } else if (s.dim_ >= 3) {
            detail::enumerate_facets(vertices, s.facet_normals_, s.facet_offsets_);
        }
        s.vertices_ = std::move(vertices);
        return s;
    }

    bool is_ball() const { return ball_.has_value(); }
    std::ptrdiff_t dim() const { return dim_; }
    const PointSet& vertices() const { return vertices_; }
    const Ball& as_ball() const { return *ball_; }

    /// max over S of <x, v>.
    double support(const Vec& v) const {
        if (ball_) return ball_->center.dot(v) + ball_->radius * v.norm();
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : vertices_) best = std::max(best, p.dot(v));
        return best;
    }

    /// A point of S attaining support(v); the mean of the maximizing vertices
    /// for polytopes, so it lies on the supporting face.
    Vec support_point(const Vec& v) const {
        if (ball_) return ball_->center + ball_->radius * v / v.norm();
        const double best = support(v);
        const double tol = 1e-12 * std::max(1.0, std::abs(best));
        Vec acc = Vec::Zero(dim_);
        int count = 0;
        for (const auto& p : vertices_) {
            if (p.dot(v) >= best - tol) {
                acc += p;
                ++count;
            }
        }
        return acc / count;
    }

    bool contains(const Vec& x, double tol = 1e-9) const {
        require_dimension(x.size(), dim_, "convex set contains");
        if (ball_) return ball_->contains(x, tol);
        if (dim_ == 1) {
            const auto [lo, hi] = range(Vec::Ones(1));
            return x[0] >= lo - tol && x[0] <= hi + tol;
        }
        if (dim_ == 2) {
            const std::size_t n = hull_.size();
            const geometry2d::Point p = geometry2d::to_point(x);
            for (std::size_t i = 0; i < n; ++i) {
                const geometry2d::Point e = hull_[(i + 1) % n] - hull_[i];
                if (geometry2d::cross(e, p - hull_[i]) < -tol * e.norm()) return false;
            }
            return true;
        }
        for (std::size_t f = 0; f < facet_normals_.size(); ++f) {
            if (x.dot(facet_normals_[f]) > facet_offsets_[f] + tol) return false;
        }
        return true;
    }

    std::pair<double, double> range(const Vec& v) const { return {-support(-v), support(v)}; }

    Vec centroid() const {
        if (ball_) return ball_->center;
        if (dim_ == 2) return geometry2d::to_vec(geometry2d::area_centroid(hull_));
        if (dim_ == 1) {
            const auto [lo, hi] = range(Vec::Ones(1));
            return Vec::Constant(1, 0.5 * (lo + hi));
        }
        // Halton estimate of the volume centroid
        Vec lo = vertices_.front(), hi = lo;
        for (const auto& v : vertices_) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        Vec acc = Vec::Zero(dim_);
        std::size_t count = 0;
        for (std::size_t i = 1; i <= (std::size_t{1} << 15); ++i) {
            Vec x = lo + (hi - lo).cwiseProduct(numerics::halton(i, dim_));
            if (contains(x, 0.0)) {
                acc += x;
                ++count;
            }
        }
        if (count == 0) {
            for (const auto& v : vertices_) acc += v;
            return acc / static_cast<double>(vertices_.size());
        }
        return acc / static_cast<double>(count);
    }

    /// Parameter interval of the line p + t d inside S (t0 > t1 when empty).
    std::pair<double, double> chord(const Vec& p, const Vec& d) const {
        if (ball_) {
            const Vec q = p - ball_->center;
            const double a = d.squaredNorm();
            const double b = q.dot(d);
            const double c = q.squaredNorm() - ball_->radius * ball_->radius;
            const double disc = b * b - a * c;
            if (disc < 0.0) return {1.0, 0.0};
            const double sq = std::sqrt(disc);
            return {(-b - sq) / a, (-b + sq) / a};
        }
        if (dim_ == 2) return geometry2d::line_clip(hull_, geometry2d::to_point(p), geometry2d::to_point(d));
        double t0 = -std::numeric_limits<double>::infinity(), t1 = -t0;
        for (std::size_t f = 0; f < facet_normals_.size(); ++f) {
            const double den = d.dot(facet_normals_[f]);
            const double num = facet_offsets_[f] - p.dot(facet_normals_[f]);
            if (den == 0.0) {
                if (num < 0.0) return {1.0, 0.0};
            } else if (den > 0.0) {
                t1 = std::min(t1, num / den);
            } else {
                t0 = std::max(t0, num / den);
            }
        }
        return {t0, t1};
    }

    /// Point of H intersected with S closest to target. Requires the
    /// intersection to be nonempty.
    Vec nearest_on_slice(const Hyperplane& h, const Vec& target) const {
        const Vec& v = h.normal();
        Vec q = target - h.signed_distance(target) * v;
        if (ball_) {
            const double d = h.signed_distance(ball_->center);
            const Vec c = ball_->center - d * v;
            const double r2 = ball_->radius * ball_->radius - d * d;
            const double r = r2 > 0.0 ? std::sqrt(r2) : 0.0;
            const Vec off = q - c;
            const double len = off.norm();
            return len <= r ? q : Vec(c + off * (r / len));
        }
        if (dim_ == 1) return q;
        if (dim_ == 2) {
            Vec dir(2);
            dir << -v[1], v[0];
            const auto [t0, t1] = chord(q, dir);
            if (t0 > t1) throw Error("nearest_on_slice: hyperplane misses the set");
            return q + std::clamp(0.0, t0, t1) * dir;
        }
        // Dykstra's alternating projections onto H and the facet half-spaces.
        const std::size_t m = facet_normals_.size() + 1;
        std::vector<Vec> corrections(m, Vec::Zero(dim_));
        Vec x = target;
        for (int iter = 0; iter < 20000; ++iter) {
            const Vec prev = x;
            for (std::size_t j = 0; j < m; ++j) {
                const Vec y = x + corrections[j];
                Vec proj = y;
                if (j == 0) {
                    proj = y - h.signed_distance(y) * v;
                } else {
                    const Vec& a = facet_normals_[j - 1];
                    const double excess = y.dot(a) - facet_offsets_[j - 1];
                    if (excess > 0.0) proj = y - excess * a;
                }
                corrections[j] = y - proj;
                x = proj;
            }
            if ((x - prev).norm() < 1e-14 * (1.0 + x.norm())) break;
        }
        return x;
    }

    /// mu(S). Exact when S covers the support or for planar polygons, Halton
    /// quadrature otherwise.
    MassValue mass(const Measure& m) const {
        require_dimension(m.dim(), dim_, "convex set mass");
        const Ball bb = bounding_ball(m);
        if (ball_ && (bb.center - ball_->center).norm() + bb.radius <= ball_->radius) return {1.0, 0.0};
        if (!ball_) {
            bool covers = true;
            for (std::size_t f = 0; f < facet_normals_.size() && covers; ++f) {
                covers = bb.center.dot(facet_normals_[f]) + bb.radius <= facet_offsets_[f];
            }
            if (dim_ == 2) {
                std::vector<Hyperplane> hs;
                const std::size_t n = hull_.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const geometry2d::Point e = hull_[(i + 1) % n] - hull_[i];
                    Vec inward(2);
                    inward << -e.y(), e.x();
                    hs.push_back(Hyperplane::normalized(inward, inward.dot(geometry2d::to_vec(hull_[i]))));
                }
                return mass_region(m, hs);
            }
            if (covers && !facet_normals_.empty()) return {1.0, 0.0};
        }
        // generic quadrature weighted by the density
        const std::ptrdiff_t n = dim_;
        long double total = 0.0L, inside = 0.0L;
        std::size_t hits = 0;
        const std::size_t nodes = std::size_t{1} << 17;
        for (std::size_t i = 1; i <= nodes; ++i) {
            Vec x = bb.center + bb.radius * (2.0 * numerics::halton(i, n) - Vec::Ones(n));
            const double w = density_at(m, x);
            if (w <= 0.0) continue;
            ++hits;
            total += w;
            if (contains(x, 0.0)) inside += w;
        }
        if (total <= 0.0L) return {0.0, 1.0};
        const double p = static_cast<double>(inside / total);
        const double neff = static_cast<double>(std::max<std::size_t>(hits, 1));
        return {p, 3.0 * std::sqrt((p * (1.0 - p) + 1.0 / neff) / neff)};
    }

private:
    ConvexSet() = default;

    std::ptrdiff_t dim_ = 0;
    std::optional<Ball> ball_;
    PointSet vertices_;
    geometry2d::Polygon hull_;
    std::vector<Vec> facet_normals_;
    std::vector<double> facet_offsets_;
};

namespace detail {

/// Inflation factor 1/cos(theta) where theta bounds the angular covering
/// radius of the lattice, so the hull of the inflated lattice contains the
/// unit ball. Planar lattices use the exact pi/count; higher dimensions
/// estimate theta from a denser probe lattice and pad it by 25%.
inline double lattice_inflation(std::ptrdiff_t n, std::size_t count) {
    if (n == 1) return 1.0;
    if (n == 2) return 1.0 / std::cos(std::numbers::pi / static_cast<double>(count));
    static std::mutex mutex;
    static std::map<std::pair<std::ptrdiff_t, std::size_t>, double> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(n, count);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const auto lattice = numerics::sphere_lattice(n, count);
    const auto probes = numerics::sphere_lattice(n, 40 * count + 1);
    double worst = 1.0;
    for (const auto& u : probes) {
        double best = -1.0;
        for (const auto& p : lattice) best = std::max(best, u.dot(p));
        worst = std::min(worst, best);
    }
    const double theta = 1.25 * std::acos(std::clamp(worst, -1.0, 1.0));
    const double factor = 1.0 / std::cos(std::min(theta, 1.2));
    cache.emplace(key, factor);
    return factor;
}

inline void covering_points_into(const Measure& m, std::size_t refinement, PointSet& out) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            auto ball_points = [&](const Vec& c, double r) {
                const auto n = c.size();
                if (n == 1) {
                    out.push_back(c - Vec::Constant(1, r));
                    out.push_back(c + Vec::Constant(1, r));
                    return;
                }
                const double inflated = r * lattice_inflation(n, refinement);
                for (const auto& u : numerics::sphere_lattice(n, refinement)) out.push_back(c + inflated * u);
            };
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                ball_points(s.center, s.radius);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                out.insert(out.end(), s.vertices.begin(), s.vertices.end());
            } else if constexpr (std::is_same_v<T, Mixture>) {
                for (std::size_t i = 0; i < s.parts.size(); ++i) {
                    if (s.weights[i] > 0.0) covering_points_into(s.parts[i], refinement, out);
                }
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                for (const auto& p : s.points) ball_points(p, s.bandwidth);
            } else {
                PointSet base;
                covering_points_into(*s.base, refinement, base);
                if (m.dim() == 2) {
                    geometry2d::Polygon poly;
                    for (const auto& p : base) poly.push_back(geometry2d::to_point(p));
                    poly = geometry2d::clip(geometry2d::convex_hull(std::move(poly)), s.halfspace);
                    for (const auto& p : poly) out.push_back(geometry2d::to_vec(p));
                } else {
                    out.insert(out.end(), base.begin(), base.end());
                }
            }
        },
        m.model());
}

}  // namespace detail

inline std::size_t default_refinement(std::ptrdiff_t n) { return n <= 2 ? 64 : 256; }

/// Finite point set whose convex hull contains the support of m. Curved
/// pieces are replaced by an inflated lattice on their bounding sphere.
inline PointSet covering_points(const Measure& m, std::size_t refinement = 0) {
    if (refinement == 0) refinement = default_refinement(m.dim());
    PointSet out;
    detail::covering_points_into(m, refinement, out);
    return out;
}

/// conv(support) approximated from outside by covering_points.
inline ConvexSet support_hull(const Measure& m, std::size_t refinement = 0) {
    if (m.dim() == 1) {
        const auto [lo, hi] = detail::support_range(m, Vec::Ones(1));
        return ConvexSet::polytope({Vec::Constant(1, lo), Vec::Constant(1, hi)});
    }
    if (const auto* b = std::get_if<UniformBall>(&m.model())) return ConvexSet::ball(b->center, b->radius);
    if (const auto* c = std::get_if<SmoothCap>(&m.model())) return ConvexSet::ball(c->center, c->radius);
    if (m.dim() >= 3) {
        // facet enumeration is combinatorial; a bounding ball keeps it cheap
        if (const auto* p = std::get_if<UniformPolytope>(&m.model()); p && p->vertices.size() <= 24) {
            return ConvexSet::polytope(p->vertices);
        }
        const Ball b = bounding_ball(m);
        return ConvexSet::ball(b.center, b.radius);
    }
    return ConvexSet::polytope(covering_points(m, refinement));
}

}  // namespace hamsplit
