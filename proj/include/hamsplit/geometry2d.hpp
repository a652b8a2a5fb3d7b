#pragma once

// Planar polygon helpers: convex hull, half-plane clipping and areas.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hamsplit/core.hpp"

namespace hamsplit::geometry2d {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed area (positive for counter-clockwise order).
inline double signed_area(const Polygon& poly) {
    double twice = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * twice;
}

inline Point area_centroid(const Polygon& poly) {
    double twice = 0.0;
    Point acc = Point::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        const double w = cross(a, b);
        twice += w;
        acc += (a + b) * w;
    }
    if (std::abs(twice) <= 0.0) {
        Point mean = Point::Zero();
        for (const auto& p : poly) mean += p;
        return mean / static_cast<double>(std::max<std::size_t>(n, 1));
    }
    return acc / (3.0 * twice);
}

/// Andrew's monotone chain; returns the hull counter-clockwise without
/// repeated endpoint. Collinear points are dropped.
inline Polygon convex_hull(Polygon pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    Polygon hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

/// Sutherland-Hodgman clip of a convex polygon against {x : <x, normal> >= offset}.
inline Polygon clip(const Polygon& poly, const Point& normal, double offset) {
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        const double da = a.dot(normal) - offset;
        const double db = b.dot(normal) - offset;
        if (da >= 0.0) out.push_back(a);
        if ((da >= 0.0) != (db >= 0.0)) {
            const double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

inline Polygon clip(const Polygon& poly, const Hyperplane& h) {
    return clip(poly, Point(h.normal()[0], h.normal()[1]), h.offset());
}

/// Axis-aligned square centered at c with half-width w, counter-clockwise.
inline Polygon square(const Point& c, double w) {
    return {c + Point(-w, -w), c + Point(w, -w), c + Point(w, w), c + Point(-w, w)};
}

inline Point to_point(const Vec& v) { return Point(v[0], v[1]); }
inline Vec to_vec(const Point& p) {
    Vec v(2);
    v << p.x(), p.y();
    return v;
}

/// Parameter interval [t0, t1] of the line p + t d inside the convex polygon;
/// empty (t0 > t1) when the line misses it.
inline std::pair<double, double> line_clip(const Polygon& poly, const Point& p, const Point& d) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        const Point e = b - a;
        // inside is left of e for a counter-clockwise polygon
        const double num = cross(e, p - a);
        const double den = cross(e, d);
        if (den == 0.0) {
            if (num < 0.0) return {1.0, 0.0};
            continue;
        }
        const double t = -num / den;
        if (den > 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
    }
    return {t0, t1};
}

}  // namespace hamsplit::geometry2d
