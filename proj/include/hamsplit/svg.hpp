#pragma once

// Planar figures as standalone SVG, plus CSV tables for curves and scans.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hamsplit/auxiliary.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/partitions.hpp"
#include "hamsplit/solver.hpp"

namespace hamsplit {

inline const std::vector<std::string>& svg_palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors;
}

/// World-to-screen mapping with the y axis pointing up.
class SvgCanvas {
public:
    SvgCanvas(double xmin, double xmax, double ymin, double ymax, double pixels = 640.0) : pixels_(pixels) {
        const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
        const double pad = 0.06 * span;
        x0_ = 0.5 * (xmin + xmax) - 0.5 * span - pad;
        y1_ = 0.5 * (ymin + ymax) + 0.5 * span + pad;
        scale_ = pixels / (span + 2.0 * pad);
        lo_ = Vec(2);
        hi_ = Vec(2);
        lo_ << x0_, y1_ - (span + 2.0 * pad);
        hi_ << x0_ + span + 2.0 * pad, y1_;
    }

    static SvgCanvas around(const std::vector<Ball>& balls, double pixels = 640.0) {
        double xmin = std::numeric_limits<double>::infinity(), ymin = xmin, xmax = -xmin, ymax = -xmin;
        for (const auto& b : balls) {
            xmin = std::min(xmin, b.center[0] - b.radius);
            xmax = std::max(xmax, b.center[0] + b.radius);
            ymin = std::min(ymin, b.center[1] - b.radius);
            ymax = std::max(ymax, b.center[1] + b.radius);
        }
        if (balls.empty()) xmin = ymin = -1.0, xmax = ymax = 1.0;
        return SvgCanvas(xmin, xmax, ymin, ymax, pixels);
    }

    double sx(double x) const { return (x - x0_) * scale_; }
    double sy(double y) const { return (y1_ - y) * scale_; }

    void circle(const Vec& c, double r, const std::string& stroke, const std::string& fill = "none", double opacity = 1.0) {
        body_ << "<circle cx=\"" << sx(c[0]) << "\" cy=\"" << sy(c[1]) << "\" r=\"" << r * scale_ << "\" stroke=\"" << stroke
              << "\" fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke-width=\"1.5\"/>\n";
    }

    void dot(const Vec& c, const std::string& color, double radius_px = 3.0) {
        body_ << "<circle cx=\"" << sx(c[0]) << "\" cy=\"" << sy(c[1]) << "\" r=\"" << radius_px << "\" fill=\"" << color
              << "\"/>\n";
    }

    void polygon(const PointSet& pts, const std::string& stroke, const std::string& fill = "none", double opacity = 1.0) {
        body_ << "<polygon points=\"" << coords(pts) << "\" stroke=\"" << stroke << "\" fill=\"" << fill
              << "\" fill-opacity=\"" << opacity << "\" stroke-width=\"1.5\"/>\n";
    }

    void polyline(const PointSet& pts, const std::string& stroke, bool closed = false, double width = 1.5) {
        body_ << "<" << (closed ? "polygon" : "polyline") << " points=\"" << coords(pts) << "\" stroke=\"" << stroke
              << "\" fill=\"none\" stroke-width=\"" << width << "\"/>\n";
    }

    /// The line <x, n> = c clipped to the view, with a tick on its positive side.
    void line(const Hyperplane& h, const std::string& stroke, double width = 2.0) {
        const Vec& n = h.normal();
        Vec d(2);
        d << -n[1], n[0];
        const Vec p = n * h.offset();
        const double reach = (hi_ - lo_).norm();
        const Vec a = p - reach * d, b = p + reach * d;
        body_ << "<line x1=\"" << sx(a[0]) << "\" y1=\"" << sy(a[1]) << "\" x2=\"" << sx(b[0]) << "\" y2=\"" << sy(b[1])
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"/>\n";
        Vec mid = p;
        if (!inside(mid)) mid = 0.5 * (lo_ + hi_) - (0.5 * (lo_ + hi_)).dot(n) * n + h.offset() * n;
        const Vec tip = mid + 0.04 * reach * n;
        body_ << "<line x1=\"" << sx(mid[0]) << "\" y1=\"" << sy(mid[1]) << "\" x2=\"" << sx(tip[0]) << "\" y2=\""
              << sy(tip[1]) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void text(const Vec& at, const std::string& label, const std::string& color = "#000") {
        body_ << "<text x=\"" << sx(at[0]) << "\" y=\"" << sy(at[1]) << "\" font-family=\"sans-serif\" font-size=\"13\" fill=\""
              << color << "\">" << escape(label) << "</text>\n";
    }

    void caption(const std::string& label) { caption_ = label; }

    std::string str() const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels_ << "\" height=\"" << pixels_ + 24
            << "\" viewBox=\"0 0 " << pixels_ << " " << pixels_ + 24 << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<clipPath id=\"view\"><rect width=\"" << pixels_ << "\" height=\"" << pixels_ << "\"/></clipPath>\n"
            << "<g clip-path=\"url(#view)\">\n"
            << body_.str() << "</g>\n";
        if (!caption_.empty()) {
            out << "<text x=\"8\" y=\"" << pixels_ + 17 << "\" font-family=\"sans-serif\" font-size=\"13\">" << escape(caption_)
                << "</text>\n";
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    std::string coords(const PointSet& pts) const {
        std::ostringstream s;
        s << std::setprecision(6);
        for (const auto& p : pts) s << sx(p[0]) << "," << sy(p[1]) << " ";
        return s.str();
    }

    bool inside(const Vec& p) const { return p[0] >= lo_[0] && p[0] <= hi_[0] && p[1] >= lo_[1] && p[1] <= hi_[1]; }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else if (c == '&') out += "&amp;";
            else out += c;
        }
        return out;
    }

    double pixels_;
    double x0_ = 0.0, y1_ = 0.0, scale_ = 1.0;
    Vec lo_, hi_;
    std::ostringstream body_;
    std::string caption_;
};

/// Outline of a planar measure's support: discs for radial pieces, polygons
/// for polytopes, the kernel discs for clouds.
inline void draw_support(SvgCanvas& canvas, const Measure& m, const std::string& color) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformBall> || std::is_same_v<T, SmoothCap>) {
                canvas.circle(x.center, x.radius, color, color, std::is_same_v<T, UniformBall> ? 0.18 : 0.1);
                if constexpr (std::is_same_v<T, SmoothCap>) canvas.circle(x.center, 0.5 * x.radius, color, color, 0.12);
            } else if constexpr (std::is_same_v<T, UniformPolytope>) {
                canvas.polygon(x.vertices, color, color, 0.18);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                for (const auto& p : x.parts) draw_support(canvas, p, color);
            } else if constexpr (std::is_same_v<T, KernelCloud>) {
                for (const auto& p : x.points) canvas.circle(p, x.bandwidth, color, color, 0.06);
            } else {
                draw_support(canvas, *x.base, color);
            }
        },
        m.model());
}

inline SvgCanvas problem_canvas(const std::vector<Measure>& measures) {
    std::vector<Ball> balls;
    for (const auto& m : measures) balls.push_back(bounding_ball(m));
    return SvgCanvas::around(balls);
}

/// Supports of the measures, optional central-sphere curves (one per
/// measure) and, if given, the splitting line.
inline std::string svg_split(const Problem& p, const std::optional<Hyperplane>& h, const std::string& caption = "",
                             const std::vector<CurveSample>& overlays = {}) {
    if (p.dim() != 2) throw UnsupportedError("svg: only planar problems can be drawn");
    SvgCanvas canvas = problem_canvas(p.measures);
    const auto& colors = svg_palette();
    for (std::size_t i = 0; i < p.measures.size(); ++i) draw_support(canvas, p.measures[i], colors[i % colors.size()]);
    if (p.separators) {
        for (const auto& s : *p.separators) {
            if (s.is_ball()) canvas.circle(s.as_ball().center, s.as_ball().radius, "#777");
            else canvas.polyline(s.vertices(), "#777", true, 1.0);
        }
    }
    for (std::size_t i = 0; i < overlays.size(); ++i) {
        canvas.polyline(overlays[i].points, colors[i % colors.size()], true, 0.8);
    }
    if (h) canvas.line(*h, "#000");
    canvas.caption(caption);
    return canvas.str();
}

/// A central-sphere curve over the measure and its container.
inline std::string svg_curve(const Measure& m, const ConvexSet& container, const CurveSample& curve,
                             const std::string& caption = "") {
    if (m.dim() != 2) throw UnsupportedError("svg: only planar curves can be drawn");
    std::vector<Ball> balls{bounding_ball(m)};
    if (container.is_ball()) balls.push_back(container.as_ball());
    for (const auto& p : curve.points) balls.push_back(Ball{p, 0.0});
    SvgCanvas canvas = SvgCanvas::around(balls);
    draw_support(canvas, m, svg_palette()[0]);
    if (container.is_ball()) canvas.circle(container.as_ball().center, container.as_ball().radius, "#777");
    else canvas.polyline(container.vertices(), "#777", true, 1.0);
    canvas.polyline(curve.points, svg_palette()[1], true, 1.2);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (curve.fallback[i]) canvas.dot(curve.points[i], "#ff7f0e", 1.5);
    }
    canvas.dot(container.centroid(), "#000");
    canvas.caption(caption);
    return canvas.str();
}

inline std::string svg_two_lines(const Measure& m, const QuadPartition& q, const std::string& caption = "") {
    if (m.dim() != 2) throw UnsupportedError("svg: only planar partitions can be drawn");
    SvgCanvas canvas = problem_canvas({m});
    draw_support(canvas, m, svg_palette()[0]);
    canvas.line(q.h1, svg_palette()[1]);
    canvas.line(q.h2, svg_palette()[2]);
    canvas.caption(caption);
    return canvas.str();
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_curve(const CurveSample& c) {
    std::ostringstream out;
    out << std::setprecision(17) << "angle,x,y,fallback\n";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        out << c.angles[i] << "," << c.points[i][0] << "," << c.points[i][1] << "," << (c.fallback[i] ? 1 : 0) << "\n";
    }
    return out.str();
}

/// One row per scanned normal: its components and the reduced residual norm.
inline std::string csv_scan(const ResidualScan& s) {
    std::ostringstream out;
    out << std::setprecision(17);
    const std::ptrdiff_t n = s.best_v.size();
    for (std::ptrdiff_t k = 0; k < n; ++k) out << "v" << k << ",";
    out << "norm\n";
    for (std::size_t i = 0; i < s.normals.size(); ++i) {
        for (std::ptrdiff_t k = 0; k < n; ++k) out << s.normals[i][k] << ",";
        out << s.norms[i] << "\n";
    }
    return out.str();
}

}  // namespace hamsplit
