#pragma once

// Poincare-Miranda sign conditions on boxes. A map g: box -> R^k whose i-th
// component has a fixed sign on each of the two facets orthogonal to axis i,
// opposite on the two, has a zero in the box. Facets are checked on sampled
// lattices, so a certificate records how densely it was sampled and by what
// margin it passed.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "hamsplit/core.hpp"

namespace hamsplit {

struct Box {
    Vec lower;
    Vec upper;

    Box() = default;
    Box(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
        if (lower.size() != upper.size()) throw DimensionError("Box: bound dimensions differ");
        if (lower.size() == 0) throw DomainError("Box: zero dimension");
        if (!lower.allFinite() || !upper.allFinite()) throw DomainError("Box: non-finite bound");
        if ((lower.array() > upper.array()).any()) throw DomainError("Box: lower bound exceeds upper bound");
    }
    static Box cube(std::ptrdiff_t k, double half = 1.0) {
        return Box(Vec::Constant(k, -half), Vec::Constant(k, half));
    }
    static Box around(const Vec& center, double half) {
        return Box(center.array() - half, center.array() + half);
    }

    std::ptrdiff_t dim() const { return lower.size(); }
    double width() const { return (upper - lower).maxCoeff(); }
    Vec center() const { return 0.5 * (lower + upper); }
    bool contains(const Vec& x, double slack = 0.0) const {
        return ((x.array() >= lower.array() - slack) && (x.array() <= upper.array() + slack)).all();
    }
    std::pair<Box, Box> split() const {
        Eigen::Index axis = 0;
        (upper - lower).maxCoeff(&axis);
        const double mid = 0.5 * (lower[axis] + upper[axis]);
        Box left = *this, right = *this;
        left.upper[axis] = mid;
        right.lower[axis] = mid;
        return {left, right};
    }
};

/// Outcome on the facet x_axis = (sign < 0 ? lower : upper). min_observed is
/// the smallest value of orientation * sign * g_axis over the facet lattice.
struct FaceCondition {
    int axis = 0;
    int sign = 1;
    bool satisfied = false;
    double min_observed = 0.0;
    std::size_t sample_count = 0;
};

enum class Verdict { certified, refuted, inconclusive };

struct MirandaCertificate {
    Box box;
    std::vector<FaceCondition> conditions;  // axis-major, lower facet first
    std::vector<int> orientation;           // per axis, +1: g_i >= 0 on the upper facet
    std::size_t grid_density = 0;
    Verdict verdict = Verdict::inconclusive;

    double strength() const {
        double s = std::numeric_limits<double>::infinity();
        for (const auto& c : conditions) s = std::min(s, c.min_observed);
        return s;
    }
};

class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, Vec node) : Error(what), node_(std::move(node)) {}
    const Vec& node() const { return node_; }

private:
    Vec node_;
};

using BoxMap = std::function<Vec(const Vec&)>;

inline constexpr std::size_t kDefaultMirandaGrid = 17;
inline constexpr int kDefaultMirandaDepth = 60;

namespace detail {

inline Vec evaluate_checked(const BoxMap& g, const Vec& x, std::ptrdiff_t k) {
    Vec y = g(x);
    if (y.size() != k) throw DimensionError("miranda: map returned " + std::to_string(y.size()) + " components, expected " + std::to_string(k));
    if (!y.allFinite()) throw EvaluationError("miranda: non-finite value", x);
    return y;
}

/// Calls visit(x) on the lattice with `per_axis` nodes on every axis not in
/// `fixed` (fixed axes keep the coordinate already in x).
template <class F>
void for_lattice(const Box& box, std::size_t per_axis, Vec x, std::ptrdiff_t fixed, F&& visit) {
    const std::ptrdiff_t k = box.dim();
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    auto coord = [&](std::ptrdiff_t axis, std::size_t j) {
        if (per_axis == 1) return 0.5 * (box.lower[axis] + box.upper[axis]);
        const double t = static_cast<double>(j) / static_cast<double>(per_axis - 1);
        return j + 1 == per_axis ? box.upper[axis] : box.lower[axis] + t * (box.upper[axis] - box.lower[axis]);
    };
    while (true) {
        for (std::ptrdiff_t a = 0; a < k; ++a) {
            if (a != fixed) x[a] = coord(a, idx[static_cast<std::size_t>(a)]);
        }
        visit(x);
        std::ptrdiff_t a = 0;
        for (; a < k; ++a) {
            if (a == fixed) continue;
            if (++idx[static_cast<std::size_t>(a)] < per_axis) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
        if (a == k) break;
    }
}

}  // namespace detail

/// Samples each of the 2k facets on a grid^(k-1) lattice. Each axis may be
/// oriented either way; the orientation with the larger worst-case margin is
/// reported. Refuted when g_i takes both strict signs on one facet of some
/// axis, since no orientation can then satisfy that axis.
inline MirandaCertificate check_faces(const BoxMap& g, const Box& box, std::size_t grid = kDefaultMirandaGrid) {
    if (grid < 2) throw DomainError("check_faces: grid must be at least 2");
    const std::ptrdiff_t k = box.dim();
    MirandaCertificate cert;
    cert.box = box;
    cert.grid_density = grid;
    cert.orientation.assign(static_cast<std::size_t>(k), 1);
    bool all = true;
    bool refuted = false;
    for (std::ptrdiff_t axis = 0; axis < k; ++axis) {
        // min and max of g_axis on the lower and upper facets
        double lo_min = std::numeric_limits<double>::infinity(), lo_max = -lo_min;
        double hi_min = lo_min, hi_max = -lo_min;
        std::size_t count = 0;
        for (int side = -1; side <= 1; side += 2) {
            Vec x = box.lower;
            x[axis] = side < 0 ? box.lower[axis] : box.upper[axis];
            detail::for_lattice(box, grid, x, axis, [&](const Vec& node) {
                const double gi = detail::evaluate_checked(g, node, k)[axis];
                if (side < 0) {
                    lo_min = std::min(lo_min, gi);
                    lo_max = std::max(lo_max, gi);
                } else {
                    hi_min = std::min(hi_min, gi);
                    hi_max = std::max(hi_max, gi);
                }
                ++count;
            });
        }
        // orientation +1: g <= 0 on lower, g >= 0 on upper
        const double plus = std::min(-lo_max, hi_min);
        const double minus = std::min(lo_min, -hi_max);
        const int orient = plus >= minus ? 1 : -1;
        cert.orientation[static_cast<std::size_t>(axis)] = orient;
        const double lower_margin = orient > 0 ? -lo_max : lo_min;
        const double upper_margin = orient > 0 ? hi_min : -hi_max;
        cert.conditions.push_back({static_cast<int>(axis), -1, lower_margin >= 0.0, lower_margin, count / 2});
        cert.conditions.push_back({static_cast<int>(axis), 1, upper_margin >= 0.0, upper_margin, count / 2});
        all = all && lower_margin >= 0.0 && upper_margin >= 0.0;
        if ((lo_min < 0.0 && lo_max > 0.0) || (hi_min < 0.0 && hi_max > 0.0)) refuted = true;
    }
    cert.verdict = all ? Verdict::certified : (refuted ? Verdict::refuted : Verdict::inconclusive);
    return cert;
}

struct MirandaSearch {
    std::optional<MirandaCertificate> certificate;
    int depth_reached = 0;
    std::size_t boxes_examined = 0;
    bool truncated = false;  // live-box cap was hit at some level
};

/// Breadth-first bisection of the longest axis. A box is discarded when some
/// component keeps one strict sign over a lattice covering the whole box.
/// Boxes of width <= tol are checked as they are, then recentred at full
/// width tol; the first certified box in (depth, creation order) wins.
inline MirandaSearch miranda_search(const BoxMap& g, const Box& box, double tol, int max_depth = kDefaultMirandaDepth,
                                    std::size_t grid = kDefaultMirandaGrid, std::size_t max_live = std::size_t{1} << 14) {
    if (!(tol > 0.0)) throw DomainError("miranda_root: tolerance must be positive");
    if (max_depth < 0) throw DomainError("miranda_root: max_depth must be nonnegative");
    const std::ptrdiff_t k = box.dim();
    // the pruning lattice stays near 4096 nodes per box
    std::size_t prune_nodes = std::max<std::size_t>(
        2, std::min<std::size_t>(grid, static_cast<std::size_t>(std::floor(std::pow(4096.0, 1.0 / static_cast<double>(k))))));

    MirandaSearch out;
    std::vector<Box> level{box};
    for (int depth = 0; depth <= max_depth && !level.empty(); ++depth) {
        out.depth_reached = depth;
        std::vector<Box> next;
        for (const Box& b : level) {
            ++out.boxes_examined;
            Vec lo = Vec::Constant(k, std::numeric_limits<double>::infinity());
            Vec hi = -lo;
            detail::for_lattice(b, prune_nodes, b.lower, -1, [&](const Vec& node) {
                const Vec y = detail::evaluate_checked(g, node, k);
                lo = lo.cwiseMin(y);
                hi = hi.cwiseMax(y);
            });
            if ((lo.array() > 0.0).any() || (hi.array() < 0.0).any()) continue;
            if (b.width() <= tol) {
                MirandaCertificate c = check_faces(g, b, grid);
                if (c.verdict == Verdict::certified) {
                    out.certificate = std::move(c);
                    return out;
                }
                Box wide = Box::around(b.center(), 0.5 * tol);
                // center +- tol/2 can round a few ulps past tol
                for (Eigen::Index i = 0; i < k; ++i) {
                    while (wide.upper[i] - wide.lower[i] > tol) wide.upper[i] = std::nextafter(wide.upper[i], wide.lower[i]);
                }
                c = check_faces(g, wide, grid);
                if (c.verdict == Verdict::certified) {
                    out.certificate = std::move(c);
                    return out;
                }
            }
            auto [left, right] = b.split();
            next.push_back(std::move(left));
            next.push_back(std::move(right));
        }
        if (next.size() > max_live) {
            next.resize(max_live);
            out.truncated = true;
        }
        level = std::move(next);
    }
    return out;
}

inline std::optional<std::pair<Box, MirandaCertificate>> miranda_root(const BoxMap& g, const Box& box, double tol,
                                                                     int max_depth = kDefaultMirandaDepth,
                                                                     std::size_t grid = kDefaultMirandaGrid) {
    MirandaSearch s = miranda_search(g, box, tol, max_depth, grid);
    if (!s.certificate) return std::nullopt;
    Box b = s.certificate->box;
    return std::make_pair(std::move(b), std::move(*s.certificate));
}

}  // namespace hamsplit
