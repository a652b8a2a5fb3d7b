#pragma once

// Two oriented lines cutting a planar measure into four parts of prescribed
// masses. H2 is any line with mu(H2+) = a1 + a2; H1 then splits the two
// conditional measures on either side of H2 with ratios a1/(a1+a2) and
// a3/(a3+a4). Those conditionals live on the two sides of H2 and so are
// separated, which is what makes the second split exist.

#include <array>
#include <cmath>
#include <optional>

#include "hamsplit/auxiliary.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/geometry2d.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/solver.hpp"

namespace hamsplit {

struct ConditionalMeasure {
    Measure measure;       // restricted and renormalized
    Hyperplane halfspace;  // the kept side is its positive side
    double normalizer = 1.0;  // 1 / mu(kept side)
};

/// mu(. intersected with H^side) / mu(H^side).
inline ConditionalMeasure conditional(const Measure& m, const Hyperplane& h, int side) {
    if (side != 1 && side != -1) throw DomainError("conditional: side must be +1 or -1");
    const Hyperplane kept = h.side(side);
    const MassValue mass = mass_halfspace(m, kept);
    if (!(mass.value > 0.0)) throw DomainError("conditional: the chosen side has zero mass");
    return {Measure::restricted(m, kept), kept, 1.0 / mass.value};
}

/// Quadrant order: (H1+ H2+), (H1- H2+), (H1+ H2-), (H1- H2-).
struct QuadPartition {
    Hyperplane h1;
    Hyperplane h2;
    std::array<double, 4> quadrant_masses{};
    std::array<double, 4> alphas{};
    double residual_norm = 0.0;  // max |quadrant - alpha|
};

struct TwoLineOutcome {
    std::optional<QuadPartition> partition;
    Hyperplane h2;
    double lambda1 = 0.0;  // container H+_{v,lambda1} for the upper conditional
    double lambda2 = 0.0;  // container H-_{v,lambda2} for the lower conditional
    std::array<double, 2> container_masses{};
    SplitOutcome split;  // the second-line search, including its scan
};

inline std::array<double, 4> quadrant_masses(const Measure& m, const Hyperplane& h1, const Hyperplane& h2) {
    std::array<double, 4> out{};
    const Hyperplane sides[4][2] = {{h1, h2}, {h1.flipped(), h2}, {h1, h2.flipped()}, {h1.flipped(), h2.flipped()}};
    for (int q = 0; q < 4; ++q) out[static_cast<std::size_t>(q)] = mass_region(m, sides[q]).value;
    return out;
}

namespace detail {

/// The part of the half-plane {<x, v> >= offset} inside a square that covers
/// the support, as a polygon.
inline ConvexSet clipped_halfplane(const Ball& ball, const Vec& v, double offset) {
    const auto square = geometry2d::square(geometry2d::to_point(ball.center), ball.radius + 1.0);
    const auto poly = geometry2d::clip(square, geometry2d::to_point(v), offset);
    PointSet pts;
    for (const auto& p : poly) pts.push_back(geometry2d::to_vec(p));
    return ConvexSet::polytope(std::move(pts));
}

}  // namespace detail

inline TwoLineOutcome two_line_partition(const Measure& m, const std::array<double, 4>& alphas, const Vec& v,
                                         const SolverConfig& config = {}) {
    if (m.dim() != 2) throw UnsupportedError("two_line_partition: only planar measures are supported");
    require_dimension(v.size(), 2, "two_line_partition");
    detail::check_unit(v, "two_line_partition");
    double total = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw DomainError("two_line_partition: every ratio must lie in (0, 1)");
        total += a;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("two_line_partition: ratios must sum to 1");

    TwoLineOutcome out;
    const double upper = alphas[0] + alphas[1];
    const LambdaSolution l2 = solve_lambda(m, v, upper, config.lambda_tol);
    const double lambda = l2.chosen;
    out.h2 = Hyperplane(v, lambda);
    const double mass_tol = config.mass_tol > 0.0 ? config.mass_tol : (m.analytic() ? kAnalyticMassTol : kQuadratureMassTol);
    const double h2_mass = mass_halfspace(m, out.h2).value;
    if (std::abs(h2_mass - upper) > mass_tol) {
        throw Error("two_line_partition: first line misses its target mass (" + std::to_string(h2_mass) + ")");
    }

    const ConditionalMeasure above = conditional(m, out.h2, 1);
    const ConditionalMeasure below = conditional(m, out.h2, -1);
    const double beta1 = alphas[0] / upper;
    const double beta2 = alphas[2] / (alphas[2] + alphas[3]);

    // containers with strict mass slack
    const double need1 = std::max(beta1, 1.0 - beta1);
    const double need2 = std::max(beta2, 1.0 - beta2);
    const double slack1 = std::min(1e-3, 0.5 * (1.0 - need1));
    const double slack2 = std::min(1e-3, 0.5 * (1.0 - need2));
    out.lambda1 = solve_lambda(above.measure, v, need1 + slack1, config.lambda_tol).chosen;
    out.lambda2 = -solve_lambda(below.measure, -v, need2 + slack2, config.lambda_tol).chosen;
    out.container_masses = {mass_halfspace(above.measure, Hyperplane(v, out.lambda1)).value,
                            mass_halfspace(below.measure, Hyperplane(-v, -out.lambda2)).value};
    if (!(out.lambda1 > lambda && lambda > out.lambda2) || !(out.container_masses[0] > need1) ||
        !(out.container_masses[1] > need2)) {
        throw Error("two_line_partition: container construction violated its strict inequalities");
    }

    const Ball ball = bounding_ball(m);
    Problem sub;
    sub.measures = {above.measure, below.measure};
    sub.alphas = {beta1, beta2};
    sub.separators = std::vector<ConvexSet>{detail::clipped_halfplane(ball, v, out.lambda1),
                                            detail::clipped_halfplane(ball, -v, -out.lambda2)};
    SolverConfig sub_config = config;
    sub_config.mass_tol = mass_tol;
    out.split = find_split(sub, sub_config);
    if (!out.split.found()) return out;

    QuadPartition part;
    part.h1 = out.split.split->hyperplane;
    part.h2 = out.h2;
    part.alphas = alphas;
    part.quadrant_masses = quadrant_masses(m, part.h1, part.h2);
    for (std::size_t q = 0; q < 4; ++q) {
        part.residual_norm = std::max(part.residual_norm, std::abs(part.quadrant_masses[q] - alphas[q]));
    }
    out.partition = part;
    return out;
}

inline TwoLineOutcome two_line_partition(const Measure& m, const std::array<double, 4>& alphas,
                                         const SolverConfig& config = {}) {
    Vec v(2);
    v << 0.0, 1.0;
    return two_line_partition(m, alphas, v, config);
}

}  // namespace hamsplit
