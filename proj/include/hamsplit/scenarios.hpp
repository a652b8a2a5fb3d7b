#pragma once

// Built-in example configurations with their expected qualitative outcome:
// two planar and one spatial instance without a splitting, the regular
// pentagon's central spheres, the three-cap discontinuity of central spheres,
// and random instances with separated supports.

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hamsplit/auxiliary.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/separability.hpp"
#include "hamsplit/solver.hpp"

namespace hamsplit {

enum class Expected { solvable, not_solvable, turning_number, discontinuity };

inline const char* to_string(Expected e) {
    switch (e) {
        case Expected::solvable:
            return "solvable";
        case Expected::not_solvable:
            return "not_solvable";
        case Expected::turning_number:
            return "turning_number";
        case Expected::discontinuity:
            return "discontinuity";
    }
    return "?";
}

namespace scenario_constants {
inline constexpr double kConcentricOuter = 2.0;
inline constexpr double kConcentricInner = 1.0;
inline constexpr double kConcentricAlpha = 0.25;
inline constexpr double kCollinearSpacing = 3.0;
inline constexpr double kCollinearOuterRadius = 1.0;
inline constexpr double kCollinearMiddleRadius = 2.0;
inline constexpr double kCollinearAlpha = 0.1;
inline constexpr double kPentagonAlpha = 0.5;
inline constexpr double kCapSpacing = 2.5;
inline constexpr double kCapLift = 1.0;  // the middle cap sits above the line, the outer two below
inline constexpr int kCapExponent = 2;
inline constexpr std::size_t kCurveGrid = 1440;
inline constexpr std::size_t kConcentricResolution = 4096;
inline constexpr std::size_t kCollinearResolution = 8192;
}  // namespace scenario_constants

/// A named configuration. Problems carry measures and ratios; probes carry
/// the measure and container of a central-sphere computation.
struct Scenario {
    std::string name;
    Expected expected = Expected::solvable;
    std::vector<double> alphas;
    std::uint64_t seed = 0;  // random_separated only
    std::ptrdiff_t dim = 2;
    std::optional<Problem> problem;
    std::optional<Measure> probe_measure;
    std::optional<ConvexSet> probe_container;
    std::optional<int> expected_turning;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"concentric_discs", "collinear_balls", "pentagon", "three_caps",
                                                "random_separated"};
    return names;
}

/// Regular pentagon with circumradius 1, a vertex on the positive y-axis.
inline PointSet pentagon_vertices() {
    PointSet out;
    for (int k = 0; k < 5; ++k) {
        const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 5.0;
        Vec p(2);
        p << std::cos(a), std::sin(a);
        out.push_back(p);
    }
    return out;
}

inline std::vector<Vec> three_cap_centers() {
    using namespace scenario_constants;
    std::vector<Vec> c(3, Vec(2));
    c[0] << -kCapSpacing, -kCapLift;
    c[1] << 0.0, kCapLift;
    c[2] << kCapSpacing, -kCapLift;
    return c;
}

/// Gap d* of the concentric-disc example: the unit-disc chord offset with
/// cap fraction alpha, by bisection on the closed form. The reduced residual
/// is (r_inner - r_outer) d*.
inline double concentric_gap(double alpha = scenario_constants::kConcentricAlpha) {
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (numerics::disc_cap_fraction(mid) > alpha) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline Measure random_planar_polygon(std::mt19937_64& rng, const Vec& center, double radius) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int count = 3 + static_cast<int>(unit(rng) * 5.0);
    PointSet pts;
    for (int k = 0; k < count; ++k) {
        const double a = 2.0 * std::numbers::pi * (k + 0.8 * unit(rng)) / count;
        const double r = radius * (0.6 + 0.4 * unit(rng));
        Vec p(2);
        p << center[0] + r * std::cos(a), center[1] + r * std::sin(a);
        pts.push_back(p);
    }
    return Measure::uniform_polytope(std::move(pts));
}

/// An analytic measure supported in the ball (center, radius).
inline Measure random_measure(std::mt19937_64& rng, const Vec& center, double radius) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto n = center.size();
    const int kind = static_cast<int>(unit(rng) * (n == 2 ? 5.0 : 4.0));
    switch (kind) {
        case 0:
            return Measure::uniform_ball(center, radius);
        case 1:
            return Measure::smooth_cap(center, radius, 1 + static_cast<int>(unit(rng) * 3.0));
        case 2: {
            std::vector<Vec> pts;
            const double bw = 0.5 * radius;
            for (int k = 0; k < 3; ++k) {
                Vec d = Vec::Zero(n);
                for (Eigen::Index j = 0; j < n; ++j) d[j] = 2.0 * unit(rng) - 1.0;
                if (d.norm() > 1.0) d /= d.norm();
                pts.push_back(center + (radius - bw) * d);
            }
            return Measure::kernel_cloud(std::move(pts), bw);
        }
        case 3: {
            Vec shift = Vec::Zero(n);
            shift[0] = 0.3 * radius;
            return Measure::mixture({0.5 + 0.4 * unit(rng), 0.5},
                                    {Measure::uniform_ball(center - shift, 0.7 * radius),
                                     Measure::smooth_cap(center + shift, 0.7 * radius)});
        }
        default:
            return random_planar_polygon(rng, center, radius);
    }
}

}  // namespace detail

/// n analytic measures with separated supports and ratios in [0.05, 0.95].
/// Rejects and redraws (from the same stream) until the support covers pass
/// check_separable.
inline Problem random_separated_problem(std::uint64_t seed, std::ptrdiff_t n) {
    if (n < 1 || n > 6) throw DomainError("random_separated: dimension must be between 1 and 6");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Problem p;
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            Vec c(n);
            for (Eigen::Index j = 0; j < n; ++j) c[j] = 10.0 * unit(rng) - 5.0;
            const double r = 0.5 + 0.7 * unit(rng);
            p.measures.push_back(detail::random_measure(rng, c, r));
            p.alphas.push_back(0.05 + 0.9 * unit(rng));
        }
        std::vector<PointSet> sets;
        for (const auto& m : p.measures) sets.push_back(covering_points(m));
        if (check_separable(sets).separable) return p;
    }
    throw Error("random_separated: no separated instance found");
}

/// Builds a scenario. `alphas` overrides the default ratios when nonempty.
inline Scenario build_scenario(const std::string& name, const std::vector<double>& alphas = {}, std::uint64_t seed = 7,
                               std::ptrdiff_t dim = 3) {
    using namespace scenario_constants;
    Scenario s;
    s.name = name;
    auto ratios = [&](std::size_t count, double fallback) {
        if (alphas.empty()) return std::vector<double>(count, fallback);
        if (alphas.size() == 1) return std::vector<double>(count, alphas.front());
        if (alphas.size() != count) {
            throw DimensionError("scenario " + name + ": expected " + std::to_string(count) + " ratios, got " +
                                 std::to_string(alphas.size()));
        }
        return alphas;
    };
    if (name == "concentric_discs") {
        s.dim = 2;
        s.alphas = ratios(2, kConcentricAlpha);
        s.expected = Expected::not_solvable;
        const Vec o = Vec::Zero(2);
        s.problem = Problem{{Measure::uniform_ball(o, kConcentricOuter), Measure::uniform_ball(o, kConcentricInner)}, s.alphas, {}};
    } else if (name == "collinear_balls") {
        s.dim = 3;
        s.alphas = ratios(3, kCollinearAlpha);
        s.expected = Expected::not_solvable;
        Vec left = Vec::Zero(3), right = Vec::Zero(3);
        left[0] = -kCollinearSpacing;
        right[0] = kCollinearSpacing;
        s.problem = Problem{{Measure::uniform_ball(left, kCollinearOuterRadius),
                             Measure::uniform_ball(Vec::Zero(3), kCollinearMiddleRadius),
                             Measure::uniform_ball(right, kCollinearOuterRadius)},
                            s.alphas,
                            {}};
    } else if (name == "pentagon") {
        s.dim = 2;
        s.alphas = ratios(1, kPentagonAlpha);
        s.expected = Expected::turning_number;
        if (s.alphas[0] == 0.5) s.expected_turning = 4;
        if (s.alphas[0] == 0.05) s.expected_turning = 1;
        s.probe_measure = Measure::uniform_polytope(pentagon_vertices());
        s.probe_container = ConvexSet::polytope(pentagon_vertices());
    } else if (name == "three_caps") {
        s.dim = 2;
        s.alphas = ratios(1, 1.0 / 3.0);
        s.expected = Expected::discontinuity;
        std::vector<Measure> caps;
        for (const auto& c : three_cap_centers()) caps.push_back(Measure::smooth_cap(c, 1.0, kCapExponent));
        s.probe_measure = Measure::mixture({1.0, 1.0, 1.0}, std::move(caps));
        s.probe_container = ConvexSet::ball(Vec::Zero(2), kCapSpacing + 1.0 + kCapLift);
    } else if (name == "random_separated") {
        s.dim = dim;
        s.seed = seed;
        s.expected = Expected::solvable;
        Problem p = random_separated_problem(seed, dim);
        if (!alphas.empty()) p.alphas = ratios(static_cast<std::size_t>(dim), 0.5);
        s.alphas = p.alphas;
        s.problem = std::move(p);
    } else {
        throw DomainError("unknown scenario '" + name + "'");
    }
    return s;
}

// ---------------------------------------------------------------------------
// Discontinuity of central spheres

struct DiscontinuityProbe {
    double epsilon = 0.0;
    Vec left;   // c(v) for v tilted by -epsilon from vertical
    Vec right;  // c(v) for v tilted by +epsilon
    double gap = 0.0;
    bool left_fallback = false;
    bool right_fallback = false;
};

inline DiscontinuityProbe discontinuity_probe(const Scenario& s, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.1)) throw DomainError("discontinuity_probe: epsilon must lie in (0, 0.1)");
    if (!s.probe_measure || !s.probe_container || s.probe_measure->dim() != 2) {
        throw DomainError("discontinuity_probe: scenario '" + s.name + "' has no planar central-sphere probe");
    }
    auto tilt = [](double e) {
        Vec v(2);
        v << std::sin(e), std::cos(e);
        return v;
    };
    const AuxPoint l = central_sphere_point(*s.probe_measure, *s.probe_container, s.alphas.front(), tilt(-epsilon));
    const AuxPoint r = central_sphere_point(*s.probe_measure, *s.probe_container, s.alphas.front(), tilt(epsilon));
    return {epsilon, l.point, r.point, (l.point - r.point).norm(), l.fallback, r.fallback};
}

// ---------------------------------------------------------------------------
// Running scenarios

struct ScenarioConfig {
    SolverConfig solver;
    std::size_t scan_resolution = 0;  // 0: the scenario's default
    std::size_t curve_grid = scenario_constants::kCurveGrid;
    std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
};

struct ScenarioReport {
    std::string name;
    Expected expected = Expected::solvable;
    std::string observed;
    bool pass = false;
    std::vector<std::string> notes;

    std::optional<SplitOutcome> outcome;
    std::optional<VerifyReport> verify;
    std::optional<ResidualScan> scan;
    std::optional<double> analytic_gap;
    std::optional<CurveSample> curve;
    std::optional<int> turning;
    std::optional<int> turning_refined;
    std::optional<double> centroid_offset;  // max |c(v) - centroid of S|
    std::vector<DiscontinuityProbe> probes;
};

inline ScenarioReport run_scenario(const Scenario& s, const ScenarioConfig& config = {}) {
    using namespace scenario_constants;
    ScenarioReport rep;
    rep.name = s.name;
    rep.expected = s.expected;
    switch (s.expected) {
        case Expected::solvable: {
            rep.outcome = find_split(*s.problem, config.solver);
            if (rep.outcome->found()) {
                rep.verify = verify_split(*s.problem, rep.outcome->split->hyperplane, rep.outcome->mass_tol);
                rep.pass = rep.verify->pass;
                rep.observed = rep.pass ? "solvable" : "solvable (verification failed)";
            } else {
                rep.observed = "not_solvable";
            }
            break;
        }
        case Expected::not_solvable: {
            rep.outcome = find_split(*s.problem, config.solver);
            std::size_t res = config.scan_resolution;
            if (res == 0) res = s.dim == 2 ? kConcentricResolution : kCollinearResolution;
            rep.scan = scan_residual(*s.problem, res, config.solver);
            const double tol = rep.outcome->mass_tol;
            rep.observed = rep.outcome->found() ? "solvable" : "not_solvable";
            rep.pass = !rep.outcome->found() && rep.scan->best_norm > 10.0 * tol;
            if (s.name == "concentric_discs" && s.alphas[0] == s.alphas[1]) {
                rep.analytic_gap = std::abs(kConcentricOuter - kConcentricInner) * concentric_gap(s.alphas[0]);
                rep.pass = rep.pass && rep.scan->best_norm >= *rep.analytic_gap - 1e-4;
            }
            break;
        }
        case Expected::turning_number: {
            const double alpha = s.alphas.front();
            rep.curve = sample_central_sphere(*s.probe_measure, *s.probe_container, alpha, config.curve_grid);
            rep.turning = whitney_index(*rep.curve);
            rep.turning_refined = whitney_index(sample_central_sphere(*s.probe_measure, *s.probe_container, alpha, 2 * config.curve_grid));
            const Vec centroid = s.probe_container->centroid();
            double offset = 0.0;
            for (const auto& p : rep.curve->points) offset = std::max(offset, (p - centroid).norm());
            rep.centroid_offset = offset;
            rep.observed = "turning_number " + std::to_string(*rep.turning);
            rep.pass = rep.turning == rep.turning_refined;
            if (s.expected_turning) rep.pass = rep.pass && *rep.turning == *s.expected_turning;
            if (!s.expected_turning) rep.notes.push_back("no reference turning number for this ratio");
            break;
        }
        case Expected::discontinuity: {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (double e : config.epsilons) {
                rep.probes.push_back(discontinuity_probe(s, e));
                lo = std::min(lo, rep.probes.back().gap);
                hi = std::max(hi, rep.probes.back().gap);
            }
            rep.pass = !rep.probes.empty() && lo > 1.0 && (hi - lo) < 0.1 * lo;
            rep.observed = rep.pass ? "discontinuity" : "no stable gap";
            break;
        }
    }
    return rep;
}

}  // namespace hamsplit
