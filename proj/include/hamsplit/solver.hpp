#pragma once

// Search for an (alpha_1..alpha_n)-splitting hyperplane. Each measure's offset
// is eliminated by the monotone solve for lambda_i(v), leaving n-1 equations
// lambda_i(v) = lambda_1(v) on the sphere of normals. The pipeline is a
// lattice scan, then local methods from the best lattice points, then an
// optional Poincare-Miranda certificate for the full map p(v, lambda).

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hamsplit/auxiliary.hpp"
#include "hamsplit/convex_set.hpp"
#include "hamsplit/core.hpp"
#include "hamsplit/measures.hpp"
#include "hamsplit/miranda.hpp"
#include "hamsplit/numerics.hpp"
#include "hamsplit/separability.hpp"

namespace hamsplit {

using numerics::chart_point;
using numerics::sphere_lattice;
using numerics::tangent_frame;

struct Problem {
    std::vector<Measure> measures;
    std::vector<double> alphas;
    std::optional<std::vector<ConvexSet>> separators;

    std::ptrdiff_t dim() const { return measures.empty() ? 0 : measures.front().dim(); }
    bool analytic() const {
        return std::all_of(measures.begin(), measures.end(), [](const Measure& m) { return m.analytic(); });
    }

    void validate() const {
        if (measures.empty()) throw DomainError("problem: no measures");
        const auto n = dim();
        for (const auto& m : measures) require_dimension(m.dim(), n, "problem");
        if (static_cast<std::ptrdiff_t>(measures.size()) != n) {
            throw DimensionError("problem: count != dimension (" + std::to_string(measures.size()) + " measures in R^" +
                                 std::to_string(n) + ")");
        }
        if (alphas.size() != measures.size()) {
            throw DimensionError("problem: " + std::to_string(alphas.size()) + " ratios for " +
                                 std::to_string(measures.size()) + " measures");
        }
        for (double a : alphas) {
            if (!(a >= 0.0 && a <= 1.0)) throw DomainError("problem: ratio outside [0, 1]");
        }
        if (separators) {
            if (separators->size() != measures.size()) throw DimensionError("problem: separator count differs from measure count");
            for (const auto& s : *separators) require_dimension(s.dim(), n, "problem separators");
        }
    }
};

enum class Method { newton, grid, miranda };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::newton:
            return "newton";
        case Method::grid:
            return "grid";
        case Method::miranda:
            return "miranda";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "newton") return Method::newton;
    if (s == "grid") return Method::grid;
    if (s == "miranda") return Method::miranda;
    throw DomainError("unknown method '" + s + "'");
}

inline constexpr double kAnalyticMassTol = 1e-6;
inline constexpr double kQuadratureMassTol = 1e-3;

struct SolverConfig {
    double mass_tol = 0.0;  // 0 selects the default for the problem
    double lambda_tol = kDefaultLambdaTol;
    std::size_t resolution = 0;  // 0 selects the default for the dimension
    std::size_t starts = 8;
    std::uint64_t seed = 0;
    std::vector<Method> methods{Method::newton, Method::grid};
    bool certify = false;
    std::size_t certify_grid = kDefaultMirandaGrid;
    int max_iterations = 40;

    void validate() const {
        if (mass_tol < 0.0 || !std::isfinite(mass_tol)) throw DomainError("solver config: mass_tol must be positive");
        if (!(lambda_tol > 0.0)) throw DomainError("solver config: lambda_tol must be positive");
        if (starts < 1) throw DomainError("solver config: starts must be at least 1");
        if (resolution != 0 && resolution < 8) throw DomainError("solver config: resolution must be at least 8");
        if (methods.empty()) throw DomainError("solver config: empty method list");
        if (max_iterations < 1) throw DomainError("solver config: max_iterations must be at least 1");
        if (certify_grid < 2) throw DomainError("solver config: certify grid must be at least 2");
    }
};

inline double default_mass_tol(const Problem& p) { return p.analytic() ? kAnalyticMassTol : kQuadratureMassTol; }

inline std::size_t default_resolution(std::ptrdiff_t n) {
    if (n <= 1) return 8;
    if (n == 2) return 720;
    if (n == 3) return 512;
    return 4096;
}

struct SplitResult {
    Hyperplane hyperplane;
    std::vector<double> achieved;
    double residual_norm = 0.0;
    Method method = Method::newton;
    std::size_t evaluations = 0;
    bool plateau = false;  // accepted by the plateau-intersection rule
    std::optional<MirandaCertificate> certificate;
};

struct ResidualScan {
    std::size_t resolution = 0;
    Vec best_v;
    double best_norm = std::numeric_limits<double>::infinity();
    std::vector<double> histogram_edges;  // decades 1e-12 .. 1e1; first and last bins are open
    std::vector<std::size_t> histogram;
    std::vector<Vec> normals;
    std::vector<double> norms;
};

struct SplitOutcome {
    std::optional<SplitResult> split;
    ResidualScan scan;
    double mass_tol = 0.0;
    std::optional<bool> separators_separated;  // set when the problem carries separators

    bool found() const { return split.has_value(); }
};

/// p(v, lambda)_i = mu_i(H+_{v,lambda}) - alpha_i.
inline Vec residual_p(const Problem& problem, const Vec& v, double lambda) {
    problem.validate();
    require_dimension(v.size(), problem.dim(), "residual_p");
    detail::check_unit(v, "residual_p");
    const Hyperplane h(v, lambda);
    Vec r(static_cast<Eigen::Index>(problem.measures.size()));
    for (std::size_t i = 0; i < problem.measures.size(); ++i) {
        r[static_cast<Eigen::Index>(i)] = mass_halfspace(problem.measures[i], h).value - problem.alphas[i];
    }
    return r;
}

namespace detail {

inline Vec reduced_from(const std::vector<LambdaSolution>& sols) {
    Vec r(static_cast<Eigen::Index>(sols.size()) - 1);
    for (std::size_t i = 1; i < sols.size(); ++i) r[static_cast<Eigen::Index>(i) - 1] = sols[i].chosen - sols[0].chosen;
    return r;
}


/// A normal together with everything derived from it.
struct Candidate {
    Vec v;
    std::vector<LambdaSolution> sols;
    Vec reduced;
    double lambda = 0.0;
    bool plateau = false;
    std::vector<double> achieved;
    double residual_norm = std::numeric_limits<double>::infinity();
};

/// Evaluation context: problem, tolerances and a call counter.
class Evaluator {
public:
    Evaluator(const Problem& problem, const SolverConfig& config) : problem_(problem), config_(config) {}

    std::vector<LambdaSolution> solve_all(const Vec& v, double lambda_tol) {
        ++evaluations;
        std::vector<LambdaSolution> sols;
        sols.reserve(problem_.measures.size());
        for (std::size_t i = 0; i < problem_.measures.size(); ++i) {
            sols.push_back(solve_lambda(problem_.measures[i], v, problem_.alphas[i], lambda_tol));
        }
        return sols;
    }

    Vec reduced(const Vec& v) { return reduced_from(solve_all(v, config_.lambda_tol)); }

    /// Common offset: midpoint of the intersection of the achieving
    /// intervals when it is nonempty, otherwise the mean of the midpoints.
    Candidate candidate(const Vec& v) {
        Candidate c;
        c.v = v;
        c.sols = solve_all(v, config_.lambda_tol);
        c.reduced = reduced_from(c.sols);
        double lo = -std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
        for (const auto& s : c.sols) {
            lo = std::max(lo, s.lambda_min);
            hi = std::min(hi, s.lambda_max);
            mean += s.chosen;
        }
        mean /= static_cast<double>(c.sols.size());
        if (lo <= hi) {
            c.lambda = 0.5 * (lo + hi);
            for (const auto& s : c.sols) c.plateau |= std::abs(s.chosen - c.lambda) > 10.0 * config_.lambda_tol;
        } else {
            c.lambda = mean;
        }
        const Hyperplane h(v, c.lambda);
        c.achieved.reserve(c.sols.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < problem_.measures.size(); ++i) {
            const double a = mass_halfspace(problem_.measures[i], h).value;
            c.achieved.push_back(a);
            worst = std::max(worst, std::abs(a - problem_.alphas[i]));
        }
        c.residual_norm = worst;
        return c;
    }

    /// Largest quadrature error bound of the problem's masses at v.
    double noise(const Vec& v, double lambda) const {
        double e = 0.0;
        for (const auto& m : problem_.measures) e = std::max(e, mass_halfspace(m, Hyperplane(v, lambda)).error_bound);
        return e;
    }

    const Problem& problem() const { return problem_; }
    const SolverConfig& config() const { return config_; }

    std::size_t evaluations = 0;

private:
    const Problem& problem_;
    const SolverConfig& config_;
};

inline std::vector<Vec> rotated_lattice(std::ptrdiff_t n, std::size_t count, std::uint64_t seed) {
    std::vector<Vec> pts = sphere_lattice(n, count);
    if (seed == 0 || n < 2) return pts;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Mat g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Mat> qr(g);
    const Mat q = qr.householderQ() * Mat::Identity(n, n);
    for (auto& p : pts) p = (q * p).normalized();
    return pts;
}

inline double sphere_area(std::ptrdiff_t n) {
    const double h = 0.5 * static_cast<double>(n);
    return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

inline ResidualScan scan_with(Evaluator& ev, std::size_t resolution, double lambda_tol) {
    const Problem& problem = ev.problem();
    ResidualScan scan;
    scan.resolution = resolution;
    scan.normals = rotated_lattice(problem.dim(), resolution, ev.config().seed);
    scan.norms.reserve(scan.normals.size());
    for (int d = -12; d <= 1; ++d) scan.histogram_edges.push_back(std::pow(10.0, d));
    scan.histogram.assign(scan.histogram_edges.size() + 1, 0);
    for (const auto& v : scan.normals) {
        const double norm = reduced_from(ev.solve_all(v, lambda_tol)).norm();
        scan.norms.push_back(norm);
        const auto bin = static_cast<std::size_t>(
            std::upper_bound(scan.histogram_edges.begin(), scan.histogram_edges.end(), norm) - scan.histogram_edges.begin());
        ++scan.histogram[bin];
        if (norm < scan.best_norm) {
            scan.best_norm = norm;
            scan.best_v = v;
        }
    }
    return scan;
}

/// Lowest lattice points, skipping those within `separation` (radians) of a
/// point already picked. Ties keep lattice order.
inline std::vector<std::size_t> pick_starts(const ResidualScan& scan, std::size_t count, double separation) {
    std::vector<std::size_t> order(scan.norms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scan.norms[a] < scan.norms[b]; });
    std::vector<std::size_t> picked;
    const double min_dot = std::cos(separation);
    for (std::size_t idx : order) {
        if (picked.size() >= count) break;
        bool near = false;
        for (std::size_t p : picked) near |= scan.normals[p].dot(scan.normals[idx]) > min_dot;
        if (!near) picked.push_back(idx);
    }
    return picked;
}

/// Damped Newton on tangent charts re-centred at every step, with a
/// central finite-difference Jacobian.
inline Candidate newton_from(Evaluator& ev, const Vec& start, double mass_tol) {
    const int k = static_cast<int>(start.size()) - 1;
    Vec v = start;
    Candidate best = ev.candidate(v);
    Vec f = best.reduced;
    double fnorm = f.norm();
    for (int it = 0; it < ev.config().max_iterations; ++it) {
        if (best.residual_norm <= 1e-3 * mass_tol || fnorm == 0.0) break;
        const double h = std::max(1e-5, 10.0 * ev.noise(v, best.lambda));
        const Mat frame = tangent_frame(v);
        Mat jac(k, k);
        for (int j = 0; j < k; ++j) {
            const Vec e = Vec::Unit(k, j) * h;
            jac.col(j) = (ev.reduced(chart_point(v, frame, e)) - ev.reduced(chart_point(v, frame, -e))) / (2.0 * h);
        }
        Vec step = jac.colPivHouseholderQr().solve(-f);
        if (!step.allFinite()) break;
        if (step.norm() > 0.5) step *= 0.5 / step.norm();
        bool moved = false;
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            const Vec trial = chart_point(v, frame, t * step);
            Candidate c = ev.candidate(trial);
            const double cn = c.reduced.norm();
            if (cn < fnorm || c.residual_norm < best.residual_norm) {
                v = trial;
                f = c.reduced;
                fnorm = cn;
                if (c.residual_norm <= best.residual_norm) best = std::move(c);
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return best;
}

/// Sign changes of the scalar reduced residual along the circle, refined by
/// bracketing root finding in the angle.
inline std::optional<Candidate> planar_brackets(Evaluator& ev, const ResidualScan& scan, double mass_tol) {
    const std::size_t count = scan.normals.size();
    std::vector<double> angle(count), value(count);
    for (std::size_t i = 0; i < count; ++i) {
        angle[i] = std::atan2(scan.normals[i][1], scan.normals[i][0]);
        value[i] = ev.reduced(scan.normals[i])[0];
    }
    // brackets ordered by the smaller |value| at their ends
    std::vector<std::size_t> brackets;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = (i + 1) % count;
        if ((value[i] <= 0.0 && value[j] >= 0.0) || (value[i] >= 0.0 && value[j] <= 0.0)) brackets.push_back(i);
    }
    std::stable_sort(brackets.begin(), brackets.end(), [&](std::size_t a, std::size_t b) {
        return std::min(std::abs(value[a]), std::abs(value[(a + 1) % count])) <
               std::min(std::abs(value[b]), std::abs(value[(b + 1) % count]));
    });
    auto unit = [](double t) {
        Vec v(2);
        v << std::cos(t), std::sin(t);
        return v;
    };
    std::optional<Candidate> best;
    for (std::size_t i : brackets) {
        const std::size_t j = (i + 1) % count;
        double a = angle[i];
        double b = angle[j];
        if (b <= a) b += 2.0 * std::numbers::pi;
        double fa = value[i], fb = value[j];
        Candidate c;
        if (fa == 0.0) {
            c = ev.candidate(unit(a));
        } else if (fb == 0.0) {
            c = ev.candidate(unit(b));
        } else {
            auto fn = [&](double t) { return ev.reduced(unit(t))[0]; };
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(fn, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
            // both ends of the final bracket, keep the better
            c = ev.candidate(unit(r.first));
            Candidate d = ev.candidate(unit(r.second));
            if (d.residual_norm < c.residual_norm) c = std::move(d);
        }
        if (!best || c.residual_norm < best->residual_norm) best = std::move(c);
        if (best->residual_norm <= mass_tol) break;
    }
    return best;
}

/// Derivative-free fallback: a (2m+1)^(n-1) chart grid around the current
/// point, re-centred on its best node and shrunk by 3 each round.
inline Candidate pattern_search(Evaluator& ev, const Vec& start, double spacing, double mass_tol) {
    const int k = static_cast<int>(start.size()) - 1;
    constexpr int m = 2;
    Candidate best = ev.candidate(start);
    double s = spacing;
    while (s > 1e-13 && best.residual_norm > 1e-3 * mass_tol) {
        const Mat frame = tangent_frame(best.v);
        const Vec center = best.v;
        std::vector<int> idx(static_cast<std::size_t>(k), -m);
        bool improved = false;
        while (true) {
            Vec y(k);
            bool origin = true;
            for (int j = 0; j < k; ++j) {
                y[j] = s * idx[static_cast<std::size_t>(j)];
                origin &= idx[static_cast<std::size_t>(j)] == 0;
            }
            if (!origin) {
                Candidate c = ev.candidate(chart_point(center, frame, y));
                if (c.residual_norm < best.residual_norm) {
                    best = std::move(c);
                    improved = true;
                }
            }
            int j = 0;
            for (; j < k; ++j) {
                if (++idx[static_cast<std::size_t>(j)] <= m) break;
                idx[static_cast<std::size_t>(j)] = -m;
            }
            if (j == k) break;
        }
        if (!improved) s /= 3.0;
    }
    return best;
}

/// Coordinates z = (y, mu): v = chart(v0, y), lambda = lambda0 + mu, and the
/// map M p(v, lambda) with M the inverse finite-difference Jacobian at z = 0,
/// so the map is close to the identity near the candidate.
struct ChartMap {
    Vec v0;
    Mat frame;
    double lambda0 = 0.0;
    Mat precondition;

    Vec point(const Vec& z) const { return chart_point(v0, frame, z.head(z.size() - 1)); }
    double offset(const Vec& z) const { return lambda0 + z[z.size() - 1]; }
};

inline std::optional<ChartMap> chart_map(const Problem& problem, const Vec& v0, double lambda0, double h) {
    const auto n = v0.size();
    ChartMap cm{v0, tangent_frame(v0), lambda0, Mat()};
    auto p = [&](const Vec& z) { return residual_p(problem, cm.point(z), cm.offset(z)); };
    Mat jac(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Vec e = Vec::Unit(n, j) * h;
        jac.col(j) = (p(e) - p(-e)) / (2.0 * h);
    }
    Eigen::FullPivLU<Mat> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    cm.precondition = lu.inverse();
    if (!cm.precondition.allFinite()) return std::nullopt;
    return cm;
}

}  // namespace detail

/// Miranda certificate for p around a hyperplane, in preconditioned chart
/// coordinates. Box half-widths grow by 10 from the estimated distance to the
/// root until the facets pass or the box reaches 0.1.
inline std::optional<MirandaCertificate> certify_split(const Problem& problem, const Hyperplane& h,
                                                       std::size_t grid = kDefaultMirandaGrid) {
    problem.validate();
    double noise = 0.0;
    for (const auto& m : problem.measures) noise = std::max(noise, mass_halfspace(m, h).error_bound);
    const double fd = std::max(1e-6, 10.0 * noise);
    const auto cm = detail::chart_map(problem, h.normal(), h.offset(), fd);
    if (!cm) return std::nullopt;
    const auto n = h.dim();
    const BoxMap g = [&](const Vec& z) -> Vec { return cm->precondition * residual_p(problem, cm->point(z), cm->offset(z)); };
    const double dist = g(Vec::Zero(n)).cwiseAbs().maxCoeff();
    std::optional<MirandaCertificate> last;
    for (double r = std::max({2.0 * dist, 1e-9, 4.0 * noise}); r <= 0.1; r *= 10.0) {
        MirandaCertificate c = check_faces(g, Box::cube(n, r), grid);
        if (c.verdict == Verdict::certified) return c;
        last = std::move(c);
    }
    return last;
}

inline ResidualScan scan_residual(const Problem& problem, std::size_t resolution, const SolverConfig& config = {}) {
    problem.validate();
    if (resolution < 8) throw DomainError("scan_residual: resolution must be at least 8");
    detail::Evaluator ev(problem, config);
    return detail::scan_with(ev, resolution, config.lambda_tol);
}

/// lambda_i(v) - lambda_1(v) for i = 2..n.
inline Vec reduced_residual(const Problem& problem, const Vec& v, double lambda_tol = kDefaultLambdaTol) {
    problem.validate();
    require_dimension(v.size(), problem.dim(), "reduced_residual");
    SolverConfig config;
    config.lambda_tol = lambda_tol;
    detail::Evaluator ev(problem, config);
    return ev.reduced(v);
}

inline SplitOutcome find_split(const Problem& problem, const SolverConfig& config = {}) {
    problem.validate();
    config.validate();
    const auto n = problem.dim();
    const double mass_tol = config.mass_tol > 0.0 ? config.mass_tol : default_mass_tol(problem);
    detail::Evaluator ev(problem, config);
    SplitOutcome out;
    out.mass_tol = mass_tol;
    if (problem.separators && static_cast<std::size_t>(n) == problem.separators->size()) {
        std::vector<PointSet> sets;
        for (const auto& s : *problem.separators) sets.push_back(separator_points(s));
        out.separators_separated = check_separable(sets).separable;
    }

    const std::size_t resolution = config.resolution > 0 ? config.resolution : default_resolution(n);
    // the scan only ranks normals; a coarse offset tolerance is enough there
    out.scan = detail::scan_with(ev, resolution, std::max(config.lambda_tol, 1e-9));

    auto accept = [&](detail::Candidate c, Method method) {
        SplitResult r{Hyperplane(c.v, c.lambda), std::move(c.achieved), c.residual_norm, method, 0, c.plateau, {}};
        out.split = std::move(r);
    };

    if (n == 1) {
        // both normals are in the lattice; take the better one
        detail::Candidate best = ev.candidate(out.scan.normals[0]);
        detail::Candidate other = ev.candidate(out.scan.normals[1]);
        if (other.residual_norm < best.residual_norm) best = std::move(other);
        if (best.residual_norm <= mass_tol) accept(std::move(best), Method::grid);
    } else {
        const double spacing = std::pow(detail::sphere_area(n) / static_cast<double>(resolution), 1.0 / static_cast<double>(n - 1));
        const auto starts = detail::pick_starts(out.scan, config.starts, 2.0 * spacing);
        for (Method method : config.methods) {
            if (out.split) break;
            if (method == Method::newton) {
                for (std::size_t s : starts) {
                    detail::Candidate c = detail::newton_from(ev, out.scan.normals[s], mass_tol);
                    if (c.residual_norm <= mass_tol) {
                        accept(std::move(c), Method::newton);
                        break;
                    }
                }
            } else if (method == Method::grid) {
                if (n == 2) {
                    auto c = detail::planar_brackets(ev, out.scan, mass_tol);
                    if (c && c->residual_norm <= mass_tol) accept(std::move(*c), Method::grid);
                }
                if (!out.split) {
                    for (std::size_t s : starts) {
                        detail::Candidate c = detail::pattern_search(ev, out.scan.normals[s], spacing, mass_tol);
                        if (c.residual_norm <= mass_tol) {
                            accept(std::move(c), Method::grid);
                            break;
                        }
                    }
                }
            } else {
                // localize a zero of the preconditioned p around each start
                for (std::size_t s : starts) {
                    const detail::Candidate c0 = ev.candidate(out.scan.normals[s]);
                    const double fd = std::max(1e-6, 10.0 * ev.noise(c0.v, c0.lambda));
                    const auto cm = detail::chart_map(problem, c0.v, c0.lambda, fd);
                    if (!cm) continue;
                    const BoxMap g = [&](const Vec& z) -> Vec {
                        ++ev.evaluations;
                        return cm->precondition * residual_p(problem, cm->point(z), cm->offset(z));
                    };
                    const auto found = miranda_root(g, Box::cube(n, spacing), 1e-10, 40 * static_cast<int>(n), 5);
                    if (!found) continue;
                    detail::Candidate c = ev.candidate(cm->point(found->first.center()));
                    if (c.residual_norm <= mass_tol) {
                        accept(std::move(c), Method::miranda);
                        break;
                    }
                }
            }
        }
    }
    if (out.split) {
        if (config.certify) out.split->certificate = certify_split(problem, out.split->hyperplane, config.certify_grid);
        out.split->evaluations = ev.evaluations;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Independent re-check

/// The same measure with every quadrature budget doubled.
inline Measure refined_measure(const Measure& m) {
    return std::visit(
        [&](const auto& x) -> Measure {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, UniformPolytope>) {
                if (!x.cloud) return m;
                return Measure::uniform_polytope(x.vertices, 2 * x.quadrature_nodes);
            } else if constexpr (std::is_same_v<T, Mixture>) {
                std::vector<Measure> parts;
                for (const auto& p : x.parts) parts.push_back(refined_measure(p));
                return Measure::mixture(x.weights, std::move(parts));
            } else if constexpr (std::is_same_v<T, Restricted>) {
                return Measure::restricted(refined_measure(*x.base), x.halfspace);
            } else {
                return m;
            }
        },
        m.model());
}

struct VerifyReport {
    bool pass = false;
    double tol = 0.0;
    std::vector<double> refined;
    std::vector<double> refined_error;
    std::vector<double> monte_carlo;
    std::vector<double> monte_carlo_error;  // three-sigma Wilson bound
    double residual_norm = 0.0;             // max |refined - alpha|
};

inline constexpr std::size_t kVerifySamples = 200000;

/// Passes when the refined masses are within tol (plus their error bound)
/// of alpha, and the Monte-Carlo estimates agree with both within a
/// five-sigma band.
inline VerifyReport verify_split(const Problem& problem, const Hyperplane& h, double tol,
                                 std::size_t samples = kVerifySamples, std::uint64_t seed = 1) {
    problem.validate();
    require_dimension(h.dim(), problem.dim(), "verify_split");
    VerifyReport rep;
    rep.tol = tol;
    rep.pass = true;
    for (std::size_t i = 0; i < problem.measures.size(); ++i) {
        const MassValue fine = mass_halfspace(refined_measure(problem.measures[i]), h);
        const MassValue mc = mass_halfspace_mc(problem.measures[i], h, samples, seed + i);
        rep.refined.push_back(fine.value);
        rep.refined_error.push_back(fine.error_bound);
        rep.monte_carlo.push_back(mc.value);
        rep.monte_carlo_error.push_back(mc.error_bound);
        const double alpha = problem.alphas[i];
        const double band = 5.0 / 3.0 * std::max(mc.error_bound, 3.0 / static_cast<double>(samples));
        rep.residual_norm = std::max(rep.residual_norm, std::abs(fine.value - alpha));
        if (std::abs(fine.value - alpha) > tol + fine.error_bound) rep.pass = false;
        if (std::abs(mc.value - alpha) > tol + band) rep.pass = false;
        if (std::abs(mc.value - fine.value) > fine.error_bound + band) rep.pass = false;
    }
    return rep;
}

}  // namespace hamsplit
