// One line per acceptance criterion; exit status 1 if any fails.
// Arguments select a subset, e.g. `hamsplit_acceptance 3 6`.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "hamsplit.hpp"

using namespace hamsplit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vec random_unit(std::mt19937_64& rng, std::ptrdiff_t n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (auto& x : v) x = g(rng);
    return v.normalized();
}

Vec random_point(std::mt19937_64& rng, std::ptrdiff_t n, double half) {
    Vec v(n);
    for (auto& x : v) x = uniform(rng, -half, half);
    return v;
}

Measure random_polytope(std::mt19937_64& rng, const Vec& center, double radius, int count) {
    PointSet pts;
    for (int i = 0; i < count; ++i) pts.push_back(center + radius * uniform(rng, 0.6, 1.0) * random_unit(rng, center.size()));
    return Measure::uniform_polytope(std::move(pts));
}

/// Two analytic components around the origin, so supports overlap.
Measure random_mixture(std::mt19937_64& rng, std::ptrdiff_t n) {
    std::vector<Measure> parts;
    for (int k = 0; k < 2; ++k) parts.push_back(detail::random_measure(rng, random_point(rng, n, 1.5), uniform(rng, 0.6, 1.4)));
    return Measure::mixture({uniform(rng, 0.2, 1.0), uniform(rng, 0.2, 1.0)}, std::move(parts));
}

/// mu(H+) by plain bisection on the nonincreasing mass, plateau midpoint.
double lambda_oracle(const Measure& m, const Vec& v, double alpha) {
    double lo = -1e3, hi = 1e3;
    auto edge = [&](auto&& pred) {
        double x = lo, y = hi;
        for (int i = 0; i < 200 && y - x > 1e-13; ++i) {
            const double mid = 0.5 * (x + y);
            (pred(mass_halfspace(m, Hyperplane(v, mid)).value) ? x : y) = mid;
        }
        return 0.5 * (x + y);
    };
    const double a = edge([&](double mass) { return mass > alpha; });
    const double b = edge([&](double mass) { return mass >= alpha; });
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    std::string detail;
    bool pass = true;
    for (std::ptrdiff_t n : {2, 3}) {
        const auto t0 = std::chrono::steady_clock::now();
        int ok = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const Problem p = random_separated_problem(1000 * static_cast<std::uint64_t>(n) + seed, n);
            const SplitOutcome o = find_split(p);
            if (o.found() && o.split->residual_norm <= 1e-6) ++ok;
            if (o.found()) worst = std::max(worst, o.split->residual_norm);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        pass = pass && ok == 100 && secs < 60.0;
        detail += fmt("n=%td %d/100 solved, worst residual %.2e, %.1f s; ", n, ok, worst, secs);
    }
    return {pass, detail};
}

Outcome criterion2() {
    std::string detail;
    bool pass = true;
    for (std::ptrdiff_t n : {2, 3}) {
        std::mt19937_64 rng(200 + static_cast<std::uint64_t>(n));
        int ok = 0, quadrature = 0;
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Problem p;
            for (std::ptrdiff_t i = 0; i < n; ++i) {
                if (n == 3 && i == 0 && trial % 4 == 0) {
                    p.measures.push_back(random_polytope(rng, random_point(rng, 3, 1.0), 1.5, 10));
                } else {
                    p.measures.push_back(random_mixture(rng, n));
                }
                p.alphas.push_back(0.5);
            }
            if (!p.analytic()) ++quadrature;
            const SplitOutcome o = find_split(p);
            if (!o.found()) continue;
            const double tol = default_mass_tol(p);
            worst = std::max(worst, o.split->residual_norm / tol);
            if (o.split->residual_norm <= tol && verify_split(p, o.split->hyperplane, o.mass_tol).pass) ++ok;
        }
        pass = pass && ok == 100;
        detail += fmt("n=%td %d/100 (%d quadrature), worst residual/tol %.2e; ", n, ok, quadrature, worst);
    }
    return {pass, detail};
}

Outcome criterion3() {
    const Scenario conc = build_scenario("concentric_discs");
    const double gap = concentric_gap(scenario_constants::kConcentricAlpha);
    const double s4096 = scan_residual(*conc.problem, 4096).best_norm;
    const double s8192 = scan_residual(*conc.problem, 8192).best_norm;
    const bool conc_ok = std::abs(s4096 - gap) <= 0.01 * gap && std::abs(s8192 - s4096) <= 0.05 * s4096 &&
                         !find_split(*conc.problem).found();
    const Scenario col = build_scenario("collinear_balls");
    const ResidualScan cs = scan_residual(*col.problem, 8192);
    const double tol = default_mass_tol(*col.problem);
    const bool col_ok = cs.best_norm > 10.0 * tol && !find_split(*col.problem).found();
    return {conc_ok && col_ok, fmt("concentric d*=%.6f scan4096=%.6f scan8192=%.6f; collinear scan8192=%.4f vs 10*tol=%.0e",
                                   gap, s4096, s8192, cs.best_norm, 10.0 * tol)};
}

Outcome criterion4() {
    ScenarioConfig c;
    c.curve_grid = 1440;
    const ScenarioReport half = run_scenario(build_scenario("pentagon", {0.5}), c);
    const ScenarioReport low = run_scenario(build_scenario("pentagon", {0.05}), c);
    const bool pass = half.turning == 4 && half.turning_refined == 4 && low.turning == 1 && low.turning_refined == 1 &&
                      *half.centroid_offset > 1e-3;
    return {pass, fmt("alpha=0.5 turning %d/%d, alpha=0.05 turning %d/%d (grid 1440/2880), max |c(v)-centroid| %.4f",
                      *half.turning, *half.turning_refined, *low.turning, *low.turning_refined, *half.centroid_offset)};
}

Outcome criterion5() {
    ScenarioConfig c;
    c.epsilons = {1e-2, 1e-3, 1e-4};
    const ScenarioReport r = run_scenario(build_scenario("three_caps"), c);
    // the limit central points are (+-spacing/2, 0), a chord of length spacing
    const double oracle = scenario_constants::kCapSpacing;
    bool pass = r.pass;
    std::string gaps;
    for (const auto& p : r.probes) {
        pass = pass && std::abs(p.gap - oracle) <= 1e-3;
        gaps += fmt("%.6f ", p.gap);
    }
    return {pass, "gaps at eps 1e-2,1e-3,1e-4: " + gaps + fmt("oracle %.6f", oracle)};
}

Outcome criterion6() {
    std::mt19937_64 rng(600);
    const std::size_t samples = 10'000'000;
    int ok_mass = 0, ok_mc = 0, quadrature = 0;
    double worst_mass = 0.0, worst_z = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Measure m = trial % 3 == 0 ? random_mixture(rng, 2) : detail::random_measure(rng, random_point(rng, 2, 1.0), uniform(rng, 0.8, 2.0));
        std::array<double, 4> a{};
        double total = 0.0;
        for (double& x : a) total += (x = uniform(rng, 0.05, 1.0));
        for (double& x : a) x /= total;
        if (!m.analytic()) ++quadrature;
        const TwoLineOutcome o = two_line_partition(m, a, random_unit(rng, 2));
        if (!o.partition) continue;
        const double tol = m.analytic() ? kAnalyticMassTol : kQuadratureMassTol;
        worst_mass = std::max(worst_mass, o.partition->residual_norm);
        if (o.partition->residual_norm <= tol) ++ok_mass;

        std::array<std::size_t, 4> counts{};
        std::mt19937_64 sampler(6000 + static_cast<std::uint64_t>(trial));
        const Hyperplane& h1 = o.partition->h1;
        const Hyperplane& h2 = o.partition->h2;
        for (std::size_t s = 0; s < samples; ++s) {
            const Vec x = detail::sample(m, sampler);
            ++counts[(h1.contains_positive(x) ? 0 : 1) + (h2.contains_positive(x) ? 0 : 2)];
        }
        bool within = true;
        for (std::size_t q = 0; q < 4; ++q) {
            const double p = o.partition->quadrant_masses[q];
            const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
            const double z = std::abs(static_cast<double>(counts[q]) / static_cast<double>(samples) - p) / sigma;
            worst_z = std::max(worst_z, z);
            within = within && z <= 3.0;
        }
        if (within) ++ok_mc;
    }
    return {ok_mass == 100 && ok_mc == 100,
            fmt("%d/100 quadrants within tol (worst %.2e, %d quadrature), %d/100 within 3 sigma of 1e7 samples (worst %.2f sigma)",
                ok_mass, worst_mass, quadrature, ok_mc, worst_z)};
}

Outcome criterion7() {
    std::mt19937_64 rng(700);
    int ok = 0;
    double widest = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::ptrdiff_t k = 1 + trial % 3;
        Mat a(k, k);
        for (std::ptrdiff_t i = 0; i < k; ++i) {
            const double d = uniform(rng, 0.5, 3.0) * (uniform(rng, 0, 1) < 0.5 ? -1 : 1);
            double off = 0.0;
            for (std::ptrdiff_t j = 0; j < k; ++j) {
                if (j == i) continue;
                a(i, j) = uniform(rng, -1, 1);
                off += std::abs(a(i, j));
            }
            if (off > 0.5 * std::abs(d)) {
                for (std::ptrdiff_t j = 0; j < k; ++j) {
                    if (j != i) a(i, j) *= 0.5 * std::abs(d) / off;
                }
            }
            a(i, i) = d;
        }
        const Vec root = random_point(rng, k, 0.8);
        const Vec b = -a * root;
        const Vec solved = a.fullPivLu().solve(-b);
        const auto r = miranda_root([&](const Vec& x) -> Vec { return a * x + b; }, Box::cube(k), 1e-6, 100);
        if (!r) continue;
        widest = std::max(widest, r->first.width());
        if (r->first.width() <= 1e-6 && r->first.contains(solved, 1e-15) && r->second.verdict == Verdict::certified) ++ok;
    }
    int identity = 0;
    for (std::ptrdiff_t k = 1; k <= 4; ++k) {
        if (check_faces([](const Vec& x) { return x; }, Box::cube(k), 9).verdict == Verdict::certified) ++identity;
    }
    return {ok == 50 && identity == 4,
            fmt("%d/50 affine roots enclosed (widest box %.2e), identity certified for %d/4 cubes", ok, widest, identity)};
}

Outcome criterion8() {
    std::mt19937_64 rng(800);
    auto cloud = [&](std::ptrdiff_t n, double spread, int count) {
        const Vec c = random_point(rng, n, spread);
        const double r = uniform(rng, 0.3, 1.5);
        PointSet pts;
        for (int i = 0; i < count; ++i) pts.push_back(c + random_point(rng, n, r));
        return pts;
    };
    int pairs = 0, separable_pairs = 0;
    for (int t = 0; t < 100; ++t) {
        const std::vector<PointSet> sets{cloud(2, 2.0, 3 + t % 10), cloud(2, 2.0, 3 + (t * 7) % 10)};
        const bool s = check_separable(sets).separable;
        separable_pairs += s ? 1 : 0;
        if (s == hulls_disjoint(sets[0], sets[1])) ++pairs;
    }
    int hulls = 0;
    for (int t = 0; t < 50; ++t) {
        const std::ptrdiff_t n = 2 + t % 2;
        std::vector<PointSet> sets, hull_sets;
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            sets.push_back(cloud(n, 3.0, 12));
            hull_sets.push_back(hull_vertices(sets.back()));
        }
        if (check_separable(sets).separable == check_separable(hull_sets).separable) ++hulls;
    }
    int general = 0, degenerate = 0;
    for (int t = 0; t < 100; ++t) {
        const std::ptrdiff_t n = 2 + t % 2;
        PointSet pts;
        for (std::ptrdiff_t i = 0; i < n; ++i) pts.push_back(random_point(rng, n, 2.0));
        if (t % 4 == 0) {
            pts.back() = n == 2 ? Vec(pts.front()) : Vec(pts.front() + uniform(rng, -1, 2) * (pts[1] - pts.front()));
            ++degenerate;
        }
        std::vector<PointSet> singletons;
        for (const auto& p : pts) singletons.push_back({p});
        if (check_separable(singletons).separable == in_general_position(pts)) ++general;
    }
    return {pairs == 100 && hulls == 50 && general == 100,
            fmt("hull disjointness %d/100 (%d separable), hull equivalence %d/50, general position %d/100 (%d degenerate)",
                pairs, separable_pairs, hulls, general, degenerate)};
}

Outcome criterion9() {
    std::mt19937_64 rng(900);
    struct Variant {
        std::string name;
        Measure m;
    };
    std::vector<Variant> variants;
    for (std::ptrdiff_t n : {2, 3}) {
        const Vec o = Vec::Zero(n);
        Vec a = o, b = o;
        a[0] = -1.0;
        b[0] = 1.0;
        b[1] = 0.5;
        const std::string d = n == 2 ? "2d" : "3d";
        variants.push_back({"ball_" + d, Measure::uniform_ball(o, 1.0)});
        variants.push_back({"cap_" + d, Measure::smooth_cap(a, 1.2, 3)});
        variants.push_back({"polytope_" + d, random_polytope(rng, o, 1.5, n == 2 ? 7 : 12)});
        variants.push_back({"mixture_" + d, Measure::mixture({0.3, 0.7}, {Measure::uniform_ball(a, 0.8), Measure::smooth_cap(b, 1.0, 2)})});
        variants.push_back({"kernel_" + d, Measure::kernel_cloud({a, b, o}, 0.7, 2)});
        Vec nrm = Vec::Zero(n);
        nrm[1] = 1.0;
        variants.push_back({"restricted_" + d, Measure::restricted(Measure::smooth_cap(o, 1.5, 1), Hyperplane(nrm, -0.4))});
    }
    const std::size_t samples = 200'000;
    int configs = 0, agree = 0;
    double worst = 0.0;
    std::string failed;
    for (const auto& var : variants) {
        const Ball ball = bounding_ball(var.m);
                for (int t = 0; t < 50; ++t) {
            const Vec v = random_unit(rng, var.m.dim());
            const Hyperplane h(v, ball.center.dot(v) + uniform(rng, -0.8, 0.8) * ball.radius);
            const MassValue exact = mass_halfspace(var.m, h);
            const MassValue mc = mass_halfspace_mc(var.m, h, samples, 9000 + static_cast<std::uint64_t>(configs));
            // mc.error_bound is 3 sigma; 5 sigma keeps the family of 600 checks meaningful
            const double bound = exact.error_bound + 5.0 / 3.0 * mc.error_bound + 1e-12;
            const double diff = std::abs(exact.value - mc.value);
            worst = std::max(worst, diff / bound);
            ++configs;
            if (diff <= bound) {
                ++agree;
            } else {
                                failed += fmt(" %s exact %.3e mc %.3e;", var.name.c_str(), exact.value, mc.value);
            }
        }
    }

    int residual_ok = 0, residual_checks = 0;
    double worst_residual = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const std::ptrdiff_t n = 2 + static_cast<std::ptrdiff_t>(seed % 2);
        const Problem p = random_separated_problem(9100 + seed, n);
        for (int t = 0; t < 10; ++t) {
            const Vec v = random_unit(rng, n);
            const Vec r = reduced_residual(p, v);
            const double base = lambda_oracle(p.measures[0], v, p.alphas[0]);
            double err = 0.0;
            for (std::ptrdiff_t i = 1; i < n; ++i) {
                const double li = lambda_oracle(p.measures[static_cast<std::size_t>(i)], v, p.alphas[static_cast<std::size_t>(i)]);
                err = std::max(err, std::abs(r[i - 1] - (li - base)));
            }
            worst_residual = std::max(worst_residual, err);
            ++residual_checks;
            if (err <= 1e-9) ++residual_ok;
        }
    }
    return {agree == configs && residual_ok == residual_checks,
            fmt("%d/%d mass configurations within combined bounds (worst ratio %.2f)%s; reduced residual %d/%d within 1e-9 of "
                "bisection oracle (worst %.1e)",
                agree, configs, worst, failed.empty() ? "" : (" failures:" + failed).c_str(), residual_ok, residual_checks,
                worst_residual)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"separated-support solvability", criterion1},
        {"ham sandwich regression", criterion2},
        {"non-existence evidence", criterion3},
        {"pentagon central spheres", criterion4},
        {"central-sphere discontinuity", criterion5},
        {"two-line partition", criterion6},
        {"Miranda soundness", criterion7},
        {"separability consistency", criterion8},
        {"oracle coherence", criterion9},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s [%.1f s] %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, secs, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
