#include "helpers.hpp"

#include <numbers>
#include <numeric>

using namespace hamsplit;
using hamsplit::testing::vec;

namespace {

Problem separated_discs(double a1 = 0.3, double a2 = 0.7) {
    return Problem{{Measure::uniform_ball(vec({-3, 0}), 1), Measure::uniform_ball(vec({3, 0}), 1)}, {a1, a2}, {}};
}

Problem concentric(double alpha = 0.25) {
    return Problem{{Measure::uniform_ball(vec({0, 0}), 2), Measure::uniform_ball(vec({0, 0}), 1)}, {alpha, alpha}, {}};
}

Mat rotation2(double a) {
    Mat r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

}  // namespace

TEST(Problem, CountMustMatchDimension) {
    Problem p = separated_discs();
    p.measures.push_back(Measure::uniform_ball(vec({0, 3}), 1));
    p.alphas.push_back(0.5);
    try {
        p.validate();
        FAIL() << "expected a dimension error";
    } catch (const DimensionError& e) {
        EXPECT_NE(std::string(e.what()).find("count != dimension"), std::string::npos);
    }
}

TEST(SolverConfig, Validation) {
    SolverConfig c;
    c.mass_tol = -1;
    EXPECT_THROW(find_split(separated_discs(), c), DomainError);
    c = {};
    c.starts = 0;
    EXPECT_THROW(find_split(separated_discs(), c), DomainError);
    c = {};
    c.resolution = 4;
    EXPECT_THROW(find_split(separated_discs(), c), DomainError);
    EXPECT_THROW(scan_residual(separated_discs(), 4), DomainError);
    EXPECT_EQ(method_from_string("miranda"), Method::miranda);
    EXPECT_THROW(method_from_string("simplex"), DomainError);
}

TEST(ResidualP, Oracles) {
    EXPECT_NEAR(residual_p(concentric(0.5), vec({0.6, 0.8}), 0.0).norm(), 0.0, 1e-15);
    const Problem p{{Measure::uniform_polytope(hamsplit::testing::unit_square()), Measure::uniform_ball(vec({4, 0}), 1)},
                    {0.25, 0.5},
                    {}};
    const Vec r = residual_p(p, vec({1, 0}), 0.75);
    EXPECT_NEAR(r[0], 0.0, 1e-15);
    EXPECT_NEAR(r[1], 0.5, 1e-15);
    EXPECT_THROW(residual_p(p, vec({1, 0, 0}), 0.0), DimensionError);
}

TEST(ResidualP, AgreesWithMonteCarlo) {
    const Problem p{{Measure::smooth_cap(vec({-1, 0}), 1.5), Measure::uniform_polytope({vec({0, 0}), vec({2, 0}), vec({1, 2})})},
                    {0.4, 0.6},
                    {}};
    const Vec v = vec({0.6, 0.8});
    const Vec r = residual_p(p, v, 0.3);
    for (int i = 0; i < 2; ++i) {
        const MassValue mc = mass_halfspace_mc(p.measures[static_cast<std::size_t>(i)], Hyperplane(v, 0.3), 400000, 9 + i);
        EXPECT_NEAR(r[i] + p.alphas[static_cast<std::size_t>(i)], mc.value, mc.error_bound + 1e-12);
    }
}

TEST(ReducedResidual, TranslatedDiscsSymmetric) {
    const Problem p{{Measure::uniform_ball(vec({-2, 1}), 1), Measure::uniform_ball(vec({2, 1}), 1)}, {0.3, 0.3}, {}};
    EXPECT_NEAR(reduced_residual(p, vec({0, 1}))[0], 0.0, 1e-12);
    EXPECT_NEAR(reduced_residual(p, vec({0, -1}))[0], 0.0, 1e-12);
}

TEST(ReducedResidual, ConcentricGapIsConstant) {
    const double d = concentric_gap(0.25);
    // (arccos d - d sqrt(1 - d^2)) / pi = 1/4
    EXPECT_NEAR((std::acos(d) - d * std::sqrt(1 - d * d)) / std::numbers::pi, 0.25, 1e-14);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        EXPECT_NEAR(std::abs(reduced_residual(concentric(), hamsplit::testing::random_unit(rng, 2))[0]), d, 1e-10);
    }
}

TEST(ScanResidual, HistogramAndMinimum) {
    const ResidualScan s = scan_residual(concentric(), 512);
    EXPECT_EQ(s.normals.size(), 512u);
    EXPECT_EQ(std::accumulate(s.histogram.begin(), s.histogram.end(), std::size_t{0}), 512u);
    EXPECT_EQ(s.best_norm, *std::min_element(s.norms.begin(), s.norms.end()));
    EXPECT_NEAR(s.best_norm, concentric_gap(0.25), 1e-6);
}

TEST(FindSplit, SeparatedDiscs) {
    const Problem p = separated_discs();
    SolverConfig c;
    c.certify = true;
    const SplitOutcome o = find_split(p, c);
    ASSERT_TRUE(o.found());
    EXPECT_LE(o.split->residual_norm, 1e-6);
    EXPECT_NEAR(o.split->achieved[0], 0.3, 1e-6);
    EXPECT_NEAR(o.split->achieved[1], 0.7, 1e-6);
    EXPECT_TRUE(verify_split(p, o.split->hyperplane, o.mass_tol).pass);
    ASSERT_TRUE(o.split->certificate);
    EXPECT_EQ(o.split->certificate->verdict, Verdict::certified);
}

TEST(FindSplit, EveryMethodAloneSucceeds) {
    const Problem p = separated_discs(0.2, 0.9);
    for (Method m : {Method::newton, Method::grid, Method::miranda}) {
        SolverConfig c;
        c.methods = {m};
        const SplitOutcome o = find_split(p, c);
        ASSERT_TRUE(o.found()) << to_string(m);
        EXPECT_EQ(o.split->method, m);
        EXPECT_LE(o.split->residual_norm, 1e-6);
    }
}

TEST(FindSplit, ConcentricNotFound) {
    const SplitOutcome o = find_split(concentric());
    EXPECT_FALSE(o.found());
    EXPECT_GE(o.scan.best_norm, concentric_gap(0.25) * (1 - 1e-6));
}

TEST(FindSplit, SharedCenterHalves) {
    const Problem p{{Measure::uniform_ball(vec({1, 1, 0}), 2), Measure::smooth_cap(vec({1, 1, 0}), 1),
                     Measure::mixture({1, 1}, {Measure::uniform_ball(vec({0, 1, 0}), 0.5), Measure::uniform_ball(vec({2, 1, 0}), 0.5)})},
                    {0.5, 0.5, 0.5},
                    {}};
    const SplitOutcome o = find_split(p);
    ASSERT_TRUE(o.found());
    EXPECT_NEAR(o.split->hyperplane.signed_distance(vec({1, 1, 0})), 0.0, 1e-6);
}

TEST(FindSplit, DeterministicForAnalytic) {
    const Problem p = random_separated_problem(3, 3);
    const SplitOutcome a = find_split(p), b = find_split(p);
    ASSERT_TRUE(a.found());
    ASSERT_TRUE(b.found());
    EXPECT_EQ(a.split->hyperplane.offset(), b.split->hyperplane.offset());
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(a.split->hyperplane.normal()[i], b.split->hyperplane.normal()[i]);
    EXPECT_EQ(a.split->evaluations, b.split->evaluations);
}

TEST(FindSplit, SeparatorsChecked) {
    Problem p = separated_discs();
    p.separators = std::vector<ConvexSet>{ConvexSet::ball(vec({-3, 0}), 1), ConvexSet::ball(vec({3, 0}), 1)};
    const SplitOutcome o = find_split(p);
    ASSERT_TRUE(o.separators_separated);
    EXPECT_TRUE(*o.separators_separated);
}

TEST(VerifySplit, DisplacedHyperplaneFails) {
    const Problem p{{Measure::smooth_cap(vec({-3, 0}), 1.2), Measure::smooth_cap(vec({3, 0.5}), 1.0)}, {0.35, 0.6}, {}};
    const SplitOutcome o = find_split(p);
    ASSERT_TRUE(o.found());
    EXPECT_TRUE(verify_split(p, o.split->hyperplane, o.mass_tol).pass);
    const Hyperplane moved = o.split->hyperplane.shifted(0.1);
    const VerifyReport r = verify_split(p, moved, o.mass_tol);
    EXPECT_FALSE(r.pass);
    // local slope by central difference
    double expect = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double h = 1e-5;
        const double slope = (mass_halfspace(p.measures[i], o.split->hyperplane.shifted(h)).value -
                              mass_halfspace(p.measures[i], o.split->hyperplane.shifted(-h)).value) /
                             (2 * h);
        expect = std::max(expect, std::abs(slope) * 0.1);
    }
    EXPECT_NEAR(r.residual_norm, expect, 0.25 * expect);
}

TEST(VerifySplit, EmptyPositiveSide) {
    Problem p = separated_discs(0.0, 0.0);
    EXPECT_TRUE(verify_split(p, Hyperplane(vec({1, 0}), 10.0), 1e-6).pass);
}

TEST(FindSplit, PropertyAntipodalComplement) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Problem p = random_separated_problem(seed, 2);
        const SplitOutcome a = find_split(p);
        ASSERT_TRUE(a.found()) << "seed " << seed;
        Problem q = p;
        for (double& x : q.alphas) x = 1.0 - x;
        const Hyperplane neg = a.split->hyperplane.flipped();
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(mass_halfspace(q.measures[i], neg).value, q.alphas[i], 1e-6) << "seed " << seed;
        }
        const SplitOutcome b = find_split(q);
        ASSERT_TRUE(b.found()) << "seed " << seed;
        EXPECT_LE(b.split->residual_norm, 1e-6);
    }
}

TEST(FindSplit, PropertyRotationInvariance) {
    for (std::uint64_t seed = 11; seed <= 20; ++seed) {
        const Problem p = random_separated_problem(seed, 2);
        const SplitOutcome a = find_split(p);
        ASSERT_TRUE(a.found());
        const Mat r = rotation2(0.37 * static_cast<double>(seed));
        Problem q = p;
        for (auto& m : q.measures) m = m.transformed(r, Vec::Zero(2));
        const SplitOutcome b = find_split(q);
        ASSERT_TRUE(b.found());
        EXPECT_LE(b.split->residual_norm, std::max(2 * a.split->residual_norm, 1e-6));
        // the rotated original solution also solves the rotated problem
        const Hyperplane rotated(r * a.split->hyperplane.normal(), a.split->hyperplane.offset());
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_NEAR(mass_halfspace(q.measures[i], rotated).value, p.alphas[i], 2e-6);
        }
    }
}

TEST(FindSplit, QuadratureToleranceDefault) {
    PointSet cube;
    for (double x : {0.0, 1.0})
        for (double y : {0.0, 1.0})
            for (double z : {0.0, 1.0}) cube.push_back(vec({x - 4, y, z}));
    const Problem p{{Measure::uniform_polytope(cube), Measure::uniform_ball(vec({0, 3, 0}), 1), Measure::uniform_ball(vec({3, -1, 1}), 1)},
                    {0.3, 0.6, 0.45},
                    {}};
    const SplitOutcome o = find_split(p);
    EXPECT_EQ(o.mass_tol, kQuadratureMassTol);
    ASSERT_TRUE(o.found());
    EXPECT_LE(o.split->residual_norm, 1e-3);
    EXPECT_TRUE(verify_split(p, o.split->hyperplane, o.mass_tol).pass);
}
