#include "helpers.hpp"

#include <numbers>

using namespace hamsplit;
using hamsplit::testing::vec;

namespace {

Hyperplane hp(std::initializer_list<double> n, double offset) { return Hyperplane(vec(n).normalized(), offset); }

std::vector<Measure> variants(std::ptrdiff_t n) {
    const Vec o = Vec::Zero(n);
    Vec a = o, b = o;
    a[0] = -1.5;
    b[0] = 1.0;
    b[1] = 0.5;
    std::vector<Measure> out{
        Measure::uniform_ball(o, 1.0),
        Measure::smooth_cap(a, 1.2, 2),
        Measure::mixture({0.3, 0.7}, {Measure::uniform_ball(a, 0.8), Measure::smooth_cap(b, 1.0, 3)}),
        Measure::kernel_cloud({a, b, o}, 0.7, 2),
    };
    if (n == 2) out.push_back(Measure::uniform_polytope({vec({0, 0}), vec({2, 0}), vec({1.5, 1.2}), vec({-0.3, 0.9})}));
    if (n == 3) {
        PointSet cube;
        for (double x : {0.0, 1.0})
            for (double y : {0.0, 1.0})
                for (double z : {0.0, 1.0}) cube.push_back(vec({x, y, z}));
        out.push_back(Measure::uniform_polytope(cube));
    }
    return out;
}

}  // namespace

TEST(Hyperplane, RejectsNonUnitNormal) {
    EXPECT_THROW(Hyperplane(vec({1.0, 1.0}), 0.0), DomainError);
    EXPECT_NO_THROW(Hyperplane::normalized(vec({1.0, 1.0}), 0.0));
    const Hyperplane h = Hyperplane::normalized(vec({3.0, 4.0}), 5.0);
    EXPECT_NEAR(h.offset(), 1.0, 1e-15);
    EXPECT_NEAR(h.normal().norm(), 1.0, 1e-15);
}

TEST(MassHalfspace, DiscOracles) {
    const Measure disc = Measure::uniform_ball(vec({0, 0}), 1.0);
    EXPECT_NEAR(mass_halfspace(disc, hp({1, 0}, 0.0)).value, 0.5, 1e-15);
    EXPECT_EQ(mass_halfspace(disc, hp({1, 0}, 1.0)).value, 0.0);
    // (arccos t - t sqrt(1 - t^2)) / pi
    const double t = 0.5;
    const double exact = (std::acos(t) - t * std::sqrt(1 - t * t)) / std::numbers::pi;
    EXPECT_NEAR(mass_halfspace(disc, hp({1, 0}, t)).value, exact, 1e-14);
    const MassValue mc = mass_halfspace_mc(disc, hp({1, 0}, t), 10'000'000, 11);
    EXPECT_NEAR(mc.value, exact, mc.error_bound);
}

TEST(MassHalfspace, UnitSquareIsOneMinusLambda) {
    const Measure sq = Measure::uniform_polytope(hamsplit::testing::unit_square());
    for (double lambda : {0.0, 0.1, 0.25, 0.75, 0.9, 1.0}) {
        EXPECT_NEAR(mass_halfspace(sq, hp({1, 0}, lambda)).value, 1.0 - lambda, 1e-15);
    }
    EXPECT_EQ(mass_halfspace(sq, hp({1, 0}, 1.5)).value, 0.0);
    EXPECT_EQ(mass_halfspace(sq, hp({1, 0}, -0.5)).value, 1.0);
    EXPECT_TRUE(sq.analytic());
}

TEST(MassHalfspace, BallInThreeDimensions) {
    const Measure ball = Measure::uniform_ball(vec({0, 0, 0}), 2.0);
    // cap of a unit ball at height t: (1 - t)^2 (2 + t) / 4
    for (double t : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
        const double exact = (1 - t) * (1 - t) * (2 + t) / 4.0;
        EXPECT_NEAR(mass_halfspace(ball, hp({0, 0, 1}, 2.0 * t)).value, exact, 1e-14);
    }
}

TEST(MassHalfspace, QuadraturePolytopeReportsBound) {
    PointSet cube;
    for (double x : {0.0, 1.0})
        for (double y : {0.0, 1.0})
            for (double z : {0.0, 1.0}) cube.push_back(vec({x, y, z}));
    const Measure m = Measure::uniform_polytope(cube);
    EXPECT_FALSE(m.analytic());
    const MassValue v = mass_halfspace(m, hp({1, 0, 0}, 0.75));
    EXPECT_GT(v.error_bound, 0.0);
    EXPECT_NEAR(v.value, 0.25, std::max(v.error_bound, 1e-3));
}

TEST(MassHalfspace, DimensionMismatchThrows) {
    const Measure disc = Measure::uniform_ball(vec({0, 0}), 1.0);
    EXPECT_THROW(mass_halfspace(disc, hp({1, 0, 0}, 0.0)), DimensionError);
}

TEST(MassHalfspace, McBeyondSupportIsOne) {
    for (const auto& m : variants(2)) {
        const Ball b = bounding_ball(m);
        const Hyperplane h(vec({0.6, 0.8}), b.center.dot(vec({0.6, 0.8})) - b.radius - 0.1);
        EXPECT_EQ(mass_halfspace_mc(m, h, 20000, 3).value, 1.0);
        EXPECT_EQ(mass_halfspace(m, h).value, 1.0);
    }
}

TEST(MassHalfspace, MonteCarloIsDeterministic) {
    const Measure m = Measure::smooth_cap(vec({0, 0}), 1.0);
    const auto a = mass_halfspace_mc(m, hp({1, 0}, 0.3), 100000, 5);
    const auto b = mass_halfspace_mc(m, hp({1, 0}, 0.3), 100000, 5);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.error_bound, b.error_bound);
}

TEST(BoundingBall, Oracles) {
    const Ball sq = bounding_ball(Measure::uniform_polytope(hamsplit::testing::unit_square()));
    EXPECT_NEAR((sq.center - vec({0.5, 0.5})).norm(), 0.0, 1e-12);
    EXPECT_NEAR(sq.radius, std::sqrt(0.5), 1e-12);
    const Ball mix = bounding_ball(
        Measure::mixture({0.5, 0.5}, {Measure::uniform_ball(vec({-2, 0}), 1), Measure::uniform_ball(vec({2, 0}), 1)}));
    EXPECT_GE(mix.radius, 3.0);
    for (const Vec& p : {vec({-3, 0}), vec({3, 0}), vec({2, 1}), vec({-2, -1})}) {
        EXPECT_LE((p - mix.center).norm(), mix.radius + 1e-12);
    }
}

TEST(Density, Oracles) {
    const Measure disc = Measure::uniform_ball(vec({0, 0}), 1.0);
    EXPECT_NEAR(density_at(disc, vec({0, 0})), 1.0 / std::numbers::pi, 1e-15);
    EXPECT_EQ(density_at(disc, vec({2, 0})), 0.0);
    const PointSet pts{vec({0, 0}), vec({0.5, 0}), vec({3, 3})};
    const double h = 0.8;
    const Measure cloud = Measure::kernel_cloud(pts, h, 2);
    const Vec x = pts[0];
    double expect = 0.0;
    for (const auto& p : pts) {
        const double r2 = (x - p).squaredNorm() / (h * h);
        if (r2 < 1.0) expect += 3.0 / (std::numbers::pi * h * h) * (1 - r2) * (1 - r2);
    }
    EXPECT_NEAR(density_at(cloud, x), expect / 3.0, 1e-14);
}

TEST(MassHalfspace, PropertyComplementAndMonotone) {
    std::mt19937_64 rng(42);
    for (std::ptrdiff_t n : {2, 3}) {
        for (const auto& m : variants(n)) {
            const Ball b = bounding_ball(m);
            const double tol = m.analytic() ? 1e-12 : 2e-3;
            for (int trial = 0; trial < 20; ++trial) {
                const Vec v = hamsplit::testing::random_unit(rng, n);
                const double lambda = b.center.dot(v) + hamsplit::testing::uniform(rng, -b.radius, b.radius);
                const Hyperplane h(v, lambda);
                const double up = mass_halfspace(m, h).value;
                const double down = mass_halfspace(m, h.flipped()).value;
                EXPECT_NEAR(up + down, 1.0, tol);
                EXPECT_GE(up, -1e-15);
                EXPECT_LE(up, 1.0 + 1e-15);
                EXPECT_GE(mass_halfspace(m, h.shifted(-0.05)).value, up - 1e-15);
                EXPECT_LE(mass_halfspace(m, h.shifted(0.05)).value, up + 1e-15);
                EXPECT_NEAR(mass_halfspace(m, h.shifted(1e-9)).value, up, m.analytic() ? 1e-7 : 1e-3);
            }
        }
    }
}

TEST(MassHalfspace, PropertyAgreesWithMonteCarlo) {
    std::mt19937_64 rng(7);
    for (std::ptrdiff_t n : {2, 3}) {
        for (const auto& m : variants(n)) {
            const Ball b = bounding_ball(m);
            for (int trial = 0; trial < 6; ++trial) {
                const Vec v = hamsplit::testing::random_unit(rng, n);
                const Hyperplane h(v, b.center.dot(v) + hamsplit::testing::uniform(rng, -0.6, 0.6) * b.radius);
                const MassValue exact = mass_halfspace(m, h);
                const MassValue mc = mass_halfspace_mc(m, h, 200000, 100 + trial);
                EXPECT_LE(std::abs(exact.value - mc.value), exact.error_bound + 5.0 / 3.0 * mc.error_bound + 1e-9);
            }
        }
    }
}

TEST(Measure, ConstructorsValidate) {
    EXPECT_THROW(Measure::uniform_ball(vec({0, 0}), -1.0), DomainError);
    EXPECT_THROW(Measure::smooth_cap(vec({0, 0}), 1.0, 40), DomainError);
    EXPECT_THROW(Measure::kernel_cloud({vec({0, 0}), vec({0, 0, 0})}, 1.0), DimensionError);
    EXPECT_THROW(Measure::mixture({1.0}, {}), Error);
    EXPECT_THROW(Measure::uniform_polytope({vec({0, 0}), vec({1, 1}), vec({2, 2})}), Error);
}

TEST(Measure, RigidMotionMovesMasses) {
    const Measure m = Measure::uniform_polytope({vec({0, 0}), vec({2, 0}), vec({1.5, 1.2})});
    const double a = 0.7;
    Mat r(2, 2);
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    const Vec shift = vec({3, -1});
    const Measure moved = m.transformed(r, shift);
    const Hyperplane h(vec({0.6, 0.8}), 0.5);
    const Hyperplane moved_h(r * h.normal(), h.offset() + (r * h.normal()).dot(shift));
    EXPECT_NEAR(mass_halfspace(m, h).value, mass_halfspace(moved, moved_h).value, 1e-13);
}
