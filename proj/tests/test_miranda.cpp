#include "helpers.hpp"

using namespace hamsplit;
using hamsplit::testing::vec;

namespace {

struct Affine {
    Mat a;
    Vec b;
    Vec root() const { return a.partialPivLu().solve(-b); }
    BoxMap map() const {
        return [a = a, b = b](const Vec& x) -> Vec { return a * x + b; };
    }
};

/// Rows dominated by the diagonal, with the off-diagonal sum at most half of
/// |a_ii|, and a root inside [-0.8, 0.8]^k.
Affine random_dominant(std::mt19937_64& rng, std::ptrdiff_t k) {
    Affine f;
    f.a = Mat(k, k);
    for (std::ptrdiff_t i = 0; i < k; ++i) {
        const double d = hamsplit::testing::uniform(rng, 0.5, 3.0) * (hamsplit::testing::uniform(rng, 0, 1) < 0.5 ? -1 : 1);
        double off = 0.0;
        for (std::ptrdiff_t j = 0; j < k; ++j) {
            if (j == i) continue;
            f.a(i, j) = hamsplit::testing::uniform(rng, -1, 1);
            off += std::abs(f.a(i, j));
        }
        const double budget = 0.5 * std::abs(d);
        if (off > budget) {
            for (std::ptrdiff_t j = 0; j < k; ++j) {
                if (j != i) f.a(i, j) *= budget / off;
            }
        }
        f.a(i, i) = d;
    }
    Vec root(k);
    for (auto& x : root) x = hamsplit::testing::uniform(rng, -0.8, 0.8);
    f.b = -f.a * root;
    return f;
}

}  // namespace

TEST(Box, Basics) {
    const Box b(vec({-1, 0}), vec({1, 4}));
    EXPECT_EQ(b.width(), 4.0);
    const auto [l, r] = b.split();
    EXPECT_EQ(l.upper[1], 2.0);
    EXPECT_EQ(r.lower[1], 2.0);
    EXPECT_TRUE(b.contains(vec({0, 4})));
    EXPECT_FALSE(b.contains(vec({0, 4.1})));
    EXPECT_THROW(Box(vec({1, 0}), vec({0, 0})), DomainError);
    EXPECT_THROW(Box(vec({1}), vec({0, 0})), DimensionError);
}

TEST(CheckFaces, IdentityCertified) {
    for (std::ptrdiff_t k = 1; k <= 4; ++k) {
        const MirandaCertificate c = check_faces([](const Vec& x) { return x; }, Box::cube(k), 9);
        EXPECT_EQ(c.verdict, Verdict::certified) << "k = " << k;
        EXPECT_EQ(c.conditions.size(), static_cast<std::size_t>(2 * k));
        EXPECT_NEAR(c.strength(), 1.0, 1e-15);
    }
}

TEST(CheckFaces, CoupledLinearMargins) {
    const MirandaCertificate c =
        check_faces([](const Vec& x) { return vec({x[0] + 0.3 * x[1], x[1] - 0.2 * x[0]}); }, Box::cube(2), 17);
    EXPECT_EQ(c.verdict, Verdict::certified);
    EXPECT_NEAR(c.conditions[0].min_observed, 0.7, 1e-12);
    EXPECT_NEAR(c.conditions[1].min_observed, 0.7, 1e-12);
    EXPECT_NEAR(c.conditions[2].min_observed, 0.8, 1e-12);
    EXPECT_NEAR(c.conditions[3].min_observed, 0.8, 1e-12);
}

TEST(CheckFaces, NoZeroNotCertified) {
    const MirandaCertificate c = check_faces([](const Vec& x) { return vec({x[0] - 2.0}); }, Box::cube(1), 5);
    EXPECT_NE(c.verdict, Verdict::certified);
}

TEST(CheckFaces, SignChangeOnFacetRefutes) {
    // g_0 = x_1 changes sign on both x_0 facets
    const MirandaCertificate c = check_faces([](const Vec& x) { return vec({x[1], x[0]}); }, Box::cube(2), 5);
    EXPECT_EQ(c.verdict, Verdict::refuted);
}

TEST(CheckFaces, NonFiniteValueReportsNode) {
    try {
        check_faces([](const Vec& x) { return vec({x[0] > 0.9 ? std::nan("") : x[0]}); }, Box::cube(1), 3);
        FAIL() << "expected an evaluation error";
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.node()[0], 1.0);
    }
    EXPECT_THROW(check_faces([](const Vec& x) { return x; }, Box::cube(2), 1), DomainError);
}

TEST(CheckFaces, PropertyOrientationInvariance) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const Affine f = random_dominant(rng, 3);
        const BoxMap g = f.map();
        const MirandaCertificate base = check_faces(g, Box::cube(3), 9);
        for (int axis = 0; axis < 3; ++axis) {
            const BoxMap flipped = [&](const Vec& x) {
                Vec y = x;
                y[axis] = -y[axis];
                Vec out = g(y);
                out[axis] = -out[axis];
                return out;
            };
            EXPECT_EQ(check_faces(flipped, Box::cube(3), 9).verdict, base.verdict);
        }
    }
}

TEST(CheckFaces, PropertyRefinementMonotone) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const Affine f = random_dominant(rng, 2);
        const MirandaCertificate c = check_faces(f.map(), Box::cube(2), 9);
        if (c.verdict == Verdict::certified) EXPECT_EQ(check_faces(f.map(), Box::cube(2), 18).verdict, Verdict::certified);
    }
}

TEST(MirandaRoot, DecoupledLinear) {
    const auto r = miranda_root([](const Vec& x) { return vec({x[0] - 0.25, x[1] + 0.5}); }, Box::cube(2), 1e-6, 100);
    ASSERT_TRUE(r);
    EXPECT_LE(r->first.width(), 1e-6);
    EXPECT_TRUE(r->first.contains(vec({0.25, -0.5})));
    EXPECT_EQ(r->second.verdict, Verdict::certified);
}

TEST(MirandaRoot, ConstantMapPruned) {
    const MirandaSearch s = miranda_search([](const Vec&) { return vec({1.0, 1.0}); }, Box::cube(2), 1e-6);
    EXPECT_FALSE(s.certificate);
    EXPECT_EQ(s.boxes_examined, 1u);
    EXPECT_THROW(miranda_search([](const Vec& x) { return x; }, Box::cube(2), 0.0), DomainError);
}

TEST(MirandaRoot, PropertyAffineSoundness) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const std::ptrdiff_t k = 1 + trial % 3;
        const Affine f = random_dominant(rng, k);
        const auto r = miranda_root(f.map(), Box::cube(k), 1e-6, 100);
        ASSERT_TRUE(r) << "trial " << trial;
        EXPECT_LE(r->first.width(), 1e-6);
        EXPECT_TRUE(r->first.contains(f.root(), 1e-15)) << "trial " << trial;
    }
}
