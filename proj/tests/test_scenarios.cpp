#include "helpers.hpp"

using namespace hamsplit;
using hamsplit::testing::vec;

TEST(Scenarios, NamesBuild) {
    for (const auto& name : scenario_names()) {
        const Scenario s = build_scenario(name);
        EXPECT_EQ(s.name, name);
        EXPECT_FALSE(s.alphas.empty());
    }
    EXPECT_THROW(build_scenario("moebius"), DomainError);
    EXPECT_THROW(build_scenario("concentric_discs", {0.1, 0.2, 0.3}), DimensionError);
}

TEST(Scenarios, ConcentricGapOracle) {
    const double d = concentric_gap(0.25);
    EXPECT_NEAR(numerics::disc_cap_fraction(d), 0.25, 1e-14);
    ScenarioConfig c;
    c.scan_resolution = 1024;
    const ScenarioReport r = run_scenario(build_scenario("concentric_discs"), c);
    EXPECT_TRUE(r.pass);
    ASSERT_TRUE(r.analytic_gap);
    EXPECT_NEAR(r.scan->best_norm, *r.analytic_gap, 0.01 * *r.analytic_gap);
}

TEST(Scenarios, RandomSeparatedIsSeparatedAndSolvable) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Scenario s = build_scenario("random_separated", {}, seed, 2);
        const ScenarioReport r = run_scenario(s);
        EXPECT_TRUE(r.pass) << "seed " << seed;
        EXPECT_TRUE(check_separable(support_point_sets(s.problem->measures)).separable);
    }
}

TEST(Scenarios, PentagonTurning) {
    ScenarioConfig c;
    c.curve_grid = 720;
    const ScenarioReport r = run_scenario(build_scenario("pentagon"), c);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.turning, 4);
    EXPECT_GT(*r.centroid_offset, 1e-3);
    const ScenarioReport low = run_scenario(build_scenario("pentagon", {0.05}), c);
    EXPECT_TRUE(low.pass);
    EXPECT_EQ(low.turning, 1);
}

TEST(Scenarios, ThreeCapsGap) {
    const Scenario s = build_scenario("three_caps");
    const ScenarioReport r = run_scenario(s);
    EXPECT_TRUE(r.pass);
    for (const auto& p : r.probes) {
        EXPECT_GT(p.gap, 1.0);
        EXPECT_NEAR(p.gap, scenario_constants::kCapSpacing, 1e-3);
    }
    EXPECT_THROW(discontinuity_probe(build_scenario("pentagon"), 0.5), DomainError);
}
