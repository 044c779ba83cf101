#include <gtest/gtest.h>

#include <random>

#include "hotlane/equilibrium.hpp"
#include "test_support.hpp"

using namespace hotlane;
using hotlane::testing::Congested;
using hotlane::testing::i880;
using hotlane::testing::i880_design;

namespace {

// Reference equilibria from tests/oracles/pin_values.py (50-digit mpmath).
struct Pinned {
    double tau, rho;
    Regime regime;
    double toll, pool, ordinary;
};

constexpr Pinned kPinned[] = {
    {1.0, 0.75, Regime::B, 0.068598066640744408, 0.067399861902910315, 0.86400207145634528},
    {0.5, 0.75, Regime::B, 0.20480382774141505, 0.038076794258047168, 0.75711937800053779},
    {1.0, 0.25, Regime::A1, 0.0, 0.0014934710016483853, 0.99850652899835161},
    {10.0, 0.75, Regime::A1, 0.0, 0.085220469063978433, 0.91477953093602157},
};

TEST(ProbeGap, ZeroAtSymmetricPoint) {
    // rho = 0.5 and probe share 2.5/3.5 equalize lane flows.
    const PopulationParams pop{115.0, 1.5, 8.0};
    const DesignParams d{0.5, 2.0 * pop.gamma_max * 2.5 / 3.5, 2.5};
    EXPECT_NEAR(probe_gap(d, pop, i880().bpr), 0.0, 1e-12);
}

TEST(ProbeGap, I880Reference) {
    EXPECT_NEAR(probe_gap(i880_design(3.0, 0.25), i880().population, i880().bpr), 0.006943106410829162, 1e-12);
}

TEST(ProbeGap, SmallTollApproachesAllOrdinaryGap) {
    const auto& c = i880();
    const double limit = latency_ordinary(c.population.demand, 0.25, c.bpr) - c.bpr.t_free;
    EXPECT_NEAR(probe_gap(i880_design(1e-9, 0.25), c.population, c.bpr), limit, 1e-9);
}

TEST(ProbeGap, ClampsAboveTwiceGammaMax) {
    const auto& c = i880();
    const DesignParams d = i880_design(20.0, 0.5);
    EXPECT_EQ(probe_share(d, c.population), 1.0);
    EXPECT_DOUBLE_EQ(probe_gap(d, c.population, c.bpr),
                     latency_gap({0.0, 1.0, 0.0}, d, c.population.demand, c.bpr));
}

TEST(ClassifyRegime, HighTollIsRegimeA) {
    EXPECT_TRUE(is_regime_a(classify_regime(i880_design(10.0, 0.5), i880().population, i880().bpr)));
}

TEST(ClassifyRegime, TinyTollIsRegimeB) {
    for (double rho : {0.25, 0.5, 0.75})
        EXPECT_EQ(classify_regime(i880_design(1e-4, rho), i880().population, i880().bpr), Regime::B);
}

TEST(ClassifyRegime, A1BetweenScaledProbeAndGammaMax) {
    const auto& c = i880();
    const DesignParams d = i880_design(3.0, 0.25);
    const double scaled = c.population.beta_max * probe_gap(d, c.population, c.bpr);
    ASSERT_LT(scaled, d.tau);
    ASSERT_LT(d.tau, c.population.gamma_max);
    EXPECT_EQ(classify_regime(d, c.population, c.bpr), Regime::A1);
}

TEST(ClassifyRegime, CongestedHighTollIsA2) {
    const Congested k;
    EXPECT_EQ(classify_regime(k.design, k.pop, k.bpr), Regime::A2);
}

TEST(Solve, MatchesPinnedReferences) {
    for (const auto& p : kPinned) {
        SCOPED_TRACE(::testing::Message() << "tau=" << p.tau << " rho=" << p.rho);
        const auto out = solve(i880_design(p.tau, p.rho), i880().population, i880().bpr);
        EXPECT_EQ(out.regime, p.regime);
        EXPECT_NEAR(out.shares.toll, p.toll, 1e-10);
        EXPECT_NEAR(out.shares.pool, p.pool, 1e-10);
        EXPECT_NEAR(out.shares.ordinary, p.ordinary, 1e-10);
        if (is_regime_a(out.regime)) {
            EXPECT_EQ(out.shares.toll, 0.0);
        }
    }
}

TEST(Solve, CongestedA2MatchesReference) {
    const Congested k;
    const auto out = solve(k.design, k.pop, k.bpr);
    EXPECT_EQ(out.regime, Regime::A2);
    EXPECT_EQ(out.shares.toll, 0.0);
    EXPECT_NEAR(out.shares.pool, 0.67206468373259291, 1e-10);
    EXPECT_EQ(out.shares.pool + out.shares.ordinary, 1.0);
    EXPECT_GT(out.shares.pool, probe_share(k.design, k.pop));
    EXPECT_LE(out.residual, 1e-10);
}

// Without a toll the pool share does not depend on tau, so every regime-A
// label must land on the same root, including A2 roots below the probe share
// and A1 roots above 1/2.
TEST(Solve, CongestedRegimeARootIndependentOfLabel) {
    const Congested k;
    const std::pair<double, Regime> cases[] = {
        {1.2, Regime::A2}, {1.35, Regime::A2}, {1.4, Regime::A1}, {2.0, Regime::A1}, {3.0, Regime::A1}};
    for (auto [tau, regime] : cases) {
        const DesignParams d{k.design.rho, tau, k.design.occupancy};
        const auto out = solve(d, k.pop, k.bpr);
        EXPECT_EQ(out.regime, regime) << "tau=" << tau;
        EXPECT_NEAR(out.shares.pool, 0.67206468373259291, 1e-10) << "tau=" << tau;
        EXPECT_LE(out.residual, 1e-10);
        EXPECT_LE(max_norm_distance(region_measures(out.shares, d, k.pop, k.bpr), out.shares), 1e-8);
    }
    const DesignParams below{k.design.rho, 1.35, k.design.occupancy};
    EXPECT_LT(solve(below, k.pop, k.bpr).shares.pool, probe_share(below, k.pop));
}

TEST(SolveA1, RootBelowZeroGapPoint) {
    // At rho = 0.5 the pool-line gap vanishes at s = 2.5 / 3.5.
    const PopulationParams pop{115.0, 1.5, 8.0};
    const DesignParams d{0.5, 15.0, 2.5};
    const auto out = solve_regime_a1(d, pop, i880().bpr);
    EXPECT_LT(out.shares.pool, 2.5 / 3.5);
    EXPECT_GT(out.shares.pool, 0.0);
    EXPECT_LE(out.residual, 1e-10);
}

TEST(SolveA1, NegativeProbeGapStillSolves) {
    // Probe gap is negative at rho = 0.25, tau = 9; the bracket is cut at the gap zero.
    const auto& c = i880();
    const DesignParams d = i880_design(9.0, 0.25);
    ASSERT_LT(probe_gap(d, c.population, c.bpr), 0.0);
    const auto br = a1_bracket(d, c.population, c.bpr);
    EXPECT_LT(br.hi, probe_share(d, c.population));
    const auto out = solve(d, c.population, c.bpr);
    EXPECT_EQ(out.regime, Regime::A1);
    EXPECT_GT(out.gap, 0.0);
    EXPECT_LE(out.residual, 1e-10);
}

TEST(SolveA2, UpperBracketValueIsZero) {
    const Congested k;
    EXPECT_EQ(a2_auxiliary(1.0, k.design, k.pop, k.bpr), 0.0);
    EXPECT_LT(a2_auxiliary(1.0, k.design, k.pop, k.bpr), 0.5 * k.pop.gamma_max / k.pop.beta_max);
}

TEST(SolveB, BracketEndpoints) {
    const auto& c = i880();
    const DesignParams d = i880_design(1.0, 0.75);
    const auto br = b_bracket(d, c.population);
    EXPECT_NEAR(b_auxiliary(br.lo, d, c.population, c.bpr), probe_gap(d, c.population, c.bpr), 1e-14);
    EXPECT_GT(b_auxiliary(br.lo, d, c.population, c.bpr), d.tau / c.population.beta_max);
    EXPECT_NEAR(br.hi, (c.population.gamma_max - d.tau) / c.population.gamma_max, 1e-15);
    EXPECT_NEAR(b_auxiliary(br.hi, d, c.population, c.bpr), 0.0, 1e-12);
}

TEST(SolveB, InteriorShares) {
    const auto& c = i880();
    const DesignParams d = i880_design(0.5, 0.75);
    const auto out = solve(d, c.population, c.bpr);
    ASSERT_EQ(out.regime, Regime::B);
    EXPECT_GT(out.shares.toll, 0.0);
    EXPECT_LT(out.shares.toll, (c.population.gamma_max - d.tau) / c.population.gamma_max);
    EXPECT_GT(out.shares.pool, 0.0);
    EXPECT_GT(out.shares.ordinary, 0.0);
}

TEST(SolveB, ClosureOutsideSimplexThrows) {
    const auto& c = i880();
    try {
        b_closure(1.5, i880_design(1.0, 0.75), c.population);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverErrorKind::InfeasibleClosure);
    }
}

TEST(SolveRegime, WrongRegimeSolverSignalsBracketFailure) {
    // A2 bracket on an A1 point has no sign change.
    const auto& c = i880();
    try {
        solve_regime_a2(i880_design(3.0, 0.25), c.population, c.bpr);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverErrorKind::BracketFailure);
    }
}

TEST(SolveRegime, IterationCapSurfacesNoConvergence) {
    const auto& c = i880();
    SolverOptions opts;
    opts.max_iterations = 5;
    try {
        solve(i880_design(1.0, 0.75), c.population, c.bpr, opts);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverErrorKind::NoConvergence);
    }
}

TEST(SolveRegime, NonPositiveFreeFlowGap) {
    // b so large that the congestion term underflows to zero.
    const PopulationParams pop{1e-3, 1.5, 8.0};
    const BprParams bpr{0.15, 400.0, 22.0, 140.0};
    try {
        solve({0.5, 1.0, 2.5}, pop, bpr);
        FAIL();
    } catch (const SolverError& e) {
        EXPECT_EQ(e.kind(), SolverErrorKind::GapNonPositive);
    }
}

TEST(Solve, RejectsInvalidDesign) {
    EXPECT_THROW(solve({1.0, 1.0, 2.5}, i880().population, i880().bpr), ValidationError);
}

// Interior shares and self-consistency on random calibrations.
TEST(SolveProperty, RandomCalibrations) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int seen[3] = {0, 0, 0};
    for (int trial = 0; trial < 3000; ++trial) {
        const PopulationParams pop{50.0 + 100.0 * u(rng), 0.2 + 2.0 * u(rng), 0.5 + 10.0 * u(rng)};
        const BprParams bpr{0.1 + 1.5 * u(rng), 1.0 + 4.0 * u(rng), 5.0 + 30.0 * u(rng), 100.0 + 100.0 * u(rng)};
        const DesignParams d{0.1 + 0.8 * u(rng), 0.05 + 12.0 * u(rng), 2.0 + u(rng)};
        const auto out = solve(d, pop, bpr);
        ++seen[static_cast<int>(out.regime)];
        ASSERT_TRUE(out.shares.valid());
        EXPECT_GT(out.shares.pool, 0.0);
        EXPECT_GT(out.shares.ordinary, 0.0);
        EXPECT_EQ(out.shares.toll == 0.0, is_regime_a(out.regime));
        EXPECT_LE(out.residual, 1e-10);
        EXPECT_LE(out.iterations, 200);
        const auto again = region_measures(out.shares, d, pop, bpr);
        EXPECT_LE(max_norm_distance(again, out.shares), 1e-8)
            << "regime " << to_string(out.regime) << " rho=" << d.rho << " tau=" << d.tau;
    }
    EXPECT_GT(seen[0], 0);
    EXPECT_GT(seen[1], 0);
    EXPECT_GT(seen[2], 0);
}

TEST(SolveProperty, PerturbedBracketsAgree) {
    const auto& c = i880();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    for (double tau : {0.5, 1.0, 3.0, 9.0}) {
        for (double rho : {0.25, 0.75}) {
            const DesignParams d = i880_design(tau, rho);
            const auto base = solve(d, c.population, c.bpr);
            const double root = base.regime == Regime::B ? base.shares.toll : base.shares.pool;
            const Bracket natural = base.regime == Regime::A1   ? a1_bracket(d, c.population, c.bpr)
                                    : base.regime == Regime::A2 ? a2_bracket(d, c.population)
                                                                : b_bracket(d, c.population);
            SolverOptions opts;
            opts.bracket = Bracket{natural.lo + u(rng) * (root - natural.lo), natural.hi - u(rng) * (natural.hi - root)};
            const auto again = solve(d, c.population, c.bpr, opts);
            EXPECT_LE(max_norm_distance(again.shares, base.shares), 2e-10);
        }
    }
}

}  // namespace
