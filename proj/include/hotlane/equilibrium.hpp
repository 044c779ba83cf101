#pragma once

// Wardrop equilibrium of the HOT-lane game under a uniform type distribution.
//
// Every design point falls in one of three regimes, decided by the latency gap
// at the probe profile (0, p, 1 - p) with p = tau / (2 gamma_max):
//
//   B   tau < min(gamma_max, beta_max * probe_gap)     some travellers pay
//   A2  otherwise, if gamma_max < beta_max * probe_gap  (forces tau > gamma_max)
//   A1  otherwise
//
// Each regime reduces to a scalar equation whose left side is monotone in a
// single share, so the equilibrium is found by bisection:
//
//   A1  pool = (beta_max / (2 gamma_max)) * gap(0, pool, 1 - pool)
//   A2  ordinary = (gamma_max / (2 beta_max)) / gap(0, 1 - ordinary, ordinary)
//   B   toll = (1 - tau / (beta_max * gap(sigma))) * (gamma_max - tau) / gamma_max
//       with pool = (tau / 2) * (toll / (gamma_max - tau) + 1 / gamma_max).
//
// The A1 equation assumes a triangular pool region and holds only up to
// pool = 1/2; the A2 equation holds above it. Either A label solves whichever
// one applies at its root, so the labels follow the classifier while the
// shares always match region_measures.

#include <algorithm>
#include <optional>
#include <string_view>

#include "hotlane/bisection.hpp"
#include "hotlane/latency.hpp"
#include "hotlane/population.hpp"

namespace hotlane {

enum class Regime { A1, A2, B };

constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::A1: return "A1";
        case Regime::A2: return "A2";
        case Regime::B: return "B";
    }
    return "?";
}

constexpr bool is_regime_a(Regime r) noexcept { return r != Regime::B; }

struct Bracket {
    double lo = 0.0;
    double hi = 1.0;
};

struct SolverOptions {
    double tolerance = 1e-12;  // on the share variable
    double residual_tolerance = 1e-10;
    int max_iterations = 200;
    /// Replaces the natural bracket of the regime equation. Used to restart
    /// the search from a different interval.
    std::optional<Bracket> bracket;
};

struct EquilibriumOutcome {
    StrategyShares shares;
    Regime regime = Regime::A1;
    double gap = 0.0;  // C_o - C_h at the equilibrium, minutes
    LaneFlows flows;
    double residual = 0.0;
    int iterations = 0;
};

/// The pool share of the probe profile, clamped to 1 when tau >= 2 gamma_max.
inline double probe_share(const DesignParams& design, const PopulationParams& pop) noexcept {
    return std::min(design.tau / (2.0 * pop.gamma_max), 1.0);
}

inline double pool_line_gap(double pool, const DesignParams& design, const PopulationParams& pop,
                            const BprParams& bpr) {
    return latency_gap({0.0, pool, 1.0 - pool}, design, pop.demand, bpr);
}

inline double probe_gap(const DesignParams& design, const PopulationParams& pop, const BprParams& bpr) {
    return pool_line_gap(probe_share(design, pop), design, pop, bpr);
}

/// Boundary designs (equality in either regime condition) are assigned to A.
inline Regime classify_regime(const DesignParams& design, const PopulationParams& pop,
                              const BprParams& bpr) {
    const double scaled = pop.beta_max * probe_gap(design, pop, bpr);
    if (design.tau < std::min(pop.gamma_max, scaled)) return Regime::B;
    if (pop.gamma_max < scaled) return Regime::A2;
    return Regime::A1;
}

// Monotone auxiliaries whose level sets give the regime equations.

/// f(pool) = pool / gap(0, pool, 1 - pool); increasing while the gap is positive.
inline double a1_auxiliary(double pool, const DesignParams& design, const PopulationParams& pop,
                           const BprParams& bpr) {
    return pool / pool_line_gap(pool, design, pop, bpr);
}

/// g(pool) = gap(0, pool, 1 - pool) * (1 - pool); decreasing, g(1) = 0.
inline double a2_auxiliary(double pool, const DesignParams& design, const PopulationParams& pop,
                           const BprParams& bpr) {
    return pool_line_gap(pool, design, pop, bpr) * (1.0 - pool);
}

/// Regime-B shares implied by a toll share.
inline StrategyShares b_closure(double toll, const DesignParams& design, const PopulationParams& pop) {
    const double tau = design.tau;
    const double gmax = pop.gamma_max;
    StrategyShares s;
    s.toll = toll;
    s.pool = 0.5 * tau * (toll / (gmax - tau) + 1.0 / gmax);
    s.ordinary = 1.0 - (s.toll + s.pool);
    constexpr double slack = 1e-12;
    auto outside = [](double v) { return v < -slack || v > 1.0 + slack; };
    if (!(gmax > tau) || outside(s.toll) || outside(s.pool) || outside(s.ordinary)) {
        throw SolverError(SolverErrorKind::InfeasibleClosure,
                          "closure shares leave the simplex at toll share " + std::to_string(toll));
    }
    s.toll = std::clamp(s.toll, 0.0, 1.0);
    s.pool = std::clamp(s.pool, 0.0, 1.0);
    s.ordinary = std::clamp(s.ordinary, 0.0, 1.0);
    return s;
}

/// h(toll) = (1 - gamma_max / (gamma_max - tau) * toll) * gap(closure(toll)); decreasing.
inline double b_auxiliary(double toll, const DesignParams& design, const PopulationParams& pop,
                          const BprParams& bpr) {
    const double gmax = pop.gamma_max;
    const double linear = 1.0 - gmax / (gmax - design.tau) * toll;
    return linear * latency_gap(b_closure(toll, design, pop), design, pop.demand, bpr);
}

namespace detail {

inline void require_positive_free_flow_gap(const DesignParams& design, const PopulationParams& pop,
                                           const BprParams& bpr) {
    if (!(pool_line_gap(0.0, design, pop, bpr) > 0.0)) {
        throw SolverError(SolverErrorKind::GapNonPositive,
                          "ordinary lane at full demand is not slower than an empty HOT lane");
    }
}

inline BisectionOptions bisection_options(const SolverOptions& opts) {
    return {opts.tolerance, opts.max_iterations};
}

inline EquilibriumOutcome finish(const StrategyShares& shares, Regime regime, double residual, int iterations,
                                 const DesignParams& design, const PopulationParams& pop,
                                 const BprParams& bpr) {
    EquilibriumOutcome out;
    out.shares = shares;
    out.regime = regime;
    out.gap = latency_gap(shares, design, pop.demand, bpr);
    out.flows = vehicle_flows(shares, pop.demand, design.occupancy);
    out.residual = residual;
    out.iterations = iterations;
    return out;
}

}  // namespace detail

/// Search interval for the A1 pool share: (0, min(p, z)) where p is the probe
/// share and z the pool share at which the gap along the pool line vanishes.
/// On it the gap stays positive, so f runs from 0 to beyond its target.
inline Bracket a1_bracket(const DesignParams& design, const PopulationParams& pop, const BprParams& bpr) {
    detail::require_positive_free_flow_gap(design, pop, bpr);
    double hi = probe_share(design, pop);
    if (!(pool_line_gap(hi, design, pop, bpr) > 0.0)) {
        hi = bisect([&](double s) { return pool_line_gap(s, design, pop, bpr); }, 0.0, hi).root;
    }
    return {0.0, hi};
}

inline Bracket a2_bracket(const DesignParams& design, const PopulationParams& pop) {
    return {probe_share(design, pop), 1.0};
}

inline Bracket b_bracket(const DesignParams& design, const PopulationParams& pop) {
    return {0.0, (pop.gamma_max - design.tau) / pop.gamma_max};
}

/// |(beta_max / (2 gamma_max)) * gap - pool|
inline double a1_residual(const StrategyShares& s, const DesignParams& design, const PopulationParams& pop,
                          const BprParams& bpr) {
    const double gap = latency_gap(s, design, pop.demand, bpr);
    return std::abs(0.5 * pop.beta_max / pop.gamma_max * gap - s.pool);
}

/// |(gamma_max / (2 beta_max)) / gap - ordinary|
inline double a2_residual(const StrategyShares& s, const DesignParams& design, const PopulationParams& pop,
                          const BprParams& bpr) {
    const double gap = latency_gap(s, design, pop.demand, bpr);
    return std::abs(0.5 * pop.gamma_max / pop.beta_max / gap - s.ordinary);
}

/// |(1 - tau / (beta_max * gap)) * (gamma_max - tau) / gamma_max - toll|
inline double b_residual(const StrategyShares& s, const DesignParams& design, const PopulationParams& pop,
                         const BprParams& bpr) {
    const double gap = latency_gap(s, design, pop.demand, bpr);
    const double gmax = pop.gamma_max;
    return std::abs((1.0 - design.tau / (pop.beta_max * gap)) * (gmax - design.tau) / gmax - s.toll);
}

namespace detail {

/// Accepts a candidate pool share once the regime-A residual meets the target.
template <class Residual>
auto pool_residual_ok(Residual residual, const SolverOptions& opts, const DesignParams& design,
                      const PopulationParams& pop, const BprParams& bpr) {
    return [=, &opts, &design, &pop, &bpr](double pool) {
        return residual(StrategyShares{0.0, pool, 1.0 - pool}, design, pop, bpr) <= opts.residual_tolerance;
    };
}

}  // namespace detail

inline EquilibriumOutcome solve_regime_a1(const DesignParams& design, const PopulationParams& pop,
                                          const BprParams& bpr, const SolverOptions& opts = {}) {
    Bracket br = opts.bracket.value_or(a1_bracket(design, pop, bpr));
    const double slope = 0.5 * pop.beta_max / pop.gamma_max;
    // Past pool = 1/2 the pool region is no longer a triangle.
    if (br.hi > 0.5 && 0.5 - slope * pool_line_gap(0.5, design, pop, bpr) < 0.0) {
        br.lo = std::max(br.lo, 0.5);
        const double target = 0.5 * pop.gamma_max / pop.beta_max;
        const auto r = bisect([&](double s) { return a2_auxiliary(s, design, pop, bpr) - target; }, br.lo, br.hi,
                              detail::bisection_options(opts),
                              detail::pool_residual_ok(a2_residual, opts, design, pop, bpr));
        const StrategyShares shares{0.0, r.root, 1.0 - r.root};
        return detail::finish(shares, Regime::A1, a2_residual(shares, design, pop, bpr), r.iterations, design, pop,
                              bpr);
    }
    br.hi = std::min(br.hi, 0.5);
    // pool - slope * gap is increasing and, unlike f, has no pole where the gap vanishes.
    const auto r = bisect([&](double s) { return s - slope * pool_line_gap(s, design, pop, bpr); }, br.lo, br.hi,
                          detail::bisection_options(opts),
                          detail::pool_residual_ok(a1_residual, opts, design, pop, bpr));
    const StrategyShares shares{0.0, r.root, 1.0 - r.root};
    return detail::finish(shares, Regime::A1, a1_residual(shares, design, pop, bpr), r.iterations, design, pop,
                          bpr);
}

inline EquilibriumOutcome solve_regime_a2(const DesignParams& design, const PopulationParams& pop,
                                          const BprParams& bpr, const SolverOptions& opts = {}) {
    detail::require_positive_free_flow_gap(design, pop, bpr);
    Bracket br = opts.bracket.value_or(a2_bracket(design, pop));
    const double target = 0.5 * pop.gamma_max / pop.beta_max;
    if (br.lo > 0.5 && a2_auxiliary(br.lo, design, pop, bpr) < target) br.lo = 0.5;
    const auto r = bisect([&](double s) { return a2_auxiliary(s, design, pop, bpr) - target; }, br.lo, br.hi,
                          detail::bisection_options(opts),
                          detail::pool_residual_ok(a2_residual, opts, design, pop, bpr));
    const StrategyShares shares{0.0, r.root, 1.0 - r.root};
    return detail::finish(shares, Regime::A2, a2_residual(shares, design, pop, bpr), r.iterations, design, pop,
                          bpr);
}

inline EquilibriumOutcome solve_regime_b(const DesignParams& design, const PopulationParams& pop,
                                         const BprParams& bpr, const SolverOptions& opts = {}) {
    if (!(design.tau < pop.gamma_max)) {
        throw SolverError(SolverErrorKind::InfeasibleClosure, "regime B needs tau < gamma_max");
    }
    detail::require_positive_free_flow_gap(design, pop, bpr);
    const Bracket br = opts.bracket.value_or(b_bracket(design, pop));
    const double target = design.tau / pop.beta_max;
    const auto residual_ok = [&](double t) {
        return b_residual(b_closure(t, design, pop), design, pop, bpr) <= opts.residual_tolerance;
    };
    const auto r = bisect([&](double t) { return b_auxiliary(t, design, pop, bpr) - target; }, br.lo, br.hi,
                          detail::bisection_options(opts), residual_ok);
    const StrategyShares shares = b_closure(r.root, design, pop);
    return detail::finish(shares, Regime::B, b_residual(shares, design, pop, bpr), r.iterations, design, pop, bpr);
}

inline EquilibriumOutcome solve(const DesignParams& design, const PopulationParams& pop, const BprParams& bpr,
                                const SolverOptions& opts = {}) {
    design.validate();
    pop.validate();
    bpr.validate();
    switch (classify_regime(design, pop, bpr)) {
        case Regime::A1: return solve_regime_a1(design, pop, bpr, opts);
        case Regime::A2: return solve_regime_a2(design, pop, bpr, opts);
        case Regime::B: return solve_regime_b(design, pop, bpr, opts);
    }
    throw SolverError(SolverErrorKind::BracketFailure, "unreachable regime");
}

}  // namespace hotlane
