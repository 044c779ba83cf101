#pragma once

// Authority-side evaluation: average travel time T and toll revenue R at
// equilibrium, grid sweeps, Pareto fronts over (min T, max R), and
// comparative statics along the capacity fraction.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hotlane/equilibrium.hpp"

namespace hotlane {

struct DesignPointResult {
    DesignParams design;
    std::optional<EquilibriumOutcome> outcome;  // empty when the solve failed
    std::string error;
    double latency_hot = 0.0;       // minutes
    double latency_ordinary = 0.0;  // minutes
    double avg_time = 0.0;          // minutes
    double revenue = 0.0;           // dollars / minute

    bool ok() const noexcept { return outcome.has_value(); }
};

inline DesignPointResult evaluate_design(const DesignParams& design, const PopulationParams& pop,
                                         const BprParams& bpr, const SolverOptions& opts = {}) {
    DesignPointResult r;
    r.design = design;
    r.outcome = solve(design, pop, bpr, opts);
    const StrategyShares& s = r.outcome->shares;
    r.latency_hot = latency_hot(r.outcome->flows.hot, design.rho, bpr);
    r.latency_ordinary = latency_ordinary(r.outcome->flows.ordinary, design.rho, bpr);
    r.avg_time = (s.toll + s.pool) * r.latency_hot + s.ordinary * r.latency_ordinary;
    r.revenue = pop.demand * s.toll * design.tau;
    return r;
}

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) fn(i);
        });
    }
}

}  // namespace detail

/// Evaluates every design; failures are recorded in the result, not thrown.
/// Output order matches input order.
inline std::vector<DesignPointResult> sweep(std::span<const DesignParams> designs, const PopulationParams& pop,
                                            const BprParams& bpr, const SolverOptions& opts = {}) {
    std::vector<DesignPointResult> out(designs.size());
    detail::parallel_for(designs.size(), [&](std::size_t i) {
        try {
            out[i] = evaluate_design(designs[i], pop, bpr, opts);
        } catch (const std::exception& e) {
            out[i] = DesignPointResult{};
            out[i].design = designs[i];
            out[i].error = e.what();
        }
    });
    return out;
}

/// The (rho outer, tau inner) grid, both ascending. Toll values are
/// tau_min + k * tau_step up to tau_max.
inline std::vector<DesignParams> design_grid(std::span<const double> rho_values, double tau_min, double tau_max,
                                             double tau_step, double occupancy) {
    std::vector<DesignParams> grid;
    const double slack = 1e-9 * tau_step;
    for (double rho : rho_values) {
        for (long k = 0;; ++k) {
            const double tau = tau_min + static_cast<double>(k) * tau_step;
            if (tau > tau_max + slack) break;
            grid.push_back({rho, tau, occupancy});
        }
    }
    return grid;
}

class EmptyInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// (t1, r1) dominates (t2, r2) when it is no worse in both and better in one.
constexpr bool dominates(double t1, double r1, double t2, double r2) noexcept {
    return t1 <= t2 && r1 >= r2 && (t1 < t2 || r1 > r2);
}

/// Indices of the non-dominated points under (minimize time, maximize revenue),
/// ordered by time ascending. Among exact duplicates the first index is kept.
template <class Point, class TimeOf, class RevenueOf>
std::vector<std::size_t> pareto_indices(std::span<const Point> points, TimeOf time_of, RevenueOf revenue_of) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ta = time_of(points[a]);
        const double tb = time_of(points[b]);
        if (ta != tb) return ta < tb;
        return revenue_of(points[a]) > revenue_of(points[b]);
    });
    std::vector<std::size_t> front;
    for (std::size_t idx : order) {
        if (front.empty() || revenue_of(points[idx]) > revenue_of(points[front.back()])) front.push_back(idx);
    }
    return front;
}

struct ParetoFront {
    std::vector<DesignPointResult> points;  // avg_time and revenue strictly increasing
};

/// Front of the successful results; failed points are skipped.
inline ParetoFront pareto_front(std::span<const DesignPointResult> results) {
    std::vector<DesignPointResult> ok;
    ok.reserve(results.size());
    for (const auto& r : results)
        if (r.ok()) ok.push_back(r);
    if (ok.empty()) throw EmptyInput("EmptyInput: no successfully evaluated design points");

    const auto idx = pareto_indices(std::span<const DesignPointResult>(ok),
                                    [](const DesignPointResult& r) { return r.avg_time; },
                                    [](const DesignPointResult& r) { return r.revenue; });
    ParetoFront front;
    front.points.reserve(idx.size());
    for (std::size_t i : idx) front.points.push_back(ok[i]);
    return front;
}

// Comparative statics ----------------------------------------------------

enum class Trend { Constant, NonDecreasing, NonIncreasing, Neither };

constexpr std::string_view to_string(Trend t) noexcept {
    switch (t) {
        case Trend::Constant: return "constant";
        case Trend::NonDecreasing: return "non-decreasing";
        case Trend::NonIncreasing: return "non-increasing";
        case Trend::Neither: return "neither";
    }
    return "?";
}

inline Trend observed_trend(std::span<const double> values) noexcept {
    bool up = false;
    bool down = false;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1]) up = true;
        if (values[i] < values[i - 1]) down = true;
    }
    if (up && down) return Trend::Neither;
    if (up) return Trend::NonDecreasing;
    if (down) return Trend::NonIncreasing;
    return Trend::Constant;
}

struct StaticsRow {
    double rho = 0.0;
    std::optional<EquilibriumOutcome> outcome;
    std::string error;
};

struct StaticsTable {
    double tau = 0.0;
    std::vector<StaticsRow> rows;
    Trend toll_trend = Trend::Constant;
    Trend pool_trend = Trend::Constant;
    Trend ordinary_trend = Trend::Constant;
    Trend gap_trend = Trend::Constant;
    /// Number of A -> B label changes and whether any B -> A change occurred.
    int a_to_b_switches = 0;
    bool b_to_a_switch = false;

    bool regime_monotone() const noexcept { return a_to_b_switches <= 1 && !b_to_a_switch; }
};

/// Equilibria along ascending rho at fixed tau. Trends are computed over the
/// rows that solved; nothing about their direction is asserted here.
inline StaticsTable comparative_statics_scan(double tau, std::span<const double> rho_grid, double occupancy,
                                             const PopulationParams& pop, const BprParams& bpr) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
        if (!(rho_grid[i] > 0.0 && rho_grid[i] < 1.0)) throw ValidationError("rho grid values must lie in (0,1)");
        if (i > 0 && rho_grid[i] < rho_grid[i - 1]) throw ValidationError("rho grid must be ascending");
    }

    StaticsTable table;
    table.tau = tau;
    table.rows.resize(rho_grid.size());
    detail::parallel_for(rho_grid.size(), [&](std::size_t i) {
        StaticsRow& row = table.rows[i];
        row.rho = rho_grid[i];
        try {
            row.outcome = solve({rho_grid[i], tau, occupancy}, pop, bpr);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    std::vector<double> toll, pool, ordinary, gap;
    std::optional<Regime> prev;
    for (const auto& row : table.rows) {
        if (!row.outcome) continue;
        toll.push_back(row.outcome->shares.toll);
        pool.push_back(row.outcome->shares.pool);
        ordinary.push_back(row.outcome->shares.ordinary);
        gap.push_back(row.outcome->gap);
        const Regime r = row.outcome->regime;
        if (prev) {
            if (is_regime_a(*prev) && !is_regime_a(r)) ++table.a_to_b_switches;
            if (!is_regime_a(*prev) && is_regime_a(r)) table.b_to_a_switch = true;
        }
        prev = r;
    }
    table.toll_trend = observed_trend(toll);
    table.pool_trend = observed_trend(pool);
    table.ordinary_trend = observed_trend(ordinary);
    table.gap_trend = observed_trend(gap);
    return table;
}

}  // namespace hotlane
