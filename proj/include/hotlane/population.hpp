#pragma once

// Heterogeneous traveller population and best responses.
//
// Types (beta, gamma) are uniform on [0, beta_max] x [0, gamma_max]. Given the
// latency gap c = C_o - C_h, an agent compares
//   toll:     beta * C_h + tau
//   pool:     beta * C_h + gamma
//   ordinary: beta * C_o
// which reduces to comparing beta * c against tau and gamma.

#include <algorithm>
#include <array>
#include <string_view>

#include "hotlane/latency.hpp"

namespace hotlane {

struct PopulationParams {
    double demand = 115.0;   // vehicles / minute
    double beta_max = 1.5;   // dollars / minute
    double gamma_max = 8.0;  // dollars

    void validate() const {
        if (!(demand > 0.0)) throw ValidationError("population.demand must be > 0");
        if (!(beta_max > 0.0)) throw ValidationError("population.beta_max must be > 0");
        if (!(gamma_max > 0.0)) throw ValidationError("population.gamma_max must be > 0");
    }

    double density() const noexcept { return 1.0 / (beta_max * gamma_max); }

    friend bool operator==(const PopulationParams&, const PopulationParams&) = default;
};

struct AgentType {
    double beta = 0.0;   // value of time
    double gamma = 0.0;  // carpool disutility
};

enum class Action { Toll, Pool, Ordinary };

inline constexpr std::array<Action, 3> kAllActions{Action::Toll, Action::Pool, Action::Ordinary};

constexpr std::string_view to_string(Action a) noexcept {
    switch (a) {
        case Action::Toll: return "toll";
        case Action::Pool: return "pool";
        case Action::Ordinary: return "ordinary";
    }
    return "?";
}

/// Generalized cost in dollars of `action` for `agent` when the population plays `sigma`.
inline double action_cost(const AgentType& agent, Action action, const StrategyShares& sigma,
                          const DesignParams& design, const PopulationParams& pop,
                          const BprParams& bpr) {
    const LaneFlows x = vehicle_flows(sigma, pop.demand, design.occupancy);
    switch (action) {
        case Action::Toll: return agent.beta * latency_hot(x.hot, design.rho, bpr) + design.tau;
        case Action::Pool: return agent.beta * latency_hot(x.hot, design.rho, bpr) + agent.gamma;
        case Action::Ordinary: return agent.beta * latency_ordinary(x.ordinary, design.rho, bpr);
    }
    return 0.0;
}

/// Best response given a precomputed latency gap. Boundary ties (measure zero)
/// resolve as Pool, then Toll, then Ordinary.
inline Action best_response(const AgentType& agent, double gap, double tau) noexcept {
    const double saving = agent.beta * gap;
    if (saving >= agent.gamma && agent.gamma <= tau) return Action::Pool;
    if (saving >= tau && agent.gamma >= tau) return Action::Toll;
    return Action::Ordinary;
}

inline Action best_response(const AgentType& agent, const StrategyShares& sigma,
                            const DesignParams& design, const PopulationParams& pop,
                            const BprParams& bpr) {
    return best_response(agent, latency_gap(sigma, design, pop.demand, bpr), design.tau);
}

/// Closed-form population fractions of the three best-response regions for a
/// given latency gap.
inline StrategyShares region_measures_for_gap(double gap, double tau, const PopulationParams& pop) noexcept {
    if (!(gap > 0.0)) return {0.0, 0.0, 1.0};
    const double bmax = pop.beta_max;
    const double gmax = pop.gamma_max;
    const double cap = std::min(tau, gmax);

    // Pool: integral over beta of min(beta * gap, cap).
    double pool_area;
    if (bmax * gap <= cap) {
        pool_area = 0.5 * bmax * bmax * gap;
    } else {
        const double knee = cap / gap;
        pool_area = 0.5 * knee * cap + (bmax - knee) * cap;
    }

    // Toll: rectangle beta >= tau / gap, gamma >= tau.
    const double beta_cut = std::min(tau / gap, bmax);
    const double toll_area = std::max(0.0, bmax - beta_cut) * std::max(0.0, gmax - tau);

    const double norm = bmax * gmax;
    StrategyShares s;
    s.toll = std::clamp(toll_area / norm, 0.0, 1.0);
    s.pool = std::clamp(pool_area / norm, 0.0, 1.0 - s.toll);
    s.ordinary = std::max(0.0, 1.0 - s.toll - s.pool);
    return s;
}

inline StrategyShares region_measures(const StrategyShares& sigma, const DesignParams& design,
                                      const PopulationParams& pop, const BprParams& bpr) {
    return region_measures_for_gap(latency_gap(sigma, design, pop.demand, bpr), design.tau, pop);
}

}  // namespace hotlane
