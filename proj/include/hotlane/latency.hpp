#pragma once

// Lane latency model.
//
// Both lanes use the BPR curve with the coefficient inside the power:
//
//   C(x; c) = t_free * (1 + (a * x / c)^b)
//
// where c is the lane capacity (v_cap * rho for the HOT lane, v_cap * (1 - rho)
// for the ordinary lane). The more common textbook form is
// t_free * (1 + a * (x / c)^b); the two differ by a factor a^(b-1) on the
// congestion term. This header implements the former.

#include <cmath>
#include <string>

#include "hotlane/errors.hpp"

namespace hotlane {

struct BprParams {
    double a = 0.15;
    double b = 4.0;
    double t_free = 22.0;  // minutes
    double v_cap = 140.0;  // vehicles / minute, both lanes together

    void validate() const {
        if (!(a > 0.0)) throw ValidationError("bpr.a must be > 0");
        if (!(b >= 1.0)) throw ValidationError("bpr.b must be >= 1");
        if (!(t_free > 0.0)) throw ValidationError("bpr.t_free must be > 0");
        if (!(v_cap > 0.0)) throw ValidationError("bpr.v_cap must be > 0");
    }

    friend bool operator==(const BprParams&, const BprParams&) = default;
};

/// Authority's levers: HOT capacity fraction, toll (dollars), carpool size.
struct DesignParams {
    double rho = 0.5;
    double tau = 1.0;
    double occupancy = 2.0;

    void validate() const {
        if (!(rho > 0.0 && rho < 1.0))
            throw ValidationError("rho must lie in the open interval (0,1), got " + std::to_string(rho));
        if (!(tau > 0.0)) throw ValidationError("tau must be > 0");
        if (!(occupancy >= 2.0)) throw ValidationError("occupancy must be >= 2");
    }

    friend bool operator==(const DesignParams&, const DesignParams&) = default;
};

/// Population fractions on the three actions; a point of the 2-simplex.
struct StrategyShares {
    double toll = 0.0;
    double pool = 0.0;
    double ordinary = 1.0;

    static constexpr double kSimplexTolerance = 1e-12;

    bool valid() const noexcept {
        auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
        return in01(toll) && in01(pool) && in01(ordinary) &&
               std::abs(toll + pool + ordinary - 1.0) <= kSimplexTolerance;
    }

    void validate() const {
        if (!valid()) throw ValidationError("strategy shares are not on the probability simplex");
    }

    friend bool operator==(const StrategyShares&, const StrategyShares&) = default;
};

inline double max_norm_distance(const StrategyShares& x, const StrategyShares& y) noexcept {
    return std::fmax(std::abs(x.toll - y.toll),
                     std::fmax(std::abs(x.pool - y.pool), std::abs(x.ordinary - y.ordinary)));
}

struct LaneFlows {
    double ordinary = 0.0;  // vehicles / minute
    double hot = 0.0;       // vehicles / minute
};

inline LaneFlows vehicle_flows(const StrategyShares& sigma, double demand, double occupancy) noexcept {
    return {sigma.ordinary * demand, (sigma.toll + sigma.pool / occupancy) * demand};
}

namespace detail {

inline double bpr_curve(double flow, double capacity, const BprParams& bpr) noexcept {
    return bpr.t_free * (1.0 + std::pow(bpr.a * flow / capacity, bpr.b));
}

inline void check_rho(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("capacity fraction rho must lie in (0,1)");
}

}  // namespace detail

/// Ordinary-lane travel time (minutes); the lane holds 1 - rho of capacity.
inline double latency_ordinary(double flow, double rho, const BprParams& bpr) {
    detail::check_rho(rho);
    return detail::bpr_curve(flow, bpr.v_cap * (1.0 - rho), bpr);
}

/// HOT-lane travel time (minutes); the lane holds rho of capacity.
inline double latency_hot(double flow, double rho, const BprParams& bpr) {
    detail::check_rho(rho);
    return detail::bpr_curve(flow, bpr.v_cap * rho, bpr);
}

/// Ordinary latency minus HOT latency at the flows induced by `sigma`.
/// Positive when the HOT lane is faster.
inline double latency_gap(const StrategyShares& sigma, const DesignParams& design, double demand,
                          const BprParams& bpr) {
    const LaneFlows x = vehicle_flows(sigma, demand, design.occupancy);
    return latency_ordinary(x.ordinary, design.rho, bpr) - latency_hot(x.hot, design.rho, bpr);
}

}  // namespace hotlane
