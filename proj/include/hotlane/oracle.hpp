#pragma once

// Brute-force equilibrium check that does not use the closed-form regions.
//
// A grid_n x grid_n lattice of agent types sits at the cell midpoints of
// [0, beta_max] x [0, gamma_max]. Each agent picks its best response to the
// current shares, and the shares are relaxed toward the resulting label
// fractions until they stop moving.
//
// On a finite lattice the label fractions are a step function of the shares,
// and a region boundary that runs parallel to a grid axis flips a whole row
// or column at once. The relaxation then may have no exact fixed point and a
// constant step overshoots forever, so the toll and pool shares each halve
// their own step whenever they turn around.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "hotlane/latency.hpp"
#include "hotlane/population.hpp"

namespace hotlane {

struct OracleConfig {
    int grid_n = 2000;
    double damping = 0.2;
    double tol = 1e-9;
    int max_iters = 10000;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (grid_n < 10) throw ValidationError("oracle.grid_n must be >= 10");
        if (!(damping > 0.0 && damping <= 1.0)) throw ValidationError("oracle.damping must lie in (0,1]");
        if (!(tol > 0.0)) throw ValidationError("oracle.tol must be > 0");
        if (max_iters < 1) throw ValidationError("oracle.max_iters must be >= 1");
    }

    friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

struct OracleResult {
    StrategyShares shares;
    int iterations = 0;
    double residual = 0.0;  // max-norm |empirical_shares(shares) - shares|
    double final_damping = 0.0;
};

class OracleNoConvergence : public SolverError {
public:
    OracleNoConvergence(const StrategyShares& last, double residual, int iterations)
        : SolverError(SolverErrorKind::NoConvergence,
                      "oracle iteration did not settle after " + std::to_string(iterations) +
                          " iterations (last change " + std::to_string(residual) + ")"),
          last_(last), residual_(residual) {}

    const StrategyShares& last() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }

private:
    StrategyShares last_;
    double residual_;
};

namespace detail {

using LabelCounts = std::array<std::int64_t, 3>;

inline LabelCounts count_rows(int row_begin, int row_end, int n, double gap, double tau,
                              const PopulationParams& pop) {
    LabelCounts counts{0, 0, 0};
    const double d_beta = pop.beta_max / n;
    const double d_gamma = pop.gamma_max / n;
    for (int j = row_begin; j < row_end; ++j) {
        const double gamma = (j + 0.5) * d_gamma;
        for (int i = 0; i < n; ++i) {
            const AgentType agent{(i + 0.5) * d_beta, gamma};
            ++counts[static_cast<std::size_t>(best_response(agent, gap, tau))];
        }
    }
    return counts;
}

inline unsigned worker_count(unsigned requested, int rows) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return std::clamp<unsigned>(n, 1u, static_cast<unsigned>(std::max(rows, 1)));
}

}  // namespace detail

/// Label fractions of the agent lattice responding to `sigma`.
inline StrategyShares empirical_shares(const StrategyShares& sigma, const DesignParams& design,
                                       const PopulationParams& pop, const BprParams& bpr,
                                       const OracleConfig& cfg) {
    const double gap = latency_gap(sigma, design, pop.demand, bpr);
    const int n = cfg.grid_n;
    const unsigned workers = detail::worker_count(cfg.threads, n);

    std::vector<detail::LabelCounts> partial(workers, detail::LabelCounts{0, 0, 0});
    if (workers == 1) {
        partial[0] = detail::count_rows(0, n, n, gap, design.tau, pop);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(static_cast<std::int64_t>(n) * w / workers);
            const int end = static_cast<int>(static_cast<std::int64_t>(n) * (w + 1) / workers);
            pool.emplace_back([&, w, begin, end] { partial[w] = detail::count_rows(begin, end, n, gap, design.tau, pop); });
        }
    }

    detail::LabelCounts total{0, 0, 0};
    for (const auto& c : partial)
        for (std::size_t k = 0; k < 3; ++k) total[k] += c[k];

    const double cells = static_cast<double>(n) * n;
    StrategyShares out;
    out.toll = total[static_cast<std::size_t>(Action::Toll)] / cells;
    out.pool = total[static_cast<std::size_t>(Action::Pool)] / cells;
    out.ordinary = total[static_cast<std::size_t>(Action::Ordinary)] / cells;
    return out;
}

/// Damped fixed-point iteration from the barycenter of the simplex, starting
/// with step cfg.damping. Throws OracleNoConvergence when the change never
/// drops to cfg.tol.
inline OracleResult oracle_equilibrium(const DesignParams& design, const PopulationParams& pop,
                                       const BprParams& bpr, const OracleConfig& cfg = {}) {
    design.validate();
    pop.validate();
    bpr.validate();
    cfg.validate();

    // The ordinary share is the remainder.
    StrategyShares sigma{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    std::array<double, 2> lambda{cfg.damping, cfg.damping};
    std::array<double, 2> prev_step{0.0, 0.0};
    double change = 0.0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        const StrategyShares target = empirical_shares(sigma, design, pop, bpr, cfg);
        const std::array<double, 2> pull{target.toll - sigma.toll, target.pool - sigma.pool};
        std::array<double, 2> step{};
        std::array<bool, 2> turned{};
        for (std::size_t k = 0; k < 2; ++k) {
            turned[k] = pull[k] * prev_step[k] < 0.0;
            if (turned[k]) lambda[k] *= 0.5;
            step[k] = lambda[k] * pull[k];
        }
        StrategyShares next;
        next.toll = sigma.toll + step[0];
        next.pool = sigma.pool + step[1];
        next.ordinary = 1.0 - next.toll - next.pool;
        prev_step = step;
        // Between turns a coordinate is sliding toward a fixed target.
        change = 0.0;
        for (std::size_t k = 0; k < 2; ++k) change = std::max(change, std::abs(turned[k] ? step[k] : pull[k]));
        sigma = next;
        if (change <= cfg.tol) {
            const StrategyShares check = empirical_shares(sigma, design, pop, bpr, cfg);
            return {sigma, it, max_norm_distance(check, sigma), std::min(lambda[0], lambda[1])};
        }
    }
    throw OracleNoConvergence(sigma, change, cfg.max_iters);
}

}  // namespace hotlane
