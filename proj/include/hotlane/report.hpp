#pragma once

// CSV and JSON serialization of solver results.

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hotlane/design.hpp"

namespace hotlane {

inline constexpr std::string_view kSweepCsvHeader =
    "tau,rho,regime,sigma_toll,sigma_pool,sigma_o,c_delta,latency_hot,latency_ordinary,avg_time,revenue,residual";

inline constexpr std::string_view kStaticsCsvHeader = "rho,regime,sigma_toll,sigma_pool,sigma_o,c_delta";

/// 12 significant digits.
inline std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_sweep_row(std::ostream& out, const DesignPointResult& r) {
    out << fmt12(r.design.tau) << ',' << fmt12(r.design.rho) << ',';
    if (!r.ok()) {
        out << "ERROR,,,,,,,,,";
        return;
    }
    const EquilibriumOutcome& o = *r.outcome;
    out << to_string(o.regime) << ',' << fmt12(o.shares.toll) << ',' << fmt12(o.shares.pool) << ','
        << fmt12(o.shares.ordinary) << ',' << fmt12(o.gap) << ',' << fmt12(r.latency_hot) << ','
        << fmt12(r.latency_ordinary) << ',' << fmt12(r.avg_time) << ',' << fmt12(r.revenue) << ','
        << fmt12(o.residual);
}

inline void write_sweep_csv(std::ostream& out, std::span<const DesignPointResult> results) {
    out << kSweepCsvHeader << '\n';
    for (const auto& r : results) {
        write_sweep_row(out, r);
        out << '\n';
    }
}

inline void write_front_rows(std::ostream& out, const ParetoFront& front, std::string_view front_id) {
    for (const auto& r : front.points) {
        write_sweep_row(out, r);
        out << ',' << front_id << '\n';
    }
}

inline void write_statics_csv(std::ostream& out, const StaticsTable& table) {
    out << kStaticsCsvHeader << '\n';
    for (const auto& row : table.rows) {
        out << fmt12(row.rho) << ',';
        if (!row.outcome) {
            out << "ERROR,,,,\n";
            continue;
        }
        const auto& o = *row.outcome;
        out << to_string(o.regime) << ',' << fmt12(o.shares.toll) << ',' << fmt12(o.shares.pool) << ','
            << fmt12(o.shares.ordinary) << ',' << fmt12(o.gap) << '\n';
    }
    out << "summary,sigma_toll," << to_string(table.toll_trend) << '\n';
    out << "summary,sigma_pool," << to_string(table.pool_trend) << '\n';
    out << "summary,sigma_o," << to_string(table.ordinary_trend) << '\n';
    out << "summary,c_delta," << to_string(table.gap_trend) << '\n';
    out << "summary,regime," << (table.regime_monotone() ? "monotone" : "non-monotone") << '\n';
}

inline nlohmann::json to_json(const DesignPointResult& r) {
    nlohmann::json j;
    j["rho"] = r.design.rho;
    j["tau"] = r.design.tau;
    j["occupancy"] = r.design.occupancy;
    if (!r.ok()) {
        j["error"] = r.error;
        return j;
    }
    const auto& o = *r.outcome;
    j["regime"] = std::string(to_string(o.regime));
    j["sigma_toll"] = o.shares.toll;
    j["sigma_pool"] = o.shares.pool;
    j["sigma_o"] = o.shares.ordinary;
    j["c_delta"] = o.gap;
    j["latency_hot"] = r.latency_hot;
    j["latency_ordinary"] = r.latency_ordinary;
    j["avg_time"] = r.avg_time;
    j["revenue"] = r.revenue;
    j["residual"] = o.residual;
    j["iterations"] = o.iterations;
    return j;
}

}  // namespace hotlane
