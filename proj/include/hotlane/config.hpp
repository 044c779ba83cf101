#pragma once

// Run configuration: flat `key = value` text, `#` starts a comment, keys are
// dotted by group. Example:
//
//   population.demand = 115
//   bpr.a = 0.15
//   sweep.rho_values = 0.25, 0.5, 0.75
//
// Every key except the oracle.* overrides is required.

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hotlane/design.hpp"
#include "hotlane/oracle.hpp"

namespace hotlane {

struct RunConfig {
    PopulationParams population;
    BprParams bpr;
    double occupancy = 2.5;
    std::vector<double> rho_values;
    double tau_min = 0.5;
    double tau_max = 10.0;
    double tau_step = 0.5;
    OracleConfig oracle;

    void validate() const {
        population.validate();
        bpr.validate();
        oracle.validate();
        if (!(occupancy >= 2.0)) throw ValidationError("design.occupancy must be >= 2");
        if (rho_values.empty()) throw ValidationError("sweep.rho_values must list at least one value");
        for (std::size_t i = 0; i < rho_values.size(); ++i) {
            if (!(rho_values[i] > 0.0 && rho_values[i] < 1.0))
                throw ValidationError("sweep.rho_values entries must lie in the open interval (0,1)");
            if (i > 0 && !(rho_values[i] > rho_values[i - 1]))
                throw ValidationError("sweep.rho_values must be strictly ascending");
        }
        if (!(tau_min > 0.0)) throw ValidationError("sweep.tau_min must be > 0");
        if (!(tau_step > 0.0)) throw ValidationError("sweep.tau_step must be > 0");
        if (!(tau_min <= tau_max)) throw ValidationError("sweep.tau_min must not exceed sweep.tau_max");
    }

    std::vector<DesignParams> grid() const {
        return design_grid(rho_values, tau_min, tau_max, tau_step, occupancy);
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Northbound I-880 calibration (Dixon Landing Rd to Lewelling Blvd).
inline RunConfig i880_defaults() {
    RunConfig c;
    c.population = {115.0, 1.5, 8.0};
    c.bpr = {0.15, 4.0, 22.0, 140.0};
    c.occupancy = 2.5;
    c.rho_values = {0.25, 0.5, 0.75};
    c.tau_min = 0.5;
    c.tau_max = 10.0;
    c.tau_step = 0.5;
    return c;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, std::size_t line, const std::string& key) {
    text = trim(text);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError(line, key,
                         "line " + std::to_string(line) + ": key '" + key + "': cannot parse '" +
                             std::string(text) + "' as a number");
    }
    return value;
}

inline std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    struct Entry {
        std::string value;
        std::size_t line;
    };
    std::map<std::string, Entry, std::less<>> entries;

    std::string raw;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = detail::trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line, "", "line " + std::to_string(line) + ": expected 'key = value'");
        std::string key(detail::trim(text.substr(0, eq)));
        if (key.empty()) throw ParseError(line, "", "line " + std::to_string(line) + ": empty key");
        if (entries.contains(key))
            throw ParseError(line, key, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
        entries.emplace(std::move(key), Entry{std::string(detail::trim(text.substr(eq + 1))), line});
    }

    RunConfig cfg;
    auto take = [&](const std::string& key, auto& field, bool required) {
        using T = std::remove_reference_t<decltype(field)>;
        auto it = entries.find(key);
        if (it == entries.end()) {
            if (required) throw ParseError(0, key, "missing required key '" + key + "'");
            return;
        }
        field = detail::parse_number<T>(it->second.value, it->second.line, key);
        entries.erase(it);
    };

    take("population.demand", cfg.population.demand, true);
    take("population.beta_max", cfg.population.beta_max, true);
    take("population.gamma_max", cfg.population.gamma_max, true);
    take("bpr.a", cfg.bpr.a, true);
    take("bpr.b", cfg.bpr.b, true);
    take("bpr.t_free", cfg.bpr.t_free, true);
    take("bpr.v_cap", cfg.bpr.v_cap, true);
    take("design.occupancy", cfg.occupancy, true);
    take("sweep.tau_min", cfg.tau_min, true);
    take("sweep.tau_max", cfg.tau_max, true);
    take("sweep.tau_step", cfg.tau_step, true);
    take("oracle.grid_n", cfg.oracle.grid_n, false);
    take("oracle.damping", cfg.oracle.damping, false);
    take("oracle.tol", cfg.oracle.tol, false);
    take("oracle.max_iters", cfg.oracle.max_iters, false);

    const std::string rho_key = "sweep.rho_values";
    auto rho = entries.find(rho_key);
    if (rho == entries.end()) throw ParseError(0, rho_key, "missing required key '" + rho_key + "'");
    std::string_view list = rho->second.value;
    while (true) {
        const auto comma = list.find(',');
        cfg.rho_values.push_back(detail::parse_number<double>(list.substr(0, comma), rho->second.line, rho_key));
        if (comma == std::string_view::npos) break;
        list = list.substr(comma + 1);
    }
    entries.erase(rho);

    if (!entries.empty()) {
        const auto& [key, entry] = *entries.begin();
        throw ParseError(entry.line, key, "line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "", "cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Writes `cfg` in the format parse_config reads; values round-trip exactly.
inline void dump_config(std::ostream& out, const RunConfig& cfg) {
    using detail::format_shortest;
    out << "# hotlane run configuration\n";
    out << "population.demand = " << format_shortest(cfg.population.demand) << '\n';
    out << "population.beta_max = " << format_shortest(cfg.population.beta_max) << '\n';
    out << "population.gamma_max = " << format_shortest(cfg.population.gamma_max) << '\n';
    out << "bpr.a = " << format_shortest(cfg.bpr.a) << '\n';
    out << "bpr.b = " << format_shortest(cfg.bpr.b) << '\n';
    out << "bpr.t_free = " << format_shortest(cfg.bpr.t_free) << '\n';
    out << "bpr.v_cap = " << format_shortest(cfg.bpr.v_cap) << '\n';
    out << "design.occupancy = " << format_shortest(cfg.occupancy) << '\n';
    out << "sweep.rho_values = ";
    for (std::size_t i = 0; i < cfg.rho_values.size(); ++i)
        out << (i ? ", " : "") << format_shortest(cfg.rho_values[i]);
    out << '\n';
    out << "sweep.tau_min = " << format_shortest(cfg.tau_min) << '\n';
    out << "sweep.tau_max = " << format_shortest(cfg.tau_max) << '\n';
    out << "sweep.tau_step = " << format_shortest(cfg.tau_step) << '\n';
    out << "oracle.grid_n = " << cfg.oracle.grid_n << '\n';
    out << "oracle.damping = " << format_shortest(cfg.oracle.damping) << '\n';
    out << "oracle.tol = " << format_shortest(cfg.oracle.tol) << '\n';
    out << "oracle.max_iters = " << cfg.oracle.max_iters << '\n';
}

}  // namespace hotlane
