#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ergphase/textio.hpp"
#include "ergphase/tolerances.hpp"
#include "ergphase/version.hpp"

namespace ergphase {

// Everything needed to rerun a command: the subcommand, the exponent pair,
// the parameters as given, the tolerance knobs, and the seed when one was
// drawn.  Deterministic reruns of the same manifest must match byte for byte.
struct RunManifest {
    std::string subcommand;
    int p = 0;
    int q = 0;
    std::string format = "csv";
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
    ToleranceConfig tol;
};

namespace detail {

inline std::string quote_if_spaced(const std::string& value) {
    if (value.find(' ') == std::string::npos) return value;
    return "\"" + value + "\"";
}

} // namespace detail

// Flat key/value view in a fixed order, shared by the CSV comment header and
// the structured formats a front end assembles.
inline std::vector<std::pair<std::string, std::string>> manifest_entries(
    const RunManifest& m) {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.emplace_back("artifact", artifact_name);
    rows.emplace_back("version", artifact_version);
    rows.emplace_back("subcommand", m.subcommand);
    rows.emplace_back("p", std::to_string(m.p));
    rows.emplace_back("q", std::to_string(m.q));
    rows.emplace_back("format", m.format);
    if (m.has_seed) rows.emplace_back("seed", format_u64(m.seed));
    for (const auto& kv : m.parameters) rows.push_back(kv);
    rows.emplace_back("tol_grid_points", std::to_string(m.tol.grid_points));
    rows.emplace_back("tol_grid_margin", format_double(m.tol.grid_margin));
    rows.emplace_back("tol_root_interval", format_double(m.tol.root_interval));
    rows.emplace_back("tol_max_bisect_iter", std::to_string(m.tol.max_bisect_iter));
    rows.emplace_back("tol_tie_rel", format_double(m.tol.tie_rel));
    rows.emplace_back("tol_on_surface_band", format_double(m.tol.on_surface_band));
    rows.emplace_back("tol_critical_band", format_double(m.tol.critical_band));
    rows.emplace_back("tol_triple_root_residual",
                      format_double(m.tol.triple_root_residual));
    return rows;
}

inline std::string manifest_csv_header(const RunManifest& m) {
    std::string out;
    for (const auto& [key, value] : manifest_entries(m)) {
        out += "# ";
        out += key;
        out += "=";
        out += detail::quote_if_spaced(value);
        out += "\n";
    }
    return out;
}

} // namespace ergphase
