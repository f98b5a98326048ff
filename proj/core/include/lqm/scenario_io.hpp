#pragma once

#include <string>

#include "lqm/network.hpp"
#include "lqm/trace.hpp"

namespace lqm {

/// Scenario files are JSON with top-level keys schema, dt, horizon, links,
/// nodes, segments, demand. Quantities accept either SI numbers (m, s, m/s,
/// veh/m, veh/s) or strings with a convertible unit suffix ("20 km/h",
/// "100 veh/km"). Unknown keys and unknown units are rejected. Parse errors
/// name the offending field.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_json(const std::string& text, const std::string& origin_name);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

/// Traces are CSV: a "# lqm-trace schema=1 dt=..." line, a fixed header row,
/// then one row per (step, link). Numbers carry 12 significant digits.
void write_trace(const TraceSet& trace, const std::string& path);
TraceSet load_trace(const std::string& path);

/// Block-averages a demand series: each group of `window` consecutive values
/// is replaced by the group mean. window <= 1 returns the input unchanged.
StepSeries smooth_demand(const StepSeries& series, int window);

/// Applies smooth_demand to every origin's series.
void smooth_scenario_demand(Scenario& s, int window);

}  // namespace lqm
