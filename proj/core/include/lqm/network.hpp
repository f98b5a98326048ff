#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lqm/types.hpp"

namespace lqm {

/// Static parameters of one link. Speeds are m/s, densities veh/m,
/// lengths m, flows veh/s.
struct LinkParams {
  LinkId id = 0;
  LinkKind kind = LinkKind::common;
  double length = 0.0;                  // L_i
  double jam_density = 0.0;             // rho_jam
  double backward_wave_speed = 0.0;     // w
  StepSeries saturation_flow;           // q_sat(k)
  StepSeries speed;                     // v_f(k)
  std::optional<double> min_desired_speed;  // v_min; defaults to min of speed

  double vmin() const { return min_desired_speed ? *min_desired_speed : speed.min_value(); }
  bool is_virtual() const { return kind == LinkKind::origin || kind == LinkKind::sink; }
};

struct TurningRate {
  LinkId from = 0;
  LinkId to = 0;
  double rate = 0.0;  // e_{from,to}
};

/// A node joining incoming links to outgoing links. Green-time fractions
/// apply to the discharge of the node's incoming links; conflict sets list
/// incoming links whose green fractions may not sum above 1.
struct NodeSpec {
  NodeId id = 0;
  std::vector<LinkId> incoming;
  std::vector<LinkId> outgoing;
  std::vector<TurningRate> turning_rates;
  std::map<LinkId, StepSeries> green_fraction;  // b_i(k) per incoming link
  std::vector<std::vector<LinkId>> conflict_sets;

  double turning_rate(LinkId from, LinkId to) const;
  const StepSeries* green_for(LinkId incoming_link) const;
};

/// One road segment: a common link feeding parallel turn links through a
/// divider node. Nested segments model turn bays that open partway down a
/// turn lane.
struct RoadSegment {
  LinkId common = 0;
  std::vector<LinkId> turns;
  NodeId divider = 0;
  std::vector<RoadSegment> nested;
};

struct Scenario {
  double dt = 1.0;
  Step horizon_steps = 0;
  std::vector<LinkParams> links;
  std::vector<NodeSpec> nodes;
  std::vector<RoadSegment> segments;
  std::map<LinkId, StepSeries> demand;  // per-origin desired inflow rate, veh/s

  const LinkParams* find_link(LinkId id) const;
  const NodeSpec* find_node(NodeId id) const;
  std::vector<LinkId> real_link_ids() const;  // common + turn links, ascending
};

enum class Severity { error, warning };

/// One violated invariant: which entity, which rule, and (when step-dependent)
/// the first offending step.
struct Violation {
  Severity severity = Severity::error;
  std::string entity;
  std::string invariant;
  Step step = -1;  // -1: not step-specific
  std::string detail;

  std::string to_string() const;
};

struct ValidationResult {
  std::vector<Violation> violations;  // errors only
  std::vector<Violation> warnings;
  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant of the scenario: link parameter ranges,
/// turning-rate row sums, conflict-set green sums, reference integrity,
/// segment structure, demand ranges, and step admissibility. Pure: the same
/// scenario always yields the same list.
ValidationResult validate_scenario(const Scenario& s);

}  // namespace lqm
