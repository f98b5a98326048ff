#pragma once

#include <string>
#include <vector>

#include "lqm/network.hpp"

namespace lqm {

/// One turn-lane group of a segment, e.g. "T" or "TR" (shared lane) or
/// "(L)" (a bay that opens partway down its host lane).
struct TurnSpec {
  std::string movements;       // subset of L, T, R; "(L)" marks a nested bay
  double length = 0.0;         // m, measured from the downstream end
  StepSeries speed;            // v_f(k) on the turn link
  std::vector<double> shares;  // internal split per movement, sums to 1; empty: uniform
};

struct SegmentParams {
  double jam_density = 0.1;
  double backward_wave_speed = 20.0 / 3.6;
  StepSeries saturation_flow = StepSeries(0.5);
  StepSeries common_speed = StepSeries(11.0);
};

/// Allocates ids while assembling links and nodes into a scenario.
class NetworkBuilder {
 public:
  LinkId add_link(LinkParams params);  // id 0: assign next free id
  NodeId add_node(NodeSpec spec);
  void add_segment(RoadSegment segment) { segments_.push_back(std::move(segment)); }
  LinkParams& link(LinkId id);
  NodeSpec& node(NodeId id);
  Scenario take(double dt, Step horizon);

  LinkId next_link_id() const { return next_link_; }

 private:
  std::vector<LinkParams> links_;
  std::vector<NodeSpec> nodes_;
  std::vector<RoadSegment> segments_;
  LinkId next_link_ = 1;
  NodeId next_node_ = 1;
  friend RoadSegment build_segment(NetworkBuilder&, double, const std::vector<TurnSpec>&,
                                   const SegmentParams&);
};

/// Splits a road of the given total length into a common link and parallel
/// turn links joined by an unsignalled divider node. Shared-movement specs
/// become one turn link whose downstream turning rates carry the internal
/// split; a "(X)" spec nests: the preceding host lane becomes a sub-segment
/// with its own divider where the bay opens. The divider routes the common
/// link's outflow by each spec's aggregate share. Throws
/// std::invalid_argument when a turn is as long as the segment or a
/// movement token is unknown.
RoadSegment build_segment(NetworkBuilder& builder, double segment_length,
                          const std::vector<TurnSpec>& turn_specs, const SegmentParams& params);

}  // namespace lqm
