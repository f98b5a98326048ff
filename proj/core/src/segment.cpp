#include "lqm/segment.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace lqm {

LinkId NetworkBuilder::add_link(LinkParams params) {
  if (params.id == 0) params.id = next_link_;
  next_link_ = std::max(next_link_, params.id + 1);
  links_.push_back(std::move(params));
  return links_.back().id;
}

NodeId NetworkBuilder::add_node(NodeSpec spec) {
  if (spec.id == 0) spec.id = next_node_;
  next_node_ = std::max(next_node_, spec.id + 1);
  nodes_.push_back(std::move(spec));
  return nodes_.back().id;
}

LinkParams& NetworkBuilder::link(LinkId id) {
  for (auto& l : links_) {
    if (l.id == id) return l;
  }
  throw std::out_of_range("builder: no such link " + std::to_string(id));
}

NodeSpec& NetworkBuilder::node(NodeId id) {
  for (auto& n : nodes_) {
    if (n.id == id) return n;
  }
  throw std::out_of_range("builder: no such node " + std::to_string(id));
}

Scenario NetworkBuilder::take(double dt, Step horizon) {
  Scenario s;
  s.dt = dt;
  s.horizon_steps = horizon;
  s.links = std::move(links_);
  s.nodes = std::move(nodes_);
  s.segments = std::move(segments_);
  return s;
}

namespace {

bool is_nested(const std::string& token) {
  return token.size() >= 2 && token.front() == '(' && token.back() == ')';
}

std::string movements_of(const std::string& token) {
  std::string m = is_nested(token) ? token.substr(1, token.size() - 2) : token;
  for (char c : m) {
    if (c != 'L' && c != 'T' && c != 'R') {
      throw std::invalid_argument("unknown lane configuration token: " + token);
    }
  }
  if (m.empty()) throw std::invalid_argument("empty lane configuration token");
  return m;
}

}  // namespace

RoadSegment build_segment(NetworkBuilder& builder, double segment_length,
                          const std::vector<TurnSpec>& turn_specs, const SegmentParams& params) {
  RoadSegment segment;

  // Pair nested bay specs with the host lane that follows them.
  std::vector<std::pair<TurnSpec, const TurnSpec*>> lanes;  // (host, optional bay)
  for (std::size_t i = 0; i < turn_specs.size(); ++i) {
    const TurnSpec& spec = turn_specs[i];
    movements_of(spec.movements);  // validates the token
    if (is_nested(spec.movements)) {
      if (i + 1 >= turn_specs.size()) {
        throw std::invalid_argument("nested bay " + spec.movements + " has no host lane");
      }
      continue;
    }
    const TurnSpec* bay = nullptr;
    if (i > 0 && is_nested(turn_specs[i - 1].movements)) bay = &turn_specs[i - 1];
    lanes.emplace_back(spec, bay);
  }

  double turn_zone = 0.0;
  for (const auto& [host, bay] : lanes) {
    if (host.length >= segment_length) {
      throw std::invalid_argument("turn length must be shorter than the segment");
    }
    if (bay && bay->length >= host.length) {
      throw std::invalid_argument("nested bay must be shorter than its host lane");
    }
    turn_zone = std::max(turn_zone, host.length);
  }

  LinkParams common;
  common.kind = LinkKind::common;
  common.length = segment_length - turn_zone;
  common.jam_density = params.jam_density;
  common.backward_wave_speed = params.backward_wave_speed;
  common.saturation_flow = params.saturation_flow;
  common.speed = params.common_speed;
  segment.common = builder.add_link(common);

  if (lanes.empty()) return segment;  // plain road: one common link, no divider

  NodeSpec divider;
  divider.incoming = {segment.common};
  divider.green_fraction[segment.common] = StepSeries(1.0);

  auto make_turn = [&](const TurnSpec& spec, double length) {
    LinkParams turn;
    turn.kind = LinkKind::turn;
    turn.length = length;
    turn.jam_density = params.jam_density;
    turn.backward_wave_speed = params.backward_wave_speed;
    turn.saturation_flow = params.saturation_flow;
    turn.speed = spec.speed.empty() ? params.common_speed : spec.speed;
    return builder.add_link(turn);
  };

  for (const auto& [host, bay] : lanes) {
    const double share =
        host.shares.empty()
            ? 1.0 / static_cast<double>(lanes.size())
            : std::accumulate(host.shares.begin(), host.shares.end(), 0.0);
    if (!bay) {
      const LinkId turn = make_turn(host, host.length);
      segment.turns.push_back(turn);
      divider.outgoing.push_back(turn);
      divider.turning_rates.push_back({segment.common, turn, share});
      continue;
    }
    // The host lane becomes a sub-segment: its own common part up to where
    // the bay opens, then two parallel lanes.
    TurnSpec inner_host = host;
    inner_host.length = bay->length;
    inner_host.shares = {0.5};
    TurnSpec inner_bay = *bay;
    inner_bay.movements = movements_of(bay->movements);
    inner_bay.shares = {0.5};
    SegmentParams sub_params = params;
    sub_params.common_speed = host.speed.empty() ? params.common_speed : host.speed;
    RoadSegment sub = build_segment(builder, host.length, {inner_host, inner_bay}, sub_params);
    builder.link(sub.common).kind = LinkKind::turn;
    segment.turns.push_back(sub.common);
    divider.outgoing.push_back(sub.common);
    divider.turning_rates.push_back({segment.common, sub.common, share});
    segment.nested.push_back(std::move(sub));
  }

  segment.divider = builder.add_node(std::move(divider));
  return segment;
}

}  // namespace lqm
