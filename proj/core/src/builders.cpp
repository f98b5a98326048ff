#include "lqm/builders.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "lqm/segment.hpp"

namespace lqm {

namespace {

constexpr double kWave = 20.0 / 3.6;     // m/s
constexpr double kJam = 0.1;             // veh/m
constexpr double kSatFlow = 0.5;         // veh/s
constexpr double kTurnSpeed = 4.0;       // m/s, left and right turns
constexpr double kThroughSpeed = 11.0;   // m/s, through turns and commons

LinkParams road_link(LinkId id, LinkKind kind, double length, double speed) {
  LinkParams p;
  p.id = id;
  p.kind = kind;
  p.length = length;
  p.jam_density = kJam;
  p.backward_wave_speed = kWave;
  p.saturation_flow = StepSeries(kSatFlow);
  p.speed = StepSeries(speed);
  return p;
}

LinkParams virtual_link(LinkId id, LinkKind kind) {
  LinkParams p;
  p.id = id;
  p.kind = kind;
  p.speed = StepSeries(1.0);
  p.saturation_flow = StepSeries(0.0);
  return p;
}

}  // namespace

StepSeries trapezoid_demand(const TrapezoidDemand& shape, double dt, Step horizon) {
  std::vector<double> values(static_cast<std::size_t>(std::max<Step>(horizon, 1)), 0.0);
  for (Step k = 0; k < static_cast<Step>(values.size()); ++k) {
    const double t = k * dt;
    double rate = 0.0;
    if (t < shape.warmup_end_s) {
      rate = shape.warmup_rate;
    } else if (t < shape.peak_end_s) {
      rate = shape.peak_rate;
    } else if (t < shape.zero_s) {
      rate = shape.peak_rate * (shape.zero_s - t) / (shape.zero_s - shape.peak_end_s);
    }
    values[static_cast<std::size_t>(k)] = rate;
  }
  return StepSeries(std::move(values));
}

Scenario build_paper_intersection(const IntersectionOptions& options) {
  // Arms indexed west, south, east, north. Approach turn links 1..12 and
  // exit turn links 13..24 run (left, through, right) per arm; commons are
  // 25..28 (approach) and 29..32 (exit); origins 33..36, sinks 37..48.
  struct MovementRow {
    double e, b;
  };
  // per arm: left, through, right
  const std::array<std::array<MovementRow, 3>, 4> plan = {{
      {{{0.3, 0.15}, {0.6, 0.38}, {0.1, 1.0}}},  // west
      {{{0.1, 0.15}, {0.4, 0.23}, {0.5, 1.0}}},  // south
      {{{0.3, 0.15}, {0.6, 0.38}, {0.1, 1.0}}},  // east
      {{{0.4, 0.15}, {0.5, 0.23}, {0.1, 1.0}}},  // north
  }};
  // exit arm reached by (arm, movement)
  const std::array<std::array<int, 3>, 4> exit_arm = {{
      {3, 2, 1},  // from west: left->north, through->east, right->south
      {0, 3, 2},  // from south
      {1, 0, 3},  // from east
      {2, 1, 0},  // from north
  }};

  const auto in_turn = [](int arm, int m) { return static_cast<LinkId>(arm * 3 + m + 1); };
  const auto out_turn = [](int arm, int m) { return static_cast<LinkId>(12 + arm * 3 + m + 1); };
  const auto in_common = [](int arm) { return static_cast<LinkId>(25 + arm); };
  const auto out_common = [](int arm) { return static_cast<LinkId>(29 + arm); };
  const auto origin_id = [](int arm) { return static_cast<LinkId>(33 + arm); };
  const auto sink_id = [&](int arm, int m) { return static_cast<LinkId>(37 + arm * 3 + m); };

  NetworkBuilder nb;
  for (int arm = 0; arm < 4; ++arm) {
    for (int m = 0; m < 3; ++m) {
      const double v = m == 1 ? kThroughSpeed : kTurnSpeed;
      nb.add_link(road_link(in_turn(arm, m), LinkKind::turn, 100.0, v));
      nb.add_link(road_link(out_turn(arm, m), LinkKind::turn, 100.0, v));
    }
    LinkParams approach = road_link(in_common(arm), LinkKind::common, 500.0, kThroughSpeed);
    if (arm == 0 && !options.link25_speed.empty()) approach.speed = options.link25_speed;
    nb.add_link(approach);
    nb.add_link(road_link(out_common(arm), LinkKind::common, 500.0, kThroughSpeed));
    nb.add_link(virtual_link(origin_id(arm), LinkKind::origin));
    for (int m = 0; m < 3; ++m) nb.add_link(virtual_link(sink_id(arm, m), LinkKind::sink));
  }

  NodeId next_node = 1;
  for (int arm = 0; arm < 4; ++arm) {
    // origin -> approach common
    NodeSpec inject;
    inject.id = next_node++;
    inject.incoming = {origin_id(arm)};
    inject.outgoing = {in_common(arm)};
    inject.turning_rates.push_back({origin_id(arm), in_common(arm), 1.0});
    inject.green_fraction[origin_id(arm)] = StepSeries(1.0);
    nb.add_node(std::move(inject));

    // approach divider: common -> turn links
    NodeSpec divider;
    divider.id = next_node++;
    divider.incoming = {in_common(arm)};
    divider.green_fraction[in_common(arm)] = StepSeries(1.0);
    RoadSegment seg;
    seg.common = in_common(arm);
    seg.divider = divider.id;
    for (int m = 0; m < 3; ++m) {
      divider.outgoing.push_back(in_turn(arm, m));
      divider.turning_rates.push_back({in_common(arm), in_turn(arm, m), plan[arm][m].e});
      seg.turns.push_back(in_turn(arm, m));
    }
    nb.add_node(std::move(divider));
    nb.add_segment(std::move(seg));
  }

  // the intersection itself
  NodeSpec junction;
  junction.id = next_node++;
  for (int arm = 0; arm < 4; ++arm) {
    for (int m = 0; m < 3; ++m) {
      const LinkId link = in_turn(arm, m);
      junction.incoming.push_back(link);
      junction.turning_rates.push_back({link, out_common(exit_arm[arm][m]), 1.0});
      junction.green_fraction[link] = StepSeries(plan[arm][m].b);
    }
  }
  for (int arm = 0; arm < 4; ++arm) junction.outgoing.push_back(out_common(arm));
  // Conflicting movement groups of the four-phase plan: one through and one
  // left pick from each of the two crossing axes. Right turns run unopposed.
  const auto wl = in_turn(0, 0), wt = in_turn(0, 1);
  const auto sl = in_turn(1, 0), st = in_turn(1, 1);
  const auto el = in_turn(2, 0), et = in_turn(2, 1);
  const auto nl = in_turn(3, 0), nt = in_turn(3, 1);
  junction.conflict_sets = {{wt, st, wl, sl}, {et, nt, el, nl}, {wt, nt, wl, nl}, {et, st, el, sl}};
  nb.add_node(std::move(junction));

  for (int arm = 0; arm < 4; ++arm) {
    // exit divider: exit common -> exit turn links
    NodeSpec divider;
    divider.id = next_node++;
    divider.incoming = {out_common(arm)};
    divider.green_fraction[out_common(arm)] = StepSeries(1.0);
    RoadSegment seg;
    seg.common = out_common(arm);
    seg.divider = divider.id;
    for (int m = 0; m < 3; ++m) {
      divider.outgoing.push_back(out_turn(arm, m));
      divider.turning_rates.push_back({out_common(arm), out_turn(arm, m), plan[arm][m].e});
      seg.turns.push_back(out_turn(arm, m));
    }
    nb.add_node(std::move(divider));
    nb.add_segment(std::move(seg));

    // exit turn links discharge into sinks under the downstream signal
    for (int m = 0; m < 3; ++m) {
      NodeSpec terminal;
      terminal.id = next_node++;
      terminal.incoming = {out_turn(arm, m)};
      terminal.outgoing = {sink_id(arm, m)};
      terminal.turning_rates.push_back({out_turn(arm, m), sink_id(arm, m), 1.0});
      double b = plan[arm][m].b;
      if (out_turn(arm, m) == 20) b = options.link20_green;
      terminal.green_fraction[out_turn(arm, m)] = StepSeries(b);
      nb.add_node(std::move(terminal));
    }
  }

  Scenario s = nb.take(options.dt, options.horizon);
  for (int arm = 0; arm < 4; ++arm) {
    s.demand[origin_id(arm)] = trapezoid_demand(options.demand, options.dt, options.horizon);
  }
  return s;
}

Scenario build_paper_intersection_bottleneck() {
  IntersectionOptions options;
  options.link20_green = 0.1;
  return build_paper_intersection(options);
}

Scenario build_paper_intersection_tfs() {
  IntersectionOptions options;
  options.link20_green = 0.38;
  // Light enough that exits stay uncongested; the flow pattern on the slowed
  // link then comes from its speed profile, not from downstream spillback.
  options.demand = {0.12, 0.2, 750.0, 1000.0, 1500.0};
  // Westbound approach common: 11 m/s, dropping to 3 m/s at 500 s and
  // recovering to 9 m/s at 900 s.
  std::vector<double> speed(static_cast<std::size_t>(options.horizon), 11.0);
  for (Step k = 0; k < options.horizon; ++k) {
    const double t = k * options.dt;
    speed[static_cast<std::size_t>(k)] = t < 500.0 ? 11.0 : (t < 900.0 ? 3.0 : 9.0);
  }
  options.link25_speed = StepSeries(std::move(speed));
  return build_paper_intersection(options);
}

namespace {

// Corridor construction: three signalized intersections on a west-east
// arterial, the middle one a T-junction without a south arm. Road segments
// are listed explicitly; turn links take ids 1..50 and commons 51..68.
struct CorridorRow {
  double e, b;
};

struct CorridorArm {
  int junction;            // 0..2
  char direction;          // W, S, E, N
  std::string movements;   // subset of LTR present on this approach
};

}  // namespace

Scenario build_paper_corridor() {
  const double dt = 10.0;
  const Step horizon = 200;

  // movement rows by (junction kind, direction, movement)
  const auto row = [](int junction, char dir, char m) -> CorridorRow {
    if (junction != 1) {  // junctions 1 and 3: uniform four-arm plan
      const double b_through = (dir == 'W' || dir == 'E') ? 0.33 : 0.25;
      if (m == 'T') return {0.6, b_through};
      if (m == 'L') return {0.3, 0.16};
      return {0.1, 1.0};
    }
    // middle T-junction
    if (dir == 'W') {
      if (m == 'T') return {0.8, 0.48};
      if (m == 'L') return {0.2, 0.22};
      return {0.0, 0.0};
    }
    if (dir == 'E') {
      if (m == 'T') return {0.6, 0.22};
      if (m == 'R') return {0.4, 1.0};
      return {0.0, 0.0};
    }
    if (dir == 'N') {
      if (m == 'L') return {0.6, 0.45};
      if (m == 'R') return {0.4, 1.0};
      return {0.0, 0.0};
    }
    return {0.0, 0.0};
  };

  NetworkBuilder nb;
  LinkId next_turn = 1;
  LinkId next_common = 51;
  LinkId next_virtual = 69;
  NodeId next_node = 1;

  struct Rs {
    LinkId common = 0;
    std::map<char, LinkId> turn;  // movement -> link
    int junction = -1;            // approach RS: junction its turns feed
    char direction = 'W';
  };

  const double common_lengths[18] = {500, 450, 400, 350, 300, 350, 300, 450, 500,
                                     400, 550, 400, 380, 420, 300, 450, 400, 500};
  int rs_count = 0;

  const auto make_rs = [&](int junction, char dir, const std::string& movements,
                           bool approach) -> Rs {
    Rs rs;
    rs.junction = junction;
    rs.direction = dir;
    const double length = common_lengths[rs_count++ % 18];
    rs.common = nb.add_link(road_link(next_common++, LinkKind::common, length, kThroughSpeed));

    NodeSpec divider;
    divider.id = next_node++;
    divider.incoming = {rs.common};
    divider.green_fraction[rs.common] = StepSeries(1.0);
    RoadSegment seg;
    seg.common = rs.common;
    seg.divider = divider.id;
    for (char m : movements) {
      const double v = m == 'T' ? kThroughSpeed : 6.0;
      const LinkId t = nb.add_link(road_link(next_turn++, LinkKind::turn, 100.0, v));
      rs.turn[m] = t;
      divider.outgoing.push_back(t);
      divider.turning_rates.push_back({rs.common, t, row(junction, dir, m).e});
      seg.turns.push_back(t);
    }
    nb.add_node(std::move(divider));
    nb.add_segment(std::move(seg));

    if (!approach) {
      // exit RS: each turn link drains into its own sink under the next
      // (unmodelled) signal
      for (char m : movements) {
        const LinkId sink = nb.add_link(virtual_link(next_virtual++, LinkKind::sink));
        NodeSpec terminal;
        terminal.id = next_node++;
        terminal.incoming = {rs.turn[m]};
        terminal.outgoing = {sink};
        terminal.turning_rates.push_back({rs.turn[m], sink, 1.0});
        terminal.green_fraction[rs.turn[m]] = StepSeries(row(junction, dir, m).b);
        nb.add_node(std::move(terminal));
      }
    }
    return rs;
  };

  const auto attach_origin = [&](const Rs& rs) -> LinkId {
    const LinkId origin = nb.add_link(virtual_link(next_virtual++, LinkKind::origin));
    NodeSpec inject;
    inject.id = next_node++;
    inject.incoming = {origin};
    inject.outgoing = {rs.common};
    inject.turning_rates.push_back({origin, rs.common, 1.0});
    inject.green_fraction[origin] = StepSeries(1.0);
    nb.add_node(std::move(inject));
    return origin;
  };

  // approach segments
  Rs j1w = make_rs(0, 'W', "LTR", true);
  Rs j1s = make_rs(0, 'S', "LTR", true);
  Rs j1n = make_rs(0, 'N', "LTR", true);
  Rs j1e = make_rs(0, 'E', "LTR", true);  // fed westbound from junction 2
  Rs j2w = make_rs(1, 'W', "LT", true);   // fed eastbound from junction 1
  Rs j2n = make_rs(1, 'N', "LR", true);
  Rs j2e = make_rs(1, 'E', "TR", true);   // fed westbound from junction 3
  Rs j3w = make_rs(2, 'W', "LTR", true);  // fed eastbound from junction 2
  Rs j3s = make_rs(2, 'S', "LTR", true);
  Rs j3n = make_rs(2, 'N', "LTR", true);
  Rs j3e = make_rs(2, 'E', "LTR", true);
  // exit segments ending in sinks
  Rs j1w_out = make_rs(0, 'W', "LTR", false);
  Rs j1s_out = make_rs(0, 'S', "LTR", false);
  Rs j1n_out = make_rs(0, 'N', "LTR", false);
  Rs j2n_out = make_rs(1, 'N', "LR", false);
  Rs j3s_out = make_rs(2, 'S', "LTR", false);
  Rs j3n_out = make_rs(2, 'N', "LTR", false);
  Rs j3e_out = make_rs(2, 'E', "LTR", false);

  const LinkId o1 = attach_origin(j1w);
  const LinkId o2 = attach_origin(j3e);
  const LinkId o3 = attach_origin(j1s);
  const LinkId o4 = attach_origin(j1n);
  const LinkId o5 = attach_origin(j2n);
  const LinkId o6 = attach_origin(j3s);
  const LinkId o7 = attach_origin(j3n);

  // junction wiring: movement -> destination common link
  struct Junction {
    std::vector<const Rs*> approaches;
    std::map<std::pair<char, char>, LinkId> dest;  // (direction, movement) -> common
  };
  Junction junction1{{&j1w, &j1s, &j1n, &j1e},
                     {{{'W', 'L'}, j1n_out.common}, {{'W', 'T'}, j2w.common},
                      {{'W', 'R'}, j1s_out.common}, {{'S', 'L'}, j1w_out.common},
                      {{'S', 'T'}, j1n_out.common}, {{'S', 'R'}, j2w.common},
                      {{'N', 'L'}, j2w.common},     {{'N', 'T'}, j1s_out.common},
                      {{'N', 'R'}, j1w_out.common}, {{'E', 'L'}, j1s_out.common},
                      {{'E', 'T'}, j1w_out.common}, {{'E', 'R'}, j1n_out.common}}};
  Junction junction2{{&j2w, &j2n, &j2e},
                     {{{'W', 'T'}, j3w.common}, {{'W', 'L'}, j2n_out.common},
                      {{'N', 'L'}, j3w.common}, {{'N', 'R'}, j1e.common},
                      {{'E', 'T'}, j1e.common}, {{'E', 'R'}, j2n_out.common}}};
  Junction junction3{{&j3w, &j3s, &j3n, &j3e},
                     {{{'W', 'L'}, j3n_out.common}, {{'W', 'T'}, j3e_out.common},
                      {{'W', 'R'}, j3s_out.common}, {{'S', 'L'}, j2e.common},
                      {{'S', 'T'}, j3n_out.common}, {{'S', 'R'}, j3e_out.common},
                      {{'N', 'L'}, j3e_out.common}, {{'N', 'T'}, j3s_out.common},
                      {{'N', 'R'}, j2e.common},     {{'E', 'L'}, j3s_out.common},
                      {{'E', 'T'}, j2e.common},     {{'E', 'R'}, j3n_out.common}}};

  const Junction* junctions[3] = {&junction1, &junction2, &junction3};
  for (int j = 0; j < 3; ++j) {
    NodeSpec node;
    node.id = next_node++;
    std::map<char, std::map<char, LinkId>> members;  // direction -> movement -> link
    for (const Rs* rs : junctions[j]->approaches) {
      for (const auto& [m, link] : rs->turn) {
        node.incoming.push_back(link);
        node.green_fraction[link] = StepSeries(row(j, rs->direction, m).b);
        node.turning_rates.push_back({link, junctions[j]->dest.at({rs->direction, m}), 1.0});
        members[rs->direction][m] = link;
      }
    }
    std::set<LinkId> outs;
    for (const auto& [key, dest] : junctions[j]->dest) outs.insert(dest);
    node.outgoing.assign(outs.begin(), outs.end());
    if (j != 1) {
      node.conflict_sets = {
          {members['W']['T'], members['S']['T'], members['W']['L'], members['S']['L']},
          {members['E']['T'], members['N']['T'], members['E']['L'], members['N']['L']},
          {members['W']['T'], members['N']['T'], members['W']['L'], members['N']['L']},
          {members['E']['T'], members['S']['T'], members['E']['L'], members['S']['L']}};
    } else {
      node.conflict_sets = {{members['W']['T'], members['N']['L']},
                            {members['E']['T'], members['W']['L'], members['N']['L']}};
    }
    nb.add_node(std::move(node));
  }

  Scenario s = nb.take(dt, horizon);
  const TrapezoidDemand arterial{0.3, 0.5, 750.0, 1000.0, 1500.0};
  const TrapezoidDemand side{0.15, 0.25, 750.0, 1000.0, 1500.0};
  s.demand[o1] = trapezoid_demand(arterial, dt, horizon);
  s.demand[o2] = trapezoid_demand(arterial, dt, horizon);
  for (LinkId o : {o3, o4, o5, o6, o7}) s.demand[o] = trapezoid_demand(side, dt, horizon);
  return s;
}

Scenario build_single_link(const SingleLinkOptions& options) {
  NetworkBuilder nb;
  LinkParams link = road_link(1, LinkKind::common, options.length, 0.0);
  link.speed = options.speed;
  link.jam_density = options.jam_density;
  link.backward_wave_speed = options.backward_wave_speed;
  link.saturation_flow = options.saturation_flow;
  nb.add_link(std::move(link));
  nb.add_link(virtual_link(2, LinkKind::origin));
  nb.add_link(virtual_link(3, LinkKind::sink));

  NodeSpec inject;
  inject.id = 1;
  inject.incoming = {2};
  inject.outgoing = {1};
  inject.turning_rates.push_back({2, 1, 1.0});
  inject.green_fraction[2] = StepSeries(1.0);
  nb.add_node(std::move(inject));

  NodeSpec terminal;
  terminal.id = 2;
  terminal.incoming = {1};
  terminal.outgoing = {3};
  terminal.turning_rates.push_back({1, 3, 1.0});
  terminal.green_fraction[1] = options.green;
  nb.add_node(std::move(terminal));

  Scenario s = nb.take(options.dt, options.horizon);
  s.demand[2] = options.demand;
  return s;
}

Scenario build_named_scenario(const std::string& name) {
  if (name == "paper-intersection") return build_paper_intersection();
  if (name == "paper-intersection-bottleneck") return build_paper_intersection_bottleneck();
  if (name == "paper-intersection-tfs") return build_paper_intersection_tfs();
  if (name == "paper-corridor") return build_paper_corridor();
  if (name == "single-link") return build_single_link();
  throw std::invalid_argument("unknown scenario template: " + name);
}

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names = {
      "paper-intersection", "paper-intersection-bottleneck", "paper-intersection-tfs",
      "paper-corridor", "single-link"};
  return names;
}

}  // namespace lqm
