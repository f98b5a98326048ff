#include "lqm/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace lqm {

namespace {

constexpr double kRateRowTolerance = 1e-9;

std::string link_name(LinkId id) { return "link " + std::to_string(id); }
std::string node_name(NodeId id) { return "node " + std::to_string(id); }

/// Longest explicit series among the scenario's step-indexed inputs; the
/// conflict and range checks sweep this many steps.
Step effective_steps(const Scenario& s) {
  std::size_t n = static_cast<std::size_t>(std::max<Step>(s.horizon_steps, 1));
  for (const auto& l : s.links) {
    n = std::max({n, l.speed.size(), l.saturation_flow.size()});
  }
  for (const auto& nd : s.nodes) {
    for (const auto& [id, series] : nd.green_fraction) n = std::max(n, series.size());
  }
  for (const auto& [id, series] : s.demand) n = std::max(n, series.size());
  return static_cast<Step>(n);
}

class Checker {
 public:
  explicit Checker(ValidationResult& out) : out_(out) {}

  void fail(const std::string& entity, const std::string& invariant, Step step,
            const std::string& detail) {
    out_.violations.push_back({Severity::error, entity, invariant, step, detail});
  }
  void warn(const std::string& entity, const std::string& invariant, Step step,
            const std::string& detail) {
    out_.warnings.push_back({Severity::warning, entity, invariant, step, detail});
  }

 private:
  ValidationResult& out_;
};

}  // namespace

double NodeSpec::turning_rate(LinkId from, LinkId to) const {
  for (const auto& t : turning_rates) {
    if (t.from == from && t.to == to) return t.rate;
  }
  return 0.0;
}

const StepSeries* NodeSpec::green_for(LinkId incoming_link) const {
  auto it = green_fraction.find(incoming_link);
  return it == green_fraction.end() ? nullptr : &it->second;
}

const LinkParams* Scenario::find_link(LinkId id) const {
  for (const auto& l : links) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const NodeSpec* Scenario::find_node(NodeId id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

std::vector<LinkId> Scenario::real_link_ids() const {
  std::vector<LinkId> ids;
  for (const auto& l : links) {
    if (!l.is_virtual()) ids.push_back(l.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string Violation::to_string() const {
  std::ostringstream os;
  os << (severity == Severity::error ? "violation" : "warning") << ": " << entity << ": "
     << invariant;
  if (step >= 0) os << " at step " << step;
  if (!detail.empty()) os << " (" << detail << ")";
  return os.str();
}

ValidationResult validate_scenario(const Scenario& s) {
  ValidationResult result;
  Checker check(result);
  const Step steps = effective_steps(s);

  if (!(s.dt > 0.0)) check.fail("scenario", "dt > 0", -1, "dt = " + std::to_string(s.dt));
  if (s.horizon_steps < 1) {
    check.fail("scenario", "horizon_steps >= 1", -1,
               "horizon_steps = " + std::to_string(s.horizon_steps));
  }

  std::set<LinkId> link_ids;
  for (const auto& l : s.links) {
    const std::string me = link_name(l.id);
    if (!link_ids.insert(l.id).second) check.fail(me, "link ids unique", -1, "duplicate id");
    if (l.speed.empty()) {
      check.fail(me, "speed profile nonempty", -1, "");
      continue;
    }
    if (l.is_virtual()) continue;  // virtual links carry no physical geometry

    if (!(l.length > 0.0)) check.fail(me, "length > 0", -1, std::to_string(l.length));
    if (!(l.jam_density > 0.0)) check.fail(me, "jam_density > 0", -1, std::to_string(l.jam_density));
    if (!(l.backward_wave_speed > 0.0)) {
      check.fail(me, "backward_wave_speed > 0", -1, std::to_string(l.backward_wave_speed));
    }
    const double vmin = l.vmin();
    if (!(vmin > 0.0)) check.fail(me, "min_desired_speed > 0", -1, std::to_string(vmin));
    for (Step k = 0; k < steps; ++k) {
      const double v = l.speed.at(k);
      if (!(v > 0.0)) {
        check.fail(me, "v_f(k) > 0", k, std::to_string(v));
        break;
      }
      if (v < vmin - 1e-12) {
        check.fail(me, "v_f(k) >= min_desired_speed", k,
                   std::to_string(v) + " < " + std::to_string(vmin));
        break;
      }
      if (l.jam_density > 0.0 && l.backward_wave_speed > 0.0) {
        const double q_cr = l.jam_density * v * l.backward_wave_speed / (v + l.backward_wave_speed);
        if (!(q_cr > 0.0)) {
          check.fail(me, "critical flow well-defined", k, "q_cr = " + std::to_string(q_cr));
          break;
        }
      }
    }
    if (l.saturation_flow.empty()) {
      check.fail(me, "saturation flow nonempty", -1, "");
    } else if (l.saturation_flow.min_value() < 0.0) {
      check.fail(me, "saturation flow >= 0", -1, std::to_string(l.saturation_flow.min_value()));
    }
    if (s.dt > 0.0 && vmin > 0.0) {
      // Step admissibility. A link crossed within a single step at full speed
      // makes the fixed-speed lookback degenerate (n_f = 1 even when empty);
      // the engine handles it through the time-varying branch, but it is
      // worth flagging.
      if (l.length <= l.speed.max_value() * s.dt) {
        check.warn(me, "free-flow crossing time <= dt (n_f = 1 reachable when empty)", -1,
                   "the time-varying branch handles this, consider a smaller dt");
      }
    }
  }

  // node structure
  std::set<NodeId> node_ids;
  std::map<LinkId, int> downstream_count, upstream_count;
  for (const auto& n : s.nodes) {
    const std::string me = node_name(n.id);
    if (!node_ids.insert(n.id).second) check.fail(me, "node ids unique", -1, "duplicate id");

    for (LinkId in : n.incoming) {
      downstream_count[in]++;
      if (!s.find_link(in)) check.fail(me, "incoming links exist", -1, link_name(in));
    }
    for (LinkId out : n.outgoing) {
      upstream_count[out]++;
      if (!s.find_link(out)) check.fail(me, "outgoing links exist", -1, link_name(out));
    }

    const std::set<LinkId> in_set(n.incoming.begin(), n.incoming.end());
    const std::set<LinkId> out_set(n.outgoing.begin(), n.outgoing.end());

    for (const auto& t : n.turning_rates) {
      if (t.rate < 0.0 || t.rate > 1.0) {
        check.fail(me, "turning rate in [0,1]", -1,
                   link_name(t.from) + "->" + link_name(t.to) + " = " + std::to_string(t.rate));
      }
      if (t.rate > 0.0) {
        if (!in_set.count(t.from) || !s.find_link(t.from)) {
          check.fail(me, "turning rates reference existing incoming links", -1, link_name(t.from));
        }
        if (!out_set.count(t.to) || !s.find_link(t.to)) {
          check.fail(me, "turning rates reference existing outgoing links", -1, link_name(t.to));
        }
      }
    }
    for (LinkId in : n.incoming) {
      double row = 0.0;
      for (const auto& t : n.turning_rates) {
        if (t.from == in) row += t.rate;
      }
      if (std::abs(row - 1.0) > kRateRowTolerance) {
        check.fail(me, "turning-rate row sums to 1", -1,
                   link_name(in) + " row sum = " + std::to_string(row));
      }
      const StepSeries* b = n.green_for(in);
      if (!b || b->empty()) {
        check.fail(me, "green fraction defined for incoming link", -1, link_name(in));
        continue;
      }
      for (Step k = 0; k < steps; ++k) {
        const double v = b->at(k);
        if (!(v > 0.0) || v > 1.0) {
          check.fail(me, "green fraction in (0,1]", k, link_name(in) + " b = " + std::to_string(v));
          break;
        }
      }
    }
    for (std::size_t c = 0; c < n.conflict_sets.size(); ++c) {
      const auto& members = n.conflict_sets[c];
      bool members_ok = true;
      for (LinkId m : members) {
        if (!in_set.count(m) || !n.green_for(m)) {
          check.fail(me, "conflict set members are signalled incoming links", -1, link_name(m));
          members_ok = false;
        }
      }
      if (!members_ok) continue;
      for (Step k = 0; k < steps; ++k) {
        double sum = 0.0;
        for (LinkId m : members) sum += n.green_for(m)->at(k);
        if (sum > 1.0 + 1e-12) {
          check.fail(me, "conflict-set green fractions sum <= 1", k,
                     "set " + std::to_string(c) + " sum = " + std::to_string(sum));
          break;
        }
      }
    }
  }

  // connectivity roles
  for (const auto& l : s.links) {
    const std::string me = link_name(l.id);
    const int up = upstream_count.count(l.id) ? upstream_count[l.id] : 0;
    const int down = downstream_count.count(l.id) ? downstream_count[l.id] : 0;
    if (up > 1) check.fail(me, "at most one upstream node", -1, std::to_string(up));
    if (down > 1) check.fail(me, "at most one downstream node", -1, std::to_string(down));
    switch (l.kind) {
      case LinkKind::origin:
        if (up != 0) check.fail(me, "origin has no upstream node", -1, "");
        if (down != 1) check.fail(me, "origin feeds exactly one node", -1, std::to_string(down));
        if (!s.demand.count(l.id)) check.warn(me, "origin without demand series", -1, "treated as 0");
        break;
      case LinkKind::sink:
        if (down != 0) check.fail(me, "sink has no downstream node", -1, "");
        if (up != 1) check.fail(me, "sink is fed by exactly one node", -1, std::to_string(up));
        break;
      default:
        if (up == 0) check.warn(me, "road link without upstream node", -1, "it can never fill");
        if (down == 0) check.warn(me, "road link without downstream node", -1, "it can never drain");
        break;
    }
  }

  for (const auto& [origin, series] : s.demand) {
    const LinkParams* l = s.find_link(origin);
    if (!l) {
      check.fail(link_name(origin), "demand references existing link", -1, "");
      continue;
    }
    if (l->kind != LinkKind::origin) {
      check.fail(link_name(origin), "demand attaches to origin links", -1, to_string(l->kind));
    }
    if (series.empty()) {
      check.fail(link_name(origin), "demand series nonempty", -1, "");
    } else if (series.min_value() < 0.0) {
      check.fail(link_name(origin), "demand rates >= 0", -1, std::to_string(series.min_value()));
    }
  }

  // segment structure
  for (const auto& seg : s.segments) {
    std::vector<const RoadSegment*> stack = {&seg};
    while (!stack.empty()) {
      const RoadSegment* cur = stack.back();
      stack.pop_back();
      for (const auto& nested : cur->nested) stack.push_back(&nested);
      const std::string me = "segment(common " + std::to_string(cur->common) + ")";
      if (cur->turns.empty()) continue;
      const NodeSpec* divider = s.find_node(cur->divider);
      if (!divider) {
        check.fail(me, "divider node exists", -1, node_name(cur->divider));
        continue;
      }
      if (std::find(divider->incoming.begin(), divider->incoming.end(), cur->common) ==
          divider->incoming.end()) {
        check.fail(me, "common link feeds the divider", -1, "");
      }
      for (LinkId t : cur->turns) {
        if (std::find(divider->outgoing.begin(), divider->outgoing.end(), t) ==
            divider->outgoing.end()) {
          check.fail(me, "turn links leave the divider", -1, link_name(t));
        }
      }
      if (const StepSeries* b = divider->green_for(cur->common)) {
        for (Step k = 0; k < steps; ++k) {
          if (b->at(k) != 1.0) {
            check.fail(me, "divider is unsignalled (green fraction 1)", k,
                       "b = " + std::to_string(b->at(k)));
            break;
          }
        }
      }
    }
  }

  return result;
}

}  // namespace lqm
