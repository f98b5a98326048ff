#include "lqm/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lqm {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) fail(where, "unknown key '" + it.key() + "'");
  }
}

enum class Dimension { length, time, speed, density, flow, plain };

double unit_factor(Dimension dim, const std::string& unit, const std::string& where) {
  switch (dim) {
    case Dimension::length:
      if (unit == "m") return 1.0;
      break;
    case Dimension::time:
      if (unit == "s") return 1.0;
      break;
    case Dimension::speed:
      if (unit == "m/s") return 1.0;
      if (unit == "km/h") return 1.0 / 3.6;
      break;
    case Dimension::density:
      if (unit == "veh/m") return 1.0;
      if (unit == "veh/km") return 1.0 / 1000.0;
      break;
    case Dimension::flow:
      if (unit == "veh/s") return 1.0;
      break;
    case Dimension::plain:
      break;
  }
  fail(where, "no unit conversion for '" + unit + "'");
}

double parse_quantity(const json& value, Dimension dim, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    std::istringstream is(text);
    double magnitude = 0.0;
    std::string unit;
    if (!(is >> magnitude)) fail(where, "expected '<number> <unit>', got '" + text + "'");
    std::getline(is, unit);
    const auto first = unit.find_first_not_of(' ');
    if (first == std::string::npos) fail(where, "missing unit in '" + text + "'");
    unit = unit.substr(first);
    return magnitude * unit_factor(dim, unit, where);
  }
  fail(where, "expected a number or a '<number> <unit>' string");
}

StepSeries parse_series(const json& value, Dimension dim, const std::string& where) {
  if (value.is_array()) {
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
      out.push_back(parse_quantity(value[i], dim, where + "[" + std::to_string(i) + "]"));
    }
    if (out.empty()) fail(where, "series may not be empty");
    return StepSeries(std::move(out));
  }
  return StepSeries(parse_quantity(value, dim, where));
}

LinkParams parse_link(const json& obj, const std::string& where) {
  check_keys(obj, where,
             {"id", "kind", "length", "jam_density", "backward_wave_speed", "saturation_flow",
              "speed", "min_desired_speed"});
  LinkParams p;
  if (!obj.contains("id")) fail(where, "missing 'id'");
  p.id = obj.at("id").get<LinkId>();
  p.kind = link_kind_from_string(obj.value("kind", "common"));
  if (p.is_virtual()) {
    p.speed = StepSeries(1.0);
    p.saturation_flow = StepSeries(0.0);
    return p;
  }
  for (const char* key : {"length", "jam_density", "backward_wave_speed", "speed"}) {
    if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
  }
  p.length = parse_quantity(obj.at("length"), Dimension::length, where + ".length");
  p.jam_density = parse_quantity(obj.at("jam_density"), Dimension::density, where + ".jam_density");
  p.backward_wave_speed = parse_quantity(obj.at("backward_wave_speed"), Dimension::speed,
                                         where + ".backward_wave_speed");
  p.saturation_flow = obj.contains("saturation_flow")
                          ? parse_series(obj.at("saturation_flow"), Dimension::flow,
                                         where + ".saturation_flow")
                          : StepSeries(0.5);
  p.speed = parse_series(obj.at("speed"), Dimension::speed, where + ".speed");
  if (obj.contains("min_desired_speed")) {
    p.min_desired_speed =
        parse_quantity(obj.at("min_desired_speed"), Dimension::speed, where + ".min_desired_speed");
  }
  return p;
}

NodeSpec parse_node(const json& obj, const std::string& where) {
  check_keys(obj, where,
             {"id", "incoming", "outgoing", "turning_rates", "green_fraction", "conflict_sets"});
  NodeSpec n;
  if (!obj.contains("id")) fail(where, "missing 'id'");
  n.id = obj.at("id").get<NodeId>();
  for (const auto& v : obj.value("incoming", json::array())) n.incoming.push_back(v.get<LinkId>());
  for (const auto& v : obj.value("outgoing", json::array())) n.outgoing.push_back(v.get<LinkId>());
  for (const auto& v : obj.value("turning_rates", json::array())) {
    check_keys(v, where + ".turning_rates[]", {"from", "to", "rate"});
    n.turning_rates.push_back({v.at("from").get<LinkId>(), v.at("to").get<LinkId>(),
                               v.at("rate").get<double>()});
  }
  for (const auto& v : obj.value("green_fraction", json::array())) {
    check_keys(v, where + ".green_fraction[]", {"link", "value"});
    n.green_fraction[v.at("link").get<LinkId>()] =
        parse_series(v.at("value"), Dimension::plain, where + ".green_fraction[].value");
  }
  for (const auto& v : obj.value("conflict_sets", json::array())) {
    std::vector<LinkId> members;
    for (const auto& m : v) members.push_back(m.get<LinkId>());
    n.conflict_sets.push_back(std::move(members));
  }
  return n;
}

RoadSegment parse_segment(const json& obj, const std::string& where) {
  check_keys(obj, where, {"common", "turns", "divider", "nested"});
  RoadSegment seg;
  seg.common = obj.at("common").get<LinkId>();
  for (const auto& v : obj.value("turns", json::array())) seg.turns.push_back(v.get<LinkId>());
  seg.divider = obj.value("divider", 0);
  for (const auto& v : obj.value("nested", json::array())) {
    seg.nested.push_back(parse_segment(v, where + ".nested[]"));
  }
  return seg;
}

json series_to_json(const StepSeries& s) {
  if (s.size() == 1) return json(s.values().front());
  return json(s.values());
}

json segment_to_json(const RoadSegment& seg) {
  json obj;
  obj["common"] = seg.common;
  obj["turns"] = seg.turns;
  obj["divider"] = seg.divider;
  if (!seg.nested.empty()) {
    obj["nested"] = json::array();
    for (const auto& n : seg.nested) obj["nested"].push_back(segment_to_json(n));
  }
  return obj;
}

}  // namespace

Scenario parse_scenario_json(const std::string& text, const std::string& origin_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin_name, e.what());
  }
  check_keys(root, origin_name, {"schema", "dt", "horizon", "links", "nodes", "segments", "demand"});
  if (root.value("schema", 0) != 1) fail(origin_name, "expected \"schema\": 1");

  Scenario s;
  if (!root.contains("dt")) fail(origin_name, "missing 'dt'");
  s.dt = parse_quantity(root.at("dt"), Dimension::time, origin_name + ".dt");
  s.horizon_steps = root.value("horizon", 0);

  std::size_t i = 0;
  for (const auto& l : root.value("links", json::array())) {
    s.links.push_back(parse_link(l, origin_name + ".links[" + std::to_string(i++) + "]"));
  }
  i = 0;
  for (const auto& n : root.value("nodes", json::array())) {
    s.nodes.push_back(parse_node(n, origin_name + ".nodes[" + std::to_string(i++) + "]"));
  }
  i = 0;
  for (const auto& seg : root.value("segments", json::array())) {
    s.segments.push_back(parse_segment(seg, origin_name + ".segments[" + std::to_string(i++) + "]"));
  }
  i = 0;
  for (const auto& d : root.value("demand", json::array())) {
    const std::string where = origin_name + ".demand[" + std::to_string(i++) + "]";
    check_keys(d, where, {"origin", "rate"});
    s.demand[d.at("origin").get<LinkId>()] =
        parse_series(d.at("rate"), Dimension::flow, where + ".rate");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_json(buffer.str(), path);
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["schema"] = 1;
  root["dt"] = s.dt;
  root["horizon"] = s.horizon_steps;
  root["links"] = json::array();
  for (const auto& l : s.links) {
    json obj;
    obj["id"] = l.id;
    obj["kind"] = to_string(l.kind);
    if (!l.is_virtual()) {
      obj["length"] = l.length;
      obj["jam_density"] = l.jam_density;
      obj["backward_wave_speed"] = l.backward_wave_speed;
      obj["saturation_flow"] = series_to_json(l.saturation_flow);
      obj["speed"] = series_to_json(l.speed);
      if (l.min_desired_speed) obj["min_desired_speed"] = *l.min_desired_speed;
    }
    root["links"].push_back(std::move(obj));
  }
  root["nodes"] = json::array();
  for (const auto& n : s.nodes) {
    json obj;
    obj["id"] = n.id;
    obj["incoming"] = n.incoming;
    obj["outgoing"] = n.outgoing;
    obj["turning_rates"] = json::array();
    for (const auto& t : n.turning_rates) {
      obj["turning_rates"].push_back({{"from", t.from}, {"to", t.to}, {"rate", t.rate}});
    }
    obj["green_fraction"] = json::array();
    for (const auto& [link, series] : n.green_fraction) {
      obj["green_fraction"].push_back({{"link", link}, {"value", series_to_json(series)}});
    }
    if (!n.conflict_sets.empty()) obj["conflict_sets"] = n.conflict_sets;
    root["nodes"].push_back(std::move(obj));
  }
  if (!s.segments.empty()) {
    root["segments"] = json::array();
    for (const auto& seg : s.segments) root["segments"].push_back(segment_to_json(seg));
  }
  root["demand"] = json::array();
  for (const auto& [origin, rate] : s.demand) {
    root["demand"].push_back({{"origin", origin}, {"rate", series_to_json(rate)}});
  }
  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out << scenario_to_json(s);
  if (!out) fail(path, "write failed");
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

const char* kTraceHeader =
    "step,link,cum_in,cum_queue,cum_out,rate_in,rate_out,queue_len,queue_density";

}  // namespace

void write_trace(const TraceSet& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out << "# lqm-trace schema=1 dt=" << format_number(trace.dt) << "\n";
  out << kTraceHeader << "\n";
  for (const auto& r : trace.rows) {
    out << r.step << ',' << r.link << ',' << format_number(r.cum_in) << ','
        << format_number(r.cum_queue) << ',' << format_number(r.cum_out) << ','
        << format_number(r.rate_in) << ',' << format_number(r.rate_out) << ','
        << format_number(r.queue_len) << ',' << format_number(r.queue_density) << "\n";
  }
  if (!out) fail(path, "write failed");
}

TraceSet load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  TraceSet trace;
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) fail(path, "empty file");
  ++line_no;
  double dt = 0.0;
  if (std::sscanf(line.c_str(), "# lqm-trace schema=1 dt=%lf", &dt) != 1) {
    fail(path + ":1", "expected '# lqm-trace schema=1 dt=...'");
  }
  trace.dt = dt;

  if (!std::getline(in, line)) fail(path, "missing header row");
  ++line_no;
  if (line != kTraceHeader) fail(path + ":2", "unexpected header row");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    TraceRow r;
    const int got = std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.step,
                                &r.link, &r.cum_in, &r.cum_queue, &r.cum_out, &r.rate_in,
                                &r.rate_out, &r.queue_len, &r.queue_density);
    if (got != 9) fail(path + ":" + std::to_string(line_no), "malformed row");
    trace.rows.push_back(r);
  }
  std::sort(trace.rows.begin(), trace.rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return a.step != b.step ? a.step < b.step : a.link < b.link;
  });
  return trace;
}

StepSeries smooth_demand(const StepSeries& series, int window) {
  if (window <= 1 || series.size() <= 1) return series;
  const auto& v = series.values();
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t start = 0; start < v.size(); start += static_cast<std::size_t>(window)) {
    const std::size_t end = std::min(v.size(), start + static_cast<std::size_t>(window));
    double mean = 0.0;
    for (std::size_t i = start; i < end; ++i) mean += v[i];
    mean /= static_cast<double>(end - start);
    for (std::size_t i = start; i < end; ++i) out[i] = mean;
  }
  return StepSeries(std::move(out));
}

void smooth_scenario_demand(Scenario& s, int window) {
  for (auto& [origin, series] : s.demand) series = smooth_demand(series, window);
}

}  // namespace lqm
