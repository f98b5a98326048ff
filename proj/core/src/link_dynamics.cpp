#include "lqm/link_dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace lqm {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

FdPoint fd_point(const LinkParams& p, Step k) {
  const double v = p.speed.at(k);
  assert(v > 0.0);
  const double w = p.backward_wave_speed;
  FdPoint fd;
  fd.critical_flow = p.jam_density * v * w / (v + w);
  fd.critical_density = p.jam_density * w / (v + w);
  return fd;
}

double queue_density(const FdPoint& fd, double jam_density, double q_out) {
  assert(fd.critical_flow > 0.0);
  const double raw = fd.critical_density + (jam_density - fd.critical_density) *
                                               (fd.critical_flow - q_out) / fd.critical_flow;
  // Outflow transiently above the critical flow would put the density on the
  // free-flow branch; pin it to the congested branch.
  return clamp(raw, fd.critical_density, jam_density);
}

QueueLengths queue_lengths(const LinkRecord& rec, Step k) {
  const double rho_q = rec.queue_dens[static_cast<std::size_t>(k)];
  assert(rho_q > 0.0);
  QueueLengths out;
  out.queued = clamp((rec.queue_at(k) - rec.out_at(k)) / rho_q, 0.0, rec.params->length);
  out.free_flow = rec.params->length - out.queued;
  return out;
}

StepSplit split_travel_time(double travel_time, double dt) {
  StepSplit s;
  const double ratio = travel_time / dt;
  s.steps = static_cast<int>(std::ceil(ratio));
  s.fraction = static_cast<double>(s.steps) - ratio;
  return s;
}

QueueInflowFixed queue_inflow_fixed(const LinkRecord& rec, double free_len, double v_f, double dt,
                                    Step k) {
  QueueInflowFixed out;
  const StepSplit split = split_travel_time(free_len / v_f, dt);
  out.n_f = split.steps;
  out.gamma_f = split.fraction;
  out.cfl_ok = split.steps >= 2;
  out.value = split.fraction * rec.in_at(k + 1 - split.steps) +
              (1.0 - split.fraction) * rec.in_at(k - split.steps);
  return out;
}

TravelDistanceTable travel_distance_table(const StepSeries& speed, double v_min, double length,
                                          double dt, Step k) {
  assert(v_min > 0.0);
  TravelDistanceTable table;
  table.nbar_f = static_cast<int>(std::ceil(length / v_min / dt));
  table.window_start = std::max<Step>(1, k - table.nbar_f);
  if (k < table.window_start) return table;  // k = 0: empty window
  table.distances.resize(static_cast<std::size_t>(k - table.window_start + 1));
  // Cumulative speed sums from each entry step through k; filling backwards
  // makes each row one addition.
  double acc = 0.0;
  for (Step entry = k; entry >= table.window_start; --entry) {
    acc += speed.at(entry) * dt;
    table.distances[static_cast<std::size_t>(entry - table.window_start)] = acc;
  }
  return table;
}

namespace {

/// Shared selection sum of Eqs. for queue inflow and desired outflow: the
/// base cumulative inflow at the window's lower edge plus every selected
/// increment. The first window increment is zeroed by construction.
double select_window_inflow(const LinkRecord& rec, const TravelDistanceTable& table, Step k,
                            double threshold) {
  double total = rec.in_at(k - table.nbar_f);
  for (std::size_t j = 1; j < table.distances.size(); ++j) {
    if (table.distances[j] > threshold) {
      const Step at = table.window_start + static_cast<Step>(j);
      total += rec.in_at(at) - rec.in_at(at - 1);
    }
  }
  return total;
}

}  // namespace

double queue_inflow_tvfs(const LinkRecord& rec, const TravelDistanceTable& table, double free_len,
                         Step k) {
  const double raw = select_window_inflow(rec, table, k, free_len);
  return clamp(raw, rec.out_at(k), rec.in_at(k));
}

InflowLimit inflow_limit(const LinkRecord& rec, double queue_len, double free_len,
                         double queue_dens, double wave_speed, double dt, Step k) {
  assert(wave_speed > 0.0);
  StepSplit split = split_travel_time(queue_len / wave_speed, dt);
  if (split.steps < 1) {
    split.steps = 1;
    split.fraction = 1.0 - queue_len / wave_speed / dt;
  }
  // History indices never run past k: a wave crossing the queue within the
  // current step reads the latest committed outflow.
  const Step hi = std::min<Step>(k, k + 2 - split.steps);
  const Step lo = std::min<Step>(k, k + 1 - split.steps);
  const double inflow_shifted =
      split.fraction * rec.out_at(hi) + (1.0 - split.fraction) * rec.out_at(lo);

  InflowLimit out;
  out.max_cum_in = inflow_shifted + queue_dens * queue_len + rec.params->jam_density * free_len;
  out.max_cum_in = std::max(out.max_cum_in, rec.in_at(k));
  out.max_rate = (out.max_cum_in - rec.in_at(k)) / dt;
  return out;
}

double actual_inflow(double q_in_max, double q_in_desired, const LinkRecord& rec, double dt,
                     Step k) {
  assert(q_in_max >= 0.0 && q_in_desired >= 0.0);
  return rec.in_at(k) + std::min(q_in_max, q_in_desired) * dt;
}

OutflowBounds outflow_bounds(const LinkRecord& rec, const TravelDistanceTable& table,
                             double saturation_flow, double green_fraction, double dt, Step k,
                             double prev_max_cum_out) {
  OutflowBounds out;
  const double desired = select_window_inflow(rec, table, k, rec.params->length);
  out.desired_cum_out = clamp(desired, rec.out_at(k), rec.in_at(k));
  // The saturation term is a per-step vehicle budget: q_sat(k) * b(k) * dt.
  const double budget = rec.out_at(k) + saturation_flow * green_fraction * dt;
  out.max_cum_out = std::max(std::min(budget, out.desired_cum_out), rec.out_at(k));
  out.max_rate = (out.max_cum_out - prev_max_cum_out) / dt;
  return out;
}

}  // namespace lqm
