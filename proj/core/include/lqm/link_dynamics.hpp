#pragma once

#include <vector>

#include "lqm/network.hpp"
#include "lqm/types.hpp"

namespace lqm {

/// Per-link cumulative history. Index k holds the state at time k*dt; index 0
/// is the empty initial state and every series is 0 there. Values before step
/// 0 read as 0.
struct LinkRecord {
  const LinkParams* params = nullptr;
  std::vector<double> cum_in;      // N_in(k), veh
  std::vector<double> cum_queue;   // N_qu(k), veh
  std::vector<double> cum_out;     // N_out(k), veh
  std::vector<double> queue_len;   // L_q(k), m
  std::vector<double> queue_dens;  // rho_q(k), veh/m

  double in_at(Step k) const { return k < 0 ? 0.0 : cum_in[static_cast<std::size_t>(k)]; }
  double queue_at(Step k) const { return k < 0 ? 0.0 : cum_queue[static_cast<std::size_t>(k)]; }
  double out_at(Step k) const { return k < 0 ? 0.0 : cum_out[static_cast<std::size_t>(k)]; }
};

/// Apex of the triangular fundamental diagram at step k.
struct FdPoint {
  double critical_flow = 0.0;     // q_cr(k), veh/s
  double critical_density = 0.0;  // rho_cr(k), veh/m
};

/// q_cr = rho_jam * v_f * w / (v_f + w), rho_cr = rho_jam * w / (v_f + w).
FdPoint fd_point(const LinkParams& p, Step k);

/// Density of the queued part given the realized outflow rate:
/// rho_q = rho_cr + (rho_jam - rho_cr) * (q_cr - q_out) / q_cr,
/// clamped into [rho_cr, rho_jam].
double queue_density(const FdPoint& fd, double jam_density, double q_out);

struct QueueLengths {
  double queued = 0.0;     // L_q, m
  double free_flow = 0.0;  // L_f, m
};

/// L_q = (N_qu(k) - N_out(k)) / rho_q(k), clamped to [0, L]; L_f = L - L_q.
QueueLengths queue_lengths(const LinkRecord& rec, Step k);

/// Number of whole steps and the fractional remainder of a travel time:
/// n = ceil(t / dt), gamma = n - t / dt in [0, 1).
struct StepSplit {
  int steps = 0;
  double fraction = 0.0;
};
StepSplit split_travel_time(double travel_time, double dt);

/// Cumulative queue inflow under a constant free-flow speed:
/// N_qu(k) = gamma_f * N_in(k+1-n_f) + (1-gamma_f) * N_in(k-n_f).
/// Requires n_f >= 2; shorter lookbacks violate the step-size admissibility
/// condition and must go through the time-varying branch.
struct QueueInflowFixed {
  double value = 0.0;  // N_qu(k), veh
  int n_f = 0;
  double gamma_f = 0.0;
  bool cfl_ok = false;  // false when n_f < 2
};
QueueInflowFixed queue_inflow_fixed(const LinkRecord& rec, double free_len, double v_f, double dt,
                                    Step k);

/// Potential travel distances of the flows that entered over the lookback
/// window [max(1, k - nbar_f), k]. Entry j covers the cumulative distance
/// dt * sum of v_f over [window_start + j, k]; distances strictly decrease
/// along the vector while speeds are positive.
struct TravelDistanceTable {
  std::vector<double> distances;  // D_f, m
  Step window_start = 1;
  int nbar_f = 0;
};
TravelDistanceTable travel_distance_table(const StepSeries& speed, double v_min, double length,
                                          double dt, Step k);

/// Cumulative queue inflow under a time-varying speed profile:
/// N_qu(k) = N_in(k - nbar_f) + sum of inflow increments whose potential
/// travel distance exceeds L_f(k). The first window increment is zeroed and
/// the result is clamped into [N_out(k), N_in(k)].
double queue_inflow_tvfs(const LinkRecord& rec, const TravelDistanceTable& table, double free_len,
                         Step k);

/// Upstream supply of the link for step k -> k+1.
struct InflowLimit {
  double max_cum_in = 0.0;   // N_in_limit(k+1), veh
  double max_rate = 0.0;     // q_in_max(k), veh/s, floored at 0
};

/// N_in_limit(k+1) = N_in_sh(k+1) + rho_q(k) * L_q(k) + rho_jam * L_f(k),
/// where N_in_sh blends cumulative outflows n_sh steps back (the time the
/// backward wave needs to cross the queue). History indices are clamped to
/// <= k so a short queue reads the most recent committed outflow.
InflowLimit inflow_limit(const LinkRecord& rec, double queue_len, double free_len,
                         double queue_dens, double wave_speed, double dt, Step k);

/// q_in = min(q_in_max, q_in_des); N_in(k+1) = N_in(k) + q_in * dt.
double actual_inflow(double q_in_max, double q_in_desired, const LinkRecord& rec, double dt,
                     Step k);

/// Desired and capacity-capped cumulative outflow for step k -> k+1.
struct OutflowBounds {
  double desired_cum_out = 0.0;  // N_out_des(k+1), veh
  double max_cum_out = 0.0;      // N_out_max(k+1), veh
  double max_rate = 0.0;         // q_out_max(k), veh/s
};

/// N_out_des counts the window entrants whose potential travel distance
/// exceeds the link length; N_out_max additionally caps the step's discharge
/// at the saturation budget q_sat(k) * b(k) * dt. prev_max_cum_out is last
/// step's N_out_max (used only for the reported rate).
OutflowBounds outflow_bounds(const LinkRecord& rec, const TravelDistanceTable& table,
                             double saturation_flow, double green_fraction, double dt, Step k,
                             double prev_max_cum_out);

}  // namespace lqm
