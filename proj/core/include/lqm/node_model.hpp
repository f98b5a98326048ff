#pragma once

#include <vector>

#include "lqm/types.hpp"

namespace lqm {

/// Supply-constraint index: 1 when nothing is desired, else the admitted
/// fraction min(1, q_in_max / q_in_des).
double beta(double q_in_max, double q_in_desired);

/// One node's allocation problem for a single step, stated over per-step
/// increments: each outgoing link offers residual supply (veh it can still
/// accept this step), each feeder wants to release a desired increment, and
/// rates route feeder outflow across the outgoing links.
struct NodeStepProblem {
  struct Feeder {
    LinkId link = 0;
    double desired = 0.0;               // N_out_max(k+1) - N_out(k), veh
    std::vector<double> rates;          // e_{j,i} per outgoing index, row sums to 1
  };
  std::vector<LinkId> outgoing;         // ids, for reporting
  std::vector<double> residual_supply;  // N_in_limit(k+1) - N_in(k) per outgoing, veh
  std::vector<Feeder> feeders;
};

struct NodeStepSolution {
  std::vector<double> outflow;  // realized increment per feeder, veh
  std::vector<double> inflow;   // realized increment per outgoing link, veh
};

struct DesiredInflow {
  double cum_in = 0.0;  // N_in_des(k+1), veh
  double rate = 0.0;    // q_in_des(k), veh/s
};

/// Desired inflow of each outgoing link: the current cumulative inflow plus
/// every feeder's desired increment routed by the turning rates.
std::vector<DesiredInflow> desired_inflows(const NodeStepProblem& problem,
                                           const std::vector<double>& current_cum_in, double dt);

/// Distributes downstream supply over the feeding links without holding
/// vehicles back. Repeatedly finds the outgoing link with the smallest
/// supply-constraint index, settles its feeders in ascending link-id order
/// (each capped at the tightest residual supply across the links it feeds,
/// supplies decremented immediately), and re-evaluates until no link is
/// constrained; any feeders still unsettled then release in full.
/// Conservation is exact: inflow_i = sum_j e_{j,i} * outflow_j.
NodeStepSolution allocate(const NodeStepProblem& problem);

}  // namespace lqm
