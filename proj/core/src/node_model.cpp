#include "lqm/node_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lqm {

double beta(double q_in_max, double q_in_desired) {
  if (q_in_desired <= 0.0) return 1.0;
  return std::min(1.0, q_in_max / q_in_desired);
}

std::vector<DesiredInflow> desired_inflows(const NodeStepProblem& problem,
                                           const std::vector<double>& current_cum_in, double dt) {
  std::vector<DesiredInflow> out(problem.residual_supply.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double routed = 0.0;
    for (const auto& f : problem.feeders) routed += f.rates[i] * f.desired;
    out[i].cum_in = current_cum_in[i] + routed;
    out[i].rate = routed / dt;
  }
  return out;
}

NodeStepSolution allocate(const NodeStepProblem& problem) {
  const std::size_t n_out = problem.residual_supply.size();
  const std::size_t n_in = problem.feeders.size();

  for (double s : problem.residual_supply) {
    if (std::isnan(s) || s < 0.0) throw std::invalid_argument("allocate: bad residual supply");
  }
  for (const auto& f : problem.feeders) {
    if (!std::isfinite(f.desired) || f.desired < 0.0) {
      throw std::invalid_argument("allocate: bad desired increment");
    }
    if (f.rates.size() != n_out) throw std::invalid_argument("allocate: rate row size mismatch");
    for (double e : f.rates) {
      if (!std::isfinite(e) || e < 0.0) throw std::invalid_argument("allocate: bad turning rate");
    }
  }

  std::vector<double> supply = problem.residual_supply;
  std::vector<double> realized(n_in, 0.0);
  std::vector<bool> settled(n_in, false);

  // Feeder visit order within a settlement round: ascending link id.
  std::vector<std::size_t> by_id(n_in);
  for (std::size_t j = 0; j < n_in; ++j) by_id[j] = j;
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return problem.feeders[a].link < problem.feeders[b].link;
  });

  auto settle = [&](std::size_t j) {
    const auto& f = problem.feeders[j];
    double cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_out; ++i) {
      if (f.rates[i] > 0.0) cap = std::min(cap, supply[i] / f.rates[i]);
    }
    const double q = std::min(f.desired, std::max(cap, 0.0));
    realized[j] = q;
    for (std::size_t i = 0; i < n_out; ++i) {
      if (f.rates[i] > 0.0) supply[i] = std::max(0.0, supply[i] - f.rates[i] * q);
    }
    settled[j] = true;
  };

  for (std::size_t round = 0; round <= n_in; ++round) {
    // Supply-constraint index per outgoing link over the unsettled demand.
    double beta_min = 1.0;
    std::size_t constrained = n_out;
    for (std::size_t i = 0; i < n_out; ++i) {
      double desired_in = 0.0;
      for (std::size_t j = 0; j < n_in; ++j) {
        if (!settled[j]) desired_in += problem.feeders[j].rates[i] * problem.feeders[j].desired;
      }
      const double b = desired_in <= 0.0 ? 1.0 : std::min(1.0, supply[i] / desired_in);
      if (b < beta_min ||
          (b == beta_min && constrained < n_out && b < 1.0 &&
           problem.outgoing[i] < problem.outgoing[constrained])) {
        beta_min = b;
        constrained = i;
      }
    }
    if (beta_min >= 1.0) break;

    bool any = false;
    for (std::size_t j : by_id) {
      if (!settled[j] && problem.feeders[j].rates[constrained] > 0.0) {
        settle(j);
        any = true;
      }
    }
    if (!any) break;  // unreachable: a constrained link always has unsettled feeders
  }

  // No link is supply-constrained any more: the rest release in full.
  for (std::size_t j = 0; j < n_in; ++j) {
    if (!settled[j]) realized[j] = problem.feeders[j].desired;
  }

  NodeStepSolution solution;
  solution.outflow = std::move(realized);
  solution.inflow.assign(n_out, 0.0);
  for (std::size_t j = 0; j < n_in; ++j) {
    for (std::size_t i = 0; i < n_out; ++i) {
      solution.inflow[i] += problem.feeders[j].rates[i] * solution.outflow[j];
    }
  }
  return solution;
}

}  // namespace lqm
