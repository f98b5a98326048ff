#pragma once

#include <map>
#include <string>
#include <vector>

#include "lqm/types.hpp"

namespace lqm {

/// One simulated state sample of one link.
struct TraceRow {
  Step step = 0;
  LinkId link = 0;
  double cum_in = 0.0;
  double cum_queue = 0.0;
  double cum_out = 0.0;
  double rate_in = 0.0;   // veh/s over the step ending at `step`
  double rate_out = 0.0;  // veh/s over the step ending at `step`
  double queue_len = 0.0;
  double queue_density = 0.0;
};

/// Per-step per-link output of a run, sorted by (step, link); one row per
/// (step, link) pair, steps 1..horizon.
struct TraceSet {
  double dt = 1.0;
  std::vector<TraceRow> rows;

  std::vector<LinkId> link_ids() const;
  Step max_step() const;
  /// Series of one quantity for one link, ordered by step.
  std::vector<double> series(LinkId link, const std::string& quantity) const;
};

extern const std::vector<std::string> kTraceQuantities;

/// Root-mean-square deviation between two equally long series.
double epsilon(const std::vector<double>& x, const std::vector<double>& psi);

struct ComparisonReport {
  std::vector<std::string> quantities;
  // per link: epsilon per quantity
  std::map<LinkId, std::vector<double>> per_link;
  std::vector<double> mean;    // per quantity
  std::vector<double> stddev;  // per quantity (population)

  std::string to_table() const;
};

/// Per-link, per-quantity epsilon between two traces sharing the same link
/// ids and step grid. Throws std::invalid_argument on grid mismatch.
ComparisonReport compare_traces(const TraceSet& a, const TraceSet& b,
                                const std::vector<std::string>& quantities = kTraceQuantities);

}  // namespace lqm
