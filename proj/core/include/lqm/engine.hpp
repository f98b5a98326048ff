#pragma once

#include <map>
#include <vector>

#include "lqm/link_dynamics.hpp"
#include "lqm/network.hpp"
#include "lqm/trace.hpp"
#include "lqm/types.hpp"

namespace lqm {

struct EngineOptions {
  bool parallel = false;
  int threads = 0;  // 0: hardware concurrency
  bool check_invariants = true;
};

struct RunStats {
  Step steps = 0;
  double wall_seconds = 0.0;
  double mean_step_seconds = 0.0;
  double max_conservation_error = 0.0;  // veh
  bool invariants_ok = true;
};

/// Full network state over the simulated horizon: one record per link plus
/// the unserved backlog held at each origin.
class SimulationState {
 public:
  SimulationState(const Scenario& scenario);

  const Scenario& scenario() const { return *scenario_; }
  Step step() const { return step_; }
  const LinkRecord& record(LinkId id) const;
  double origin_backlog(LinkId origin) const;

  /// Vehicles injected so far minus occupancies, sink absorptions and origin
  /// backlogs; zero (to rounding) when the network conserves vehicles.
  double conservation_error(Step k) const;

 private:
  friend class Engine;
  const Scenario* scenario_;
  Step step_ = 0;
  std::vector<LinkRecord> records_;                // indexed by dense link index
  std::map<LinkId, std::size_t> index_of_;
  std::vector<std::size_t> origin_idx_, sink_idx_, real_idx_;
};

/// Runs the per-step network loading loop: per-link queue and bound updates,
/// then per-node supply allocation, then a double-buffered commit of all
/// cumulative counts for step k+1. Serial and parallel execution produce
/// identical traces.
class Engine {
 public:
  Engine(const Scenario& scenario, EngineOptions options = {});
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Advances one step. Throws InvariantError when a runtime invariant
  /// breaks and checking is enabled.
  void step();

  /// Runs the whole horizon and extracts the trace.
  TraceSet run();

  const SimulationState& state() const { return state_; }
  const RunStats& stats() const { return stats_; }
  TraceSet trace() const;

 private:
  struct NodeWork;
  void prepare();
  void link_phase(std::size_t link_index);
  void node_phase(std::size_t node_index);
  void commit();
  void check_step_invariants();

  Scenario scenario_;
  EngineOptions options_;
  SimulationState state_;
  RunStats stats_;

  // per-link scratch, valid for the step being processed
  std::vector<double> bound_in_;        // N_in_limit(k+1)
  std::vector<double> bound_out_;       // N_out_max(k+1)
  std::vector<double> prev_bound_out_;  // N_out_max(k) from the previous step
  std::vector<double> delta_in_, delta_out_;
  std::vector<const StepSeries*> green_of_;  // downstream b(k) per link
  std::vector<NodeWork> node_work_;
};

/// Convenience wrapper: validate is the caller's job; runs and returns the
/// trace plus stats.
TraceSet run_scenario(const Scenario& scenario, EngineOptions options = {},
                      RunStats* stats = nullptr);

}  // namespace lqm
