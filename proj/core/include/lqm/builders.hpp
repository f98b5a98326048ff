#pragma once

#include <string>
#include <vector>

#include "lqm/network.hpp"

namespace lqm {

/// Demand profile rising from zero through a warm-up plateau, holding a peak,
/// then decaying back to zero; rates in veh/s, sampled at dt.
struct TrapezoidDemand {
  double warmup_rate = 0.25;
  double peak_rate = 0.5;
  double warmup_end_s = 750.0;
  double peak_end_s = 1000.0;
  double zero_s = 1500.0;
};
StepSeries trapezoid_demand(const TrapezoidDemand& shape, double dt, Step horizon);

struct IntersectionOptions {
  double dt = 10.0;
  Step horizon = 200;
  TrapezoidDemand demand{0.12, 0.3, 750.0, 1000.0, 1500.0};
  // Green-time fraction override for the eastbound-exit through link
  // (link 20); 0.1 recreates the bottleneck variant.
  double link20_green = 0.38;
  // Optional speed profile override for the westbound-approach common link
  // (link 25); empty keeps the constant 11 m/s.
  StepSeries link25_speed;
};

/// Four-arm signalized intersection: four approach segments and four exit
/// segments, each a 500 m common link plus three 100 m turn links, with the
/// published turning rates and green-time fractions. 32 road links plus
/// virtual origins and sinks.
Scenario build_paper_intersection(const IntersectionOptions& options = {});

/// The bottleneck variant: through exit link 20 throttled to a 0.1 green
/// fraction.
Scenario build_paper_intersection_bottleneck();

/// The moving-bottleneck variant: no throttled exit, but the westbound
/// approach common link drops from 11 m/s to 3 m/s at 500 s and recovers to
/// 9 m/s at 900 s.
Scenario build_paper_intersection_tfs();

/// Arterial of three consecutive signalized intersections (the middle one a
/// T-junction): 18 common and 50 turn links plus 7 origins.
Scenario build_paper_corridor();

struct SingleLinkOptions {
  double dt = 10.0;
  Step horizon = 200;
  double length = 500.0;
  StepSeries speed = StepSeries(11.0);
  double jam_density = 0.1;
  double backward_wave_speed = 20.0 / 3.6;
  StepSeries saturation_flow = StepSeries(0.5);
  StepSeries green = StepSeries(1.0);
  StepSeries demand = StepSeries(0.2);
};

/// Origin, one road link, sink. The workbench for oracle comparisons.
Scenario build_single_link(const SingleLinkOptions& options = {});

/// Scenario factory by name: paper-intersection, paper-intersection-bottleneck,
/// paper-intersection-tfs, paper-corridor, single-link. Throws
/// std::invalid_argument for unknown names.
Scenario build_named_scenario(const std::string& name);
const std::vector<std::string>& builtin_scenario_names();

}  // namespace lqm
