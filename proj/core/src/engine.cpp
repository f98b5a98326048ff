#include "lqm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lqm/node_model.hpp"

namespace lqm {

namespace {

constexpr double kOrderingTolerance = 1e-9;
constexpr double kConservationTolerance = 1e-6;

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t n_threads = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  const std::size_t chunk = (count + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SimulationState::SimulationState(const Scenario& scenario) : scenario_(&scenario) {
  records_.reserve(scenario.links.size());
  const std::size_t slots = static_cast<std::size_t>(std::max<Step>(scenario.horizon_steps, 0)) + 1;
  for (const auto& link : scenario.links) {
    LinkRecord rec;
    rec.params = &link;
    rec.cum_in.assign(slots, 0.0);
    rec.cum_queue.assign(slots, 0.0);
    rec.cum_out.assign(slots, 0.0);
    rec.queue_len.assign(slots, 0.0);
    rec.queue_dens.assign(slots, 0.0);
    index_of_[link.id] = records_.size();
    records_.push_back(std::move(rec));
    const std::size_t idx = records_.size() - 1;
    switch (link.kind) {
      case LinkKind::origin: origin_idx_.push_back(idx); break;
      case LinkKind::sink: sink_idx_.push_back(idx); break;
      default: real_idx_.push_back(idx); break;
    }
  }
}

const LinkRecord& SimulationState::record(LinkId id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) throw std::out_of_range("no such link: " + std::to_string(id));
  return records_[it->second];
}

double SimulationState::origin_backlog(LinkId origin) const {
  const LinkRecord& rec = record(origin);
  return rec.in_at(step_) - rec.out_at(step_);
}

double SimulationState::conservation_error(Step k) const {
  double injected = 0.0, held = 0.0;
  for (std::size_t i : origin_idx_) {
    injected += records_[i].in_at(k);
    held += records_[i].in_at(k) - records_[i].out_at(k);
  }
  double occupied = 0.0;
  for (std::size_t i : real_idx_) occupied += records_[i].in_at(k) - records_[i].out_at(k);
  double absorbed = 0.0;
  for (std::size_t i : sink_idx_) absorbed += records_[i].in_at(k);
  return injected - held - occupied - absorbed;
}

struct Engine::NodeWork {
  const NodeSpec* spec = nullptr;
  std::vector<std::size_t> in_idx, out_idx;
  std::vector<std::vector<double>> rates;  // row per incoming, column per outgoing
};

Engine::Engine(const Scenario& scenario, EngineOptions options)
    : scenario_(scenario), options_(options), state_(scenario_) {
  prepare();
}

Engine::~Engine() = default;

void Engine::prepare() {
  const std::size_t n = state_.records_.size();
  bound_in_.assign(n, 0.0);
  bound_out_.assign(n, 0.0);
  prev_bound_out_.assign(n, 0.0);
  delta_in_.assign(n, 0.0);
  delta_out_.assign(n, 0.0);
  green_of_.assign(n, nullptr);
  node_work_.clear();
  node_work_.reserve(scenario_.nodes.size());
  for (const auto& node : scenario_.nodes) {
    NodeWork work;
    work.spec = &node;
    for (LinkId in : node.incoming) {
      const std::size_t idx = state_.index_of_.at(in);
      work.in_idx.push_back(idx);
      green_of_[idx] = node.green_for(in);  // b(k) of a link lives at its downstream node
    }
    for (LinkId out : node.outgoing) work.out_idx.push_back(state_.index_of_.at(out));
    work.rates.resize(node.incoming.size());
    for (std::size_t j = 0; j < node.incoming.size(); ++j) {
      work.rates[j].resize(node.outgoing.size());
      for (std::size_t i = 0; i < node.outgoing.size(); ++i) {
        work.rates[j][i] = node.turning_rate(node.incoming[j], node.outgoing[i]);
      }
    }
    node_work_.push_back(std::move(work));
  }
}

void Engine::link_phase(std::size_t li) {
  LinkRecord& rec = state_.records_[li];
  const LinkParams& p = *rec.params;
  const Step k = state_.step_;
  const double dt = scenario_.dt;

  if (p.kind == LinkKind::origin) {
    const auto it = scenario_.demand.find(p.id);
    const double rate = it == scenario_.demand.end() ? 0.0 : it->second.at(k);
    bound_out_[li] = rec.in_at(k) + rate * dt;  // backlog plus fresh demand
    return;
  }
  if (p.kind == LinkKind::sink) {
    bound_in_[li] = std::numeric_limits<double>::infinity();
    return;
  }

  const FdPoint fd = fd_point(p, k);
  const double out_rate = k >= 1 ? (rec.out_at(k) - rec.out_at(k - 1)) / dt : 0.0;
  rec.queue_dens[static_cast<std::size_t>(k)] = queue_density(fd, p.jam_density, out_rate);

  const TravelDistanceTable table = travel_distance_table(p.speed, p.vmin(), p.length, dt, k);
  const double stale_free =
      k >= 1 ? p.length - rec.queue_len[static_cast<std::size_t>(k - 1)] : p.length;
  const double inflow = queue_inflow_tvfs(rec, table, stale_free, k);
  // Cumulative queue inflow may not regress when the free-flowing part grows
  // back; keep the series nondecreasing.
  rec.cum_queue[static_cast<std::size_t>(k)] = std::max(inflow, rec.queue_at(k - 1));

  const QueueLengths lengths = queue_lengths(rec, k);
  rec.queue_len[static_cast<std::size_t>(k)] = lengths.queued;

  if (k >= scenario_.horizon_steps) return;  // closing sample: no bounds needed

  const double green = green_of_[li] ? green_of_[li]->at(k) : 1.0;
  const OutflowBounds ob =
      outflow_bounds(rec, table, p.saturation_flow.at(k), green, dt, k, prev_bound_out_[li]);
  bound_out_[li] = ob.max_cum_out;

  const InflowLimit il =
      inflow_limit(rec, lengths.queued, lengths.free_flow,
                   rec.queue_dens[static_cast<std::size_t>(k)], p.backward_wave_speed, dt, k);
  bound_in_[li] = il.max_cum_in;
}

void Engine::node_phase(std::size_t ni) {
  const NodeWork& work = node_work_[ni];
  const Step k = state_.step_;

  NodeStepProblem problem;
  problem.outgoing.reserve(work.out_idx.size());
  problem.residual_supply.reserve(work.out_idx.size());
  for (std::size_t i = 0; i < work.out_idx.size(); ++i) {
    const LinkRecord& rec = state_.records_[work.out_idx[i]];
    problem.outgoing.push_back(rec.params->id);
    problem.residual_supply.push_back(std::max(0.0, bound_in_[work.out_idx[i]] - rec.in_at(k)));
  }
  problem.feeders.reserve(work.in_idx.size());
  for (std::size_t j = 0; j < work.in_idx.size(); ++j) {
    const LinkRecord& rec = state_.records_[work.in_idx[j]];
    NodeStepProblem::Feeder feeder;
    feeder.link = rec.params->id;
    feeder.desired = std::max(0.0, bound_out_[work.in_idx[j]] - rec.out_at(k));
    feeder.rates = work.rates[j];
    problem.feeders.push_back(std::move(feeder));
  }

  const NodeStepSolution solution = allocate(problem);
  for (std::size_t j = 0; j < work.in_idx.size(); ++j) {
    delta_out_[work.in_idx[j]] = solution.outflow[j];
  }
  for (std::size_t i = 0; i < work.out_idx.size(); ++i) {
    delta_in_[work.out_idx[i]] = solution.inflow[i];
  }
}

void Engine::commit() {
  const Step k = state_.step_;
  const std::size_t next = static_cast<std::size_t>(k + 1);
  const double dt = scenario_.dt;
  for (std::size_t li = 0; li < state_.records_.size(); ++li) {
    LinkRecord& rec = state_.records_[li];
    const LinkParams& p = *rec.params;
    rec.cum_out[next] = rec.out_at(k) + delta_out_[li];
    if (p.kind == LinkKind::origin) {
      const auto it = scenario_.demand.find(p.id);
      const double rate = it == scenario_.demand.end() ? 0.0 : it->second.at(k);
      rec.cum_in[next] = rec.in_at(k) + rate * dt;
      rec.cum_queue[next] = rec.cum_in[next];
    } else {
      rec.cum_in[next] = rec.in_at(k) + delta_in_[li];
      if (p.kind == LinkKind::sink) {
        rec.cum_out[next] = rec.cum_in[next];
        rec.cum_queue[next] = rec.cum_in[next];
      }
    }
    prev_bound_out_[li] = bound_out_[li];
    delta_in_[li] = 0.0;
    delta_out_[li] = 0.0;
  }
  state_.step_ = k + 1;
}

void Engine::check_step_invariants() {
  const Step k_new = state_.step_;   // in/out committed up to here
  const Step k_old = k_new - 1;      // fully computed sample
  for (std::size_t li : state_.real_idx_) {
    const LinkRecord& rec = state_.records_[li];
    const std::string entity = "link " + std::to_string(rec.params->id);
    if (rec.in_at(k_new) < rec.in_at(k_old) - kOrderingTolerance ||
        rec.out_at(k_new) < rec.out_at(k_old) - kOrderingTolerance ||
        rec.queue_at(k_old) < rec.queue_at(k_old - 1) - kOrderingTolerance) {
      throw InvariantError(entity, k_new, "cumulative series must be nondecreasing");
    }
    const double n_in = rec.in_at(k_old), n_qu = rec.queue_at(k_old), n_out = rec.out_at(k_old);
    if (n_out > n_qu + kOrderingTolerance || n_qu > n_in + kOrderingTolerance) {
      throw InvariantError(entity, k_old, "requires N_out <= N_qu <= N_in");
    }
    const double len = rec.queue_len[static_cast<std::size_t>(k_old)];
    if (len < -kOrderingTolerance || len > rec.params->length + kOrderingTolerance) {
      throw InvariantError(entity, k_old, "queue length outside [0, L]");
    }
  }
  const double drift = state_.conservation_error(k_new);
  stats_.max_conservation_error = std::max(stats_.max_conservation_error, std::abs(drift));
  if (std::abs(drift) > kConservationTolerance) {
    throw InvariantError("network", k_new, "vehicle conservation off by " + std::to_string(drift));
  }
}

void Engine::step() {
  if (state_.step_ >= scenario_.horizon_steps) {
    throw std::logic_error("Engine::step past the scenario horizon");
  }
  if (options_.parallel) {
    parallel_for(state_.records_.size(), options_.threads,
                 [this](std::size_t i) { link_phase(i); });
    parallel_for(node_work_.size(), options_.threads, [this](std::size_t i) { node_phase(i); });
  } else {
    for (std::size_t i = 0; i < state_.records_.size(); ++i) link_phase(i);
    for (std::size_t i = 0; i < node_work_.size(); ++i) node_phase(i);
  }
  commit();
  if (options_.check_invariants) check_step_invariants();
}

TraceSet Engine::run() {
  const auto start = std::chrono::steady_clock::now();
  while (state_.step_ < scenario_.horizon_steps) step();
  // Closing sample: queue quantities for the final index.
  for (std::size_t li : state_.real_idx_) link_phase(li);
  const auto end = std::chrono::steady_clock::now();
  stats_.steps = state_.step_;
  stats_.wall_seconds = std::chrono::duration<double>(end - start).count();
  stats_.mean_step_seconds = stats_.steps > 0 ? stats_.wall_seconds / stats_.steps : 0.0;
  stats_.invariants_ok = true;
  return trace();
}

TraceSet Engine::trace() const {
  TraceSet out;
  out.dt = scenario_.dt;
  std::vector<std::size_t> real = state_.real_idx_;
  std::sort(real.begin(), real.end(), [this](std::size_t a, std::size_t b) {
    return state_.records_[a].params->id < state_.records_[b].params->id;
  });
  out.rows.reserve(static_cast<std::size_t>(state_.step_) * real.size());
  for (Step k = 1; k <= state_.step_; ++k) {
    for (std::size_t li : real) {
      const LinkRecord& rec = state_.records_[li];
      TraceRow row;
      row.step = k;
      row.link = rec.params->id;
      row.cum_in = rec.in_at(k);
      row.cum_queue = rec.queue_at(k);
      row.cum_out = rec.out_at(k);
      row.rate_in = (rec.in_at(k) - rec.in_at(k - 1)) / scenario_.dt;
      row.rate_out = (rec.out_at(k) - rec.out_at(k - 1)) / scenario_.dt;
      row.queue_len = rec.queue_len[static_cast<std::size_t>(k)];
      row.queue_density = rec.queue_dens[static_cast<std::size_t>(k)];
      out.rows.push_back(row);
    }
  }
  return out;
}

TraceSet run_scenario(const Scenario& scenario, EngineOptions options, RunStats* stats) {
  Engine engine(scenario, options);
  TraceSet trace = engine.run();
  if (stats) *stats = engine.stats();
  return trace;
}

}  // namespace lqm
