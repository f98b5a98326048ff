#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "lqm/builders.hpp"
#include "lqm/engine.hpp"
#include "lqm/network.hpp"
#include "lqm/plot.hpp"
#include "lqm/scenario_io.hpp"
#include "lqm/trace.hpp"

namespace {

namespace fs = std::filesystem;

int log_level() {
  const char* env = std::getenv("LQM_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

void log_info(const std::string& message) {
  if (log_level() >= 1) std::cerr << "[lqm] " << message << "\n";
}

struct RunInputs {
  std::string scenario_path;
  std::string builtin;
  double dt_override = 0.0;
  int horizon_override = -1;
  int smooth_window = 1;
};

lqm::Scenario load_inputs(const RunInputs& in) {
  lqm::Scenario scenario;
  if (!in.builtin.empty()) {
    scenario = lqm::build_named_scenario(in.builtin);
  } else {
    scenario = lqm::load_scenario(in.scenario_path);
  }
  if (in.dt_override > 0.0) scenario.dt = in.dt_override;
  if (in.horizon_override >= 0) scenario.horizon_steps = in.horizon_override;
  if (in.smooth_window > 1) lqm::smooth_scenario_demand(scenario, in.smooth_window);
  return scenario;
}

int print_violations(const lqm::ValidationResult& result) {
  for (const auto& v : result.violations) std::cout << v.to_string() << "\n";
  for (const auto& w : result.warnings) std::cout << w.to_string() << "\n";
  std::cout << result.violations.size() << " violations\n";
  return result.ok() ? 0 : 1;
}

bool traces_identical(const lqm::TraceSet& a, const lqm::TraceSet& b) {
  if (a.dt != b.dt || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.step != y.step || x.link != y.link || x.cum_in != y.cum_in ||
        x.cum_queue != y.cum_queue || x.cum_out != y.cum_out || x.rate_in != y.rate_in ||
        x.rate_out != y.rate_out || x.queue_len != y.queue_len ||
        x.queue_density != y.queue_density) {
      return false;
    }
  }
  return true;
}

std::string report_json(const lqm::RunStats& stats, const std::vector<std::string>& outputs,
                        bool determinism_checked) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"steps\": " << stats.steps << ",\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", stats.wall_seconds);
  os << "  \"wall_seconds\": " << buf << ",\n";
  std::snprintf(buf, sizeof(buf), "%.9f", stats.mean_step_seconds);
  os << "  \"mean_step_seconds\": " << buf << ",\n";
  std::snprintf(buf, sizeof(buf), "%.3g", stats.max_conservation_error);
  os << "  \"max_conservation_error\": " << buf << ",\n";
  os << "  \"invariants\": \"" << (stats.invariants_ok ? "ok" : "violated") << "\",\n";
  os << "  \"determinism_checked\": " << (determinism_checked ? "true" : "false") << ",\n";
  os << "  \"outputs\": [";
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    os << (i ? ", " : "") << "\"" << outputs[i] << "\"";
  }
  os << "]\n}\n";
  return os.str();
}

int run_one(const RunInputs& inputs, const std::string& out_dir, bool parallel,
            bool check_determinism, bool plots) {
  lqm::Scenario scenario;
  try {
    scenario = load_inputs(inputs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const auto validation = lqm::validate_scenario(scenario);
  if (!validation.ok()) {
    print_violations(validation);
    return 1;
  }

  lqm::EngineOptions options;
  options.parallel = parallel;
  lqm::RunStats stats;
  lqm::TraceSet trace;
  bool determinism_ok = true;
  try {
    trace = lqm::run_scenario(scenario, options, &stats);
    if (check_determinism) {
      lqm::EngineOptions other = options;
      other.parallel = !options.parallel;
      const lqm::TraceSet second = lqm::run_scenario(scenario, other);
      determinism_ok = traces_identical(trace, second);
    }
  } catch (const lqm::InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!determinism_ok) {
    std::cerr << "error: serial and parallel traces differ\n";
    return 2;
  }

  fs::create_directories(out_dir);
  std::vector<std::string> outputs;
  const std::string trace_path = out_dir + "/trace.csv";
  lqm::write_trace(trace, trace_path);
  outputs.push_back(trace_path);
  if (plots) {
    const auto written = lqm::write_link_plots(trace, out_dir + "/plots");
    outputs.insert(outputs.end(), written.begin(), written.end());
  }
  const std::string report_path = out_dir + "/report.json";
  {
    std::ofstream out(report_path);
    out << report_json(stats, outputs, check_determinism);
  }
  outputs.push_back(report_path);

  std::cout << "steps: " << stats.steps << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f s wall, %.3f ms/step", stats.wall_seconds,
                stats.mean_step_seconds * 1e3);
  std::cout << buf << "\n";
  std::cout << "trace: " << trace_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lqm - link-queue network traffic flow simulator"};
  app.require_subcommand(1);

  bool seedless = false;
  app.add_flag("--seedless", seedless,
               "reserved; the simulator has no randomness and rejects this flag");

  // validate
  auto* cmd_validate = app.add_subcommand("validate", "check a scenario file");
  std::string validate_path;
  cmd_validate->add_option("scenario", validate_path, "scenario JSON")->required();

  // run
  auto* cmd_run = app.add_subcommand("run", "simulate a scenario and write trace + report");
  RunInputs run_inputs;
  std::vector<std::string> run_scenarios;
  std::string run_out = "out";
  bool run_parallel = false, run_check_det = false, run_plots = false;
  int run_jobs = 1;
  cmd_run->add_option("--scenario", run_scenarios, "scenario JSON (repeatable)");
  cmd_run->add_option("--builtin", run_inputs.builtin, "built-in scenario name");
  cmd_run->add_option("--out", run_out, "output directory");
  cmd_run->add_option("--dt", run_inputs.dt_override, "override step size (s)");
  cmd_run->add_option("--horizon", run_inputs.horizon_override, "override horizon (steps)");
  cmd_run->add_option("--smooth-window", run_inputs.smooth_window,
                      "block-average demand over this many steps");
  cmd_run->add_flag("--parallel", run_parallel, "process links and nodes on multiple threads");
  cmd_run->add_flag("--check-determinism", run_check_det,
                    "also run the other execution mode and require identical traces");
  cmd_run->add_flag("--plots", run_plots, "write per-link SVG plots");
  cmd_run->add_option("--jobs", run_jobs, "run multiple scenarios concurrently");

  // compare
  auto* cmd_compare = app.add_subcommand("compare", "error metrics between two traces");
  std::string trace_a, trace_b, compare_out;
  std::vector<std::string> compare_quantities;
  cmd_compare->add_option("trace_a", trace_a)->required();
  cmd_compare->add_option("trace_b", trace_b)->required();
  cmd_compare->add_option("--quantities", compare_quantities, "subset of trace columns");
  cmd_compare->add_option("--out", compare_out, "write the table here as well");

  // scaffold
  auto* cmd_scaffold = app.add_subcommand("scaffold", "write a built-in scenario as JSON");
  std::string scaffold_name, scaffold_out;
  cmd_scaffold->add_option("template", scaffold_name, "built-in scenario name")->required();
  cmd_scaffold->add_option("out", scaffold_out, "output path")->required();

  // plot
  auto* cmd_plot = app.add_subcommand("plot", "render SVG plots from a trace");
  std::string plot_trace, plot_out = "plots";
  std::vector<lqm::LinkId> plot_links;
  cmd_plot->add_option("trace", plot_trace)->required();
  cmd_plot->add_option("--out", plot_out, "output directory");
  cmd_plot->add_option("--links", plot_links, "subset of link ids");

  CLI11_PARSE(app, argc, argv);

  if (seedless) {
    std::cerr << "error: --seedless is reserved; the simulator has no randomness\n";
    return 1;
  }

  try {
    if (*cmd_validate) {
      const auto scenario = lqm::load_scenario(validate_path);
      return print_violations(lqm::validate_scenario(scenario));
    }

    if (*cmd_run) {
      if (run_scenarios.empty() && run_inputs.builtin.empty()) {
        std::cerr << "error: provide --scenario or --builtin\n";
        return 1;
      }
      if (!run_inputs.builtin.empty() || run_scenarios.size() <= 1) {
        if (!run_scenarios.empty()) run_inputs.scenario_path = run_scenarios.front();
        return run_one(run_inputs, run_out, run_parallel, run_check_det, run_plots);
      }
      // several scenarios: each gets a numbered subdirectory
      std::vector<int> results(run_scenarios.size(), 0);
      std::vector<std::thread> workers;
      const int jobs = std::max(1, run_jobs);
      std::size_t next = 0;
      while (next < run_scenarios.size()) {
        const std::size_t batch = std::min<std::size_t>(jobs, run_scenarios.size() - next);
        workers.clear();
        for (std::size_t i = 0; i < batch; ++i) {
          const std::size_t idx = next + i;
          workers.emplace_back([&, idx] {
            RunInputs inputs = run_inputs;
            inputs.scenario_path = run_scenarios[idx];
            results[idx] = run_one(inputs, run_out + "/" + std::to_string(idx), run_parallel,
                                   run_check_det, run_plots);
          });
        }
        for (auto& w : workers) w.join();
        next += batch;
      }
      return *std::max_element(results.begin(), results.end());
    }

    if (*cmd_compare) {
      const auto a = lqm::load_trace(trace_a);
      const auto b = lqm::load_trace(trace_b);
      const auto quantities =
          compare_quantities.empty() ? lqm::kTraceQuantities : compare_quantities;
      const auto report = lqm::compare_traces(a, b, quantities);
      const std::string table = report.to_table();
      std::cout << table;
      if (!compare_out.empty()) {
        std::ofstream out(compare_out);
        out << table;
      }
      return 0;
    }

    if (*cmd_scaffold) {
      const auto scenario = lqm::build_named_scenario(scaffold_name);
      lqm::save_scenario(scenario, scaffold_out);
      log_info("wrote " + scaffold_out);
      return 0;
    }

    if (*cmd_plot) {
      const auto trace = lqm::load_trace(plot_trace);
      const auto written = lqm::write_link_plots(trace, plot_out, plot_links);
      std::cout << written.size() << " plots in " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
