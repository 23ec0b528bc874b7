// plan: sweep strategies x instances x tasks and report the metrics.
//
//   plan --instance data/instances/instance1.inst --strategy all --task first
//        --catalog data/catalog/default.catalog

#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "percplan/bench.hpp"
#include "percplan/instance_io.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitTimeout = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("plan");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PLAN_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    std::istringstream in(item);
    std::string part;
    while (std::getline(in, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace percplan;
  setup_logging();

  CLI::App app{"Plan with lazily queried perception and compare strategies"};
  std::vector<std::string> instance_paths;
  std::string catalog_path;
  std::vector<std::string> strategy_args{"all"};
  std::vector<std::string> task_args{"first"};
  int maxstep = 0;
  double budget_secs = 2000.0;
  std::size_t runs = 5;
  std::string report = "table";
  std::string out_path;
  bool emit_plans = false;

  app.add_option("--instance", instance_paths, "Instance file (repeatable)")
      ->required();
  app.add_option("--catalog", catalog_path, "Shape catalog file")->required();
  app.add_option("--strategy", strategy_args,
                 "none|pre|filt|repl, comma separated, or all");
  app.add_option("--task", task_args, "first or count:<N>, comma separated");
  app.add_option("--maxstep", maxstep, "Override the instance horizon")
      ->check(CLI::Range(1, Horizon::kCap));
  app.add_option("--budget-secs", budget_secs, "Time budget per run")
      ->check(CLI::PositiveNumber);
  app.add_option("--runs", runs, "Repetitions per cell")->check(CLI::PositiveNumber);
  app.add_option("--report", report, "table, csv or plotdata")
      ->check(CLI::IsMember({"table", "csv", "plotdata"}));
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_flag("--emit-plans", emit_plans, "Print the feasible plans of each cell");
  CLI11_PARSE(app, argc, argv);

  std::vector<Strategy> strategies;
  for (const std::string& s : split_commas(strategy_args)) {
    if (s == "all") {
      strategies.assign(kReportOrder.begin(), kReportOrder.end());
      continue;
    }
    const auto parsed = parse_strategy(s);
    if (!parsed) {
      std::cerr << "unknown strategy '" << s << "'\n";
      return kExitParse;
    }
    strategies.push_back(*parsed);
  }
  std::vector<PlanTask> tasks;
  for (const std::string& t : split_commas(task_args)) {
    const auto parsed = parse_task(t);
    if (!parsed) {
      std::cerr << "bad task '" << t << "'\n";
      return kExitParse;
    }
    tasks.push_back(*parsed);
  }

  // Load everything before running anything.
  std::vector<LoadedInstance> instances;
  for (const std::string& path : instance_paths) {
    try {
      instances.push_back(load_instance(path, catalog_path));
    } catch (const std::exception& e) {
      std::cerr << path << ": " << e.what() << '\n';
      return kExitParse;
    }
    if (maxstep > 0) instances.back().horizon.maxstep = maxstep;
    spdlog::info("loaded {} ({} objects, maxstep {})", instances.back().id,
                 instances.back().scene.objects.size(),
                 instances.back().horizon.maxstep);
  }

  const auto budget = std::chrono::milliseconds(
      static_cast<long long>(budget_secs * 1000.0));
  std::vector<RunMetrics> rows;
  bool any_timeout = false;
  for (const LoadedInstance& instance : instances) {
    for (const PlanTask& task : tasks) {
      for (Strategy strategy : strategies) {
        spdlog::info("running {} {} {}", instance.id, to_string(strategy),
                     to_string(task));
        try {
          rows.push_back(run_experiment(instance, strategy, task, budget, runs));
        } catch (const std::exception& e) {
          spdlog::error("{} {} {}: {}", instance.id, to_string(strategy),
                        to_string(task), e.what());
          continue;
        }
        const RunMetrics& m = rows.back();
        any_timeout = any_timeout || m.timed_out();
        spdlog::debug("queries {} feasible {} infeasible {}", m.mean_queries(),
                      m.mean_feasible(), m.mean_infeasible());
      }
    }
  }

  std::ostringstream text;
  text << emit_report(rows, *parse_report_format(report));
  if (emit_plans) {
    for (const RunMetrics& m : rows) {
      text << "\n== " << m.instance << ' ' << to_string(m.strategy) << ' '
           << to_string(m.task) << '\n';
      for (const Plan& plan : m.plans) {
        text << render_plan(plan) << "\n\n";
      }
    }
  }
  if (out_path.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << '\n';
      return EXIT_FAILURE;
    }
    out << text.str();
  }
  return any_timeout ? kExitTimeout : EXIT_SUCCESS;
}
