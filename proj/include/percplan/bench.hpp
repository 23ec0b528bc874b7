/**
 * bench.hpp
 *
 * Repeated strategy runs and their reports.
 */

#ifndef PERCPLAN_BENCH_HPP
#define PERCPLAN_BENCH_HPP

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "percplan/strategies.hpp"

namespace percplan {

struct RunRecord {
  std::size_t run = 0;
  std::size_t queries = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::chrono::microseconds wall{0};
  bool timed_out = false;
};

struct RunMetrics {
  std::string instance;
  Strategy strategy = Strategy::kNone;
  PlanTask task;
  std::chrono::milliseconds budget{0};
  std::vector<RunRecord> runs;
  /// Feasible plans of the first run.
  std::vector<Plan> plans;

  bool timed_out() const;
  /// Means over runs that finished; over all runs if none did.
  double mean_queries() const;
  double mean_feasible() const;
  double mean_infeasible() const;
  double mean_wall_ms() const;

 private:
  template <typename F>
  double mean_of(F field) const;
};

/// Runs the strategy `runs` times, each with a fresh perception view.
RunMetrics run_experiment(const LoadedInstance& instance, Strategy strategy,
                          PlanTask task, std::chrono::milliseconds budget,
                          std::size_t runs);

enum class ReportFormat { kTable, kCsv, kPlotData };

std::optional<ReportFormat> parse_report_format(std::string_view text);

inline constexpr std::string_view kCsvHeader =
    "instance,strategy,task,run,queries,feasible,infeasible,wall_ms,timed_out";

/// Wall time in the csv is the budget for timed-out runs.
std::string emit_report(const std::vector<RunMetrics>& rows, ReportFormat format);

struct CsvRow {
  std::string instance;
  std::string strategy;
  std::string task;
  std::size_t run = 0;
  std::size_t queries = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::chrono::microseconds wall{0};
  bool timed_out = false;

  bool operator==(const CsvRow&) const = default;
};

/// Reads back what emit_report(kCsv) writes.
std::vector<CsvRow> parse_report_csv(std::string_view text);

}  // namespace percplan

#endif  // PERCPLAN_BENCH_HPP
