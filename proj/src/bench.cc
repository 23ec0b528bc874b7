/**
 * bench.cc
 */

#include "percplan/bench.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace percplan {

bool RunMetrics::timed_out() const {
  return std::any_of(runs.begin(), runs.end(),
                     [](const RunRecord& r) { return r.timed_out; });
}

template <typename F>
double RunMetrics::mean_of(F field) const {
  const bool any_complete = std::any_of(
      runs.begin(), runs.end(), [](const RunRecord& r) { return !r.timed_out; });
  double sum = 0.0;
  std::size_t n = 0;
  for (const RunRecord& r : runs) {
    if (any_complete && r.timed_out) continue;
    sum += field(r);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double RunMetrics::mean_queries() const {
  return mean_of([](const RunRecord& r) { return double(r.queries); });
}

double RunMetrics::mean_feasible() const {
  return mean_of([](const RunRecord& r) { return double(r.feasible); });
}

double RunMetrics::mean_infeasible() const {
  return mean_of([](const RunRecord& r) { return double(r.infeasible); });
}

double RunMetrics::mean_wall_ms() const {
  return mean_of([](const RunRecord& r) { return r.wall.count() / 1000.0; });
}

RunMetrics run_experiment(const LoadedInstance& instance, Strategy strategy,
                          PlanTask task, std::chrono::milliseconds budget,
                          std::size_t runs) {
  RunMetrics metrics;
  metrics.instance = instance.id;
  metrics.strategy = strategy;
  metrics.task = task;
  metrics.budget = budget;
  RunOptions options;
  options.task = task;
  options.budget = budget;
  for (std::size_t run = 0; run < runs; ++run) {
    RunOutcome outcome = run_strategy(strategy, instance, options);
    metrics.runs.push_back({run, outcome.query_count,
                            outcome.feasible_plans.size(),
                            outcome.infeasible_count, outcome.wall_time,
                            outcome.timed_out});
    if (run == 0) metrics.plans = std::move(outcome.feasible_plans);
  }
  return metrics;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "table") return ReportFormat::kTable;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "plotdata") return ReportFormat::kPlotData;
  return std::nullopt;
}

namespace {

std::string format_ms(std::chrono::microseconds us) {
  const auto count = us.count();
  std::ostringstream os;
  os << count / 1000 << '.' << std::setw(3) << std::setfill('0') << count % 1000;
  return os.str();
}

std::string format_mean(double value, int precision = 1) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << value;
  return os.str();
}

std::string task_heading(const PlanTask& task) {
  if (task.kind == PlanTask::Kind::kFirst) return "To FIRST feasible plan";
  return "To " + std::to_string(task.count) + " feasible plans";
}

std::string emit_csv(const std::vector<RunMetrics>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const RunMetrics& m : rows) {
    for (const RunRecord& r : m.runs) {
      const auto wall = r.timed_out
                            ? std::chrono::duration_cast<std::chrono::microseconds>(m.budget)
                            : r.wall;
      os << m.instance << ',' << to_string(m.strategy) << ','
         << to_string(m.task) << ',' << r.run << ',' << r.queries << ','
         << r.feasible << ',' << r.infeasible << ',' << format_ms(wall) << ','
         << (r.timed_out ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

std::string emit_plotdata(const std::vector<RunMetrics>& rows) {
  std::ostringstream os;
  os << "instance,strategy,task,mean_wall_ms,timed_out\n";
  for (const RunMetrics& m : rows) {
    const double wall =
        m.timed_out() && std::all_of(m.runs.begin(), m.runs.end(),
                                     [](const RunRecord& r) { return r.timed_out; })
            ? static_cast<double>(m.budget.count())
            : m.mean_wall_ms();
    os << m.instance << ',' << to_string(m.strategy) << ',' << to_string(m.task)
       << ',' << format_mean(wall, 3) << ',' << (m.timed_out() ? "true" : "false")
       << '\n';
  }
  return os.str();
}

std::string emit_table(const std::vector<RunMetrics>& rows) {
  std::vector<std::string> instances;
  for (const RunMetrics& m : rows) {
    if (std::find(instances.begin(), instances.end(), m.instance) == instances.end()) {
      instances.push_back(m.instance);
    }
  }

  constexpr int kLabel = 24;
  constexpr int kCell = 10;
  constexpr int kGap = 4;
  std::ostringstream os;
  bool any_timeout = false;
  for (const std::string& instance : instances) {
    std::vector<PlanTask> tasks;
    std::vector<Strategy> strategies;
    for (const RunMetrics& m : rows) {
      if (m.instance != instance) continue;
      if (std::find(tasks.begin(), tasks.end(), m.task) == tasks.end()) {
        tasks.push_back(m.task);
      }
      if (std::find(strategies.begin(), strategies.end(), m.strategy) ==
          strategies.end()) {
        strategies.push_back(m.strategy);
      }
    }
    std::vector<Strategy> columns;
    for (Strategy s : kReportOrder) {
      if (std::find(strategies.begin(), strategies.end(), s) != strategies.end()) {
        columns.push_back(s);
      }
    }
    const auto find = [&](const PlanTask& task, Strategy s) -> const RunMetrics* {
      for (const RunMetrics& m : rows) {
        if (m.instance == instance && m.task == task && m.strategy == s) return &m;
      }
      return nullptr;
    };
    const int block = kCell * static_cast<int>(columns.size());

    os << std::left << std::setw(kLabel) << instance;
    for (const PlanTask& task : tasks) {
      os << std::string(kGap, ' ') << std::left << std::setw(block)
         << task_heading(task);
    }
    os << '\n' << std::string(kLabel, ' ');
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      os << std::string(kGap, ' ');
      for (Strategy s : columns) {
        std::string name(to_string(s));
        name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
        os << std::right << std::setw(kCell) << name;
      }
    }
    os << '\n';

    const auto row = [&](const char* label, auto value, int precision) {
      os << std::left << std::setw(kLabel) << label;
      for (const PlanTask& task : tasks) {
        os << std::string(kGap, ' ');
        for (Strategy s : columns) {
          const RunMetrics* m = find(task, s);
          std::string cell = "-";
          if (m != nullptr) {
            cell = format_mean(value(*m), precision);
            if (m->timed_out()) {
              cell += "*";
              any_timeout = true;
            }
          }
          os << std::right << std::setw(kCell) << cell;
        }
      }
      os << '\n';
    };
    row("# perception queries", [](const RunMetrics& m) { return m.mean_queries(); }, 1);
    row("# feasible plans", [](const RunMetrics& m) { return m.mean_feasible(); }, 1);
    row("# infeasible plans", [](const RunMetrics& m) { return m.mean_infeasible(); }, 1);
    row("mean wall ms", [](const RunMetrics& m) { return m.mean_wall_ms(); }, 3);
    os << '\n';
  }
  if (any_timeout) os << "* at least one run hit the time budget\n";
  return os.str();
}

}  // namespace

std::string emit_report(const std::vector<RunMetrics>& rows, ReportFormat format) {
  switch (format) {
    case ReportFormat::kTable:
      return emit_table(rows);
    case ReportFormat::kCsv:
      return emit_csv(rows);
    case ReportFormat::kPlotData:
      return emit_plotdata(rows);
  }
  return {};
}

namespace {

std::size_t to_size(std::string_view text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad number '" + std::string(text) + "'");
  }
  return value;
}

std::chrono::microseconds to_micros(std::string_view text) {
  const auto dot = text.find('.');
  if (dot == std::string_view::npos || text.size() - dot != 4) {
    throw std::invalid_argument("bad wall_ms '" + std::string(text) + "'");
  }
  const auto whole = to_size(text.substr(0, dot));
  const auto frac = to_size(text.substr(dot + 1));
  return std::chrono::microseconds(static_cast<long long>(whole * 1000 + frac));
}

}  // namespace

std::vector<CsvRow> parse_report_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("missing csv header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw std::invalid_argument("bad csv row: " + line);
    CsvRow row;
    row.instance = fields[0];
    row.strategy = fields[1];
    row.task = fields[2];
    row.run = to_size(fields[3]);
    row.queries = to_size(fields[4]);
    row.feasible = to_size(fields[5]);
    row.infeasible = to_size(fields[6]);
    row.wall = to_micros(fields[7]);
    if (fields[8] != "true" && fields[8] != "false") {
      throw std::invalid_argument("bad timed_out: " + fields[8]);
    }
    row.timed_out = fields[8] == "true";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace percplan
