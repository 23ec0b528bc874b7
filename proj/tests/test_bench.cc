#include <sstream>

#include "doctest.h"
#include "percplan/bench.hpp"
#include "percplan/instance_io.hpp"

using namespace percplan;

namespace {

const std::string kData = PERCPLAN_DATA_DIR;

LoadedInstance bundled(int n) {
  return load_instance(kData + "/instances/instance" + std::to_string(n) + ".inst",
                       kData + "/catalog/default.catalog");
}

const auto kMinute = std::chrono::milliseconds(60'000);

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("run_experiment on the bundled instances") {
  const RunMetrics pre = run_experiment(bundled(2), Strategy::kPre, PlanTask::First(), kMinute, 2);
  REQUIRE(pre.runs.size() == 2);
  for (const RunRecord& r : pre.runs) {
    CHECK(r.queries == 3);
    CHECK(r.feasible == 1);
    CHECK(r.infeasible == 0);
    CHECK_FALSE(r.timed_out);
  }
  CHECK(pre.mean_queries() == doctest::Approx(3.0));
  CHECK(pre.plans.size() == 1);

  const RunMetrics none =
      run_experiment(bundled(1), Strategy::kNone, PlanTask::Count(100), kMinute, 1);
  CHECK(none.runs[0].feasible + none.runs[0].infeasible == 100);
}

TEST_CASE("counts repeat exactly across runs") {
  const RunMetrics m = run_experiment(bundled(1), Strategy::kRepl, PlanTask::Count(100), kMinute, 3);
  for (const RunRecord& r : m.runs) {
    CHECK(r.queries == m.runs[0].queries);
    CHECK(r.feasible == m.runs[0].feasible);
    CHECK(r.infeasible == m.runs[0].infeasible);
  }
}

TEST_CASE("a budget overrun is recorded, not thrown") {
  const RunMetrics m = run_experiment(bundled(3), Strategy::kFilt, PlanTask::First(),
                                      std::chrono::milliseconds(5), 2);
  CHECK(m.timed_out());
  CHECK(m.runs[0].infeasible > 0);
  CHECK(m.runs[0].feasible == 0);

  const std::string csv = emit_report({m}, ReportFormat::kCsv);
  const auto rows = parse_report_csv(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].timed_out);
  CHECK(rows[0].wall == std::chrono::microseconds(5000));
  CHECK(lines_of(csv)[1].find(",5.000,true") != std::string::npos);

  const std::string table = emit_report({m}, ReportFormat::kTable);
  CHECK(table.find('*') != std::string::npos);
}

TEST_CASE("csv output") {
  const RunMetrics m = run_experiment(bundled(2), Strategy::kNone, PlanTask::First(), kMinute, 1);
  const std::string csv = emit_report({m}, ReportFormat::kCsv);
  const auto lines = lines_of(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == kCsvHeader);
  CHECK(lines[1].starts_with("instance2,none,first,0,0,1,0,"));
  CHECK(lines[1].ends_with(",false"));
}

TEST_CASE("the full sweep renders three blocks of four columns") {
  std::vector<RunMetrics> rows;
  for (int n = 1; n <= 3; ++n) {
    const LoadedInstance inst = bundled(n);
    for (PlanTask task : {PlanTask::First(), PlanTask::Count(100)}) {
      for (Strategy s : {Strategy::kPre, Strategy::kRepl, Strategy::kNone, Strategy::kFilt}) {
        rows.push_back(run_experiment(inst, s, task, kMinute, 1));
      }
    }
  }
  const std::string table = emit_report(rows, ReportFormat::kTable);
  const auto lines = lines_of(table);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!lines[i].starts_with("instance")) continue;
    ++blocks;
    CHECK(lines[i].find("To FIRST feasible plan") != std::string::npos);
    CHECK(lines[i].find("To 100 feasible plans") != std::string::npos);
    REQUIRE(i + 1 < lines.size());
    const std::string& heads = lines[i + 1];
    const auto none = heads.find("None");
    const auto filt = heads.find("Filt");
    const auto pre = heads.find("Pre");
    const auto repl = heads.find("Repl");
    CHECK(none < filt);
    CHECK(filt < pre);
    CHECK(pre < repl);
    CHECK(heads.find("None", none + 1) != std::string::npos);
  }
  CHECK(blocks == 3);
  CHECK(table.find('*') == std::string::npos);

  // every numeric field survives the csv round trip
  const std::string csv = emit_report(rows, ReportFormat::kCsv);
  const auto parsed = parse_report_csv(csv);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RunRecord& r = rows[i].runs[0];
    CHECK(parsed[i].instance == rows[i].instance);
    CHECK(parsed[i].strategy == to_string(rows[i].strategy));
    CHECK(parsed[i].task == to_string(rows[i].task));
    CHECK(parsed[i].queries == r.queries);
    CHECK(parsed[i].feasible == r.feasible);
    CHECK(parsed[i].infeasible == r.infeasible);
    CHECK(parsed[i].wall == r.wall);
    CHECK(parsed[i].timed_out == r.timed_out);
  }
  CHECK(emit_report(rows, ReportFormat::kCsv) == csv);

  const auto plot = lines_of(emit_report(rows, ReportFormat::kPlotData));
  CHECK(plot.size() == rows.size() + 1);
  CHECK(plot[0] == "instance,strategy,task,mean_wall_ms,timed_out");
}

TEST_CASE("report format names") {
  CHECK(parse_report_format("table") == ReportFormat::kTable);
  CHECK(parse_report_format("csv") == ReportFormat::kCsv);
  CHECK(parse_report_format("plotdata") == ReportFormat::kPlotData);
  CHECK_FALSE(parse_report_format("xml").has_value());
  CHECK_THROWS(parse_report_csv("bad header\n"));
  CHECK_THROWS(parse_report_csv(std::string(kCsvHeader) + "\na,b,c,1,2,3\n"));
}
