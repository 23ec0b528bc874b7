/**
 * strategies.hpp
 *
 * The four ways of combining perception with planning:
 *
 *   none  plan without any checks, grade afterwards (metrics only)
 *   pre   ask perception about every object first and plan with the results
 *         as extra preconditions
 *   filt  plan without checks, verify each plan, try the next one on failure
 *   repl  like filt, but turn everything perception has revealed into
 *         prohibitions and restart the planner after every failure
 */

#ifndef PERCPLAN_STRATEGIES_HPP
#define PERCPLAN_STRATEGIES_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "percplan/geometry.hpp"
#include "percplan/perception.hpp"
#include "percplan/plan_search.hpp"
#include "percplan/world_model.hpp"

namespace percplan {

enum class Strategy : std::uint8_t { kNone, kPre, kFilt, kRepl };

/// Report order: none, filt, pre, repl.
inline constexpr std::array<Strategy, 4> kReportOrder{
    Strategy::kNone, Strategy::kFilt, Strategy::kPre, Strategy::kRepl};

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view text);

struct FailureReason {
  std::size_t step = 0;
  /// Unset when the step could not be executed at all.
  std::optional<CheckQuery> query;
  std::string detail;
};

struct FeasibilityVerdict {
  std::vector<FailureReason> reasons;

  bool feasible() const { return reasons.empty(); }
};

/**
 * Simulates the plan and evaluates every check each step needs, collecting
 * all failures. Shapes come from `shape_of`.
 */
FeasibilityVerdict verify_plan_with(const Plan& plan, const State& init,
                                    const DomainConfig& config,
                                    const ShapeCatalog& catalog,
                                    const OcclusionRelation& occl,
                                    const ShapeLookup& shape_of);

/// Same, fetching shapes lazily through the view's ledger.
FeasibilityVerdict verify_plan(const Plan& plan, const State& init,
                               PerceptView& view, const ShapeCatalog& catalog,
                               const OcclusionRelation& occl,
                               const DomainConfig& config);

/// Grades a plan against the true shapes without touching the ledger.
FeasibilityVerdict ground_truth_verdict(const Plan& plan, const State& init,
                                        const PerceptView& view,
                                        const ShapeCatalog& catalog,
                                        const OcclusionRelation& occl,
                                        const DomainConfig& config);

/**
 * Stability and reach results tabulated for every object, cell and
 * orientation. Forbids a move when any of its checks would fail.
 */
class CompiledPreconditions : public ExternalPreconditions {
 public:
  bool forbids(const State& state, const MoveAction& action) const override;

  bool unstable(const ObjectId& top, Orientation top_o, const ObjectId& bottom,
                Orientation bottom_o) const;
  bool blocks(const ObjectId& blocker, const Cell& blocker_cell,
              Orientation blocker_o, const Cell& target_cell) const;

  std::size_t object_count() const { return index_.size(); }

 private:
  friend CompiledPreconditions precompile_checks(PerceptView&,
                                                 const ShapeCatalog&,
                                                 const OcclusionRelation&);

  std::size_t stack_slot(std::size_t top, Orientation top_o, std::size_t bottom,
                         Orientation bottom_o) const;
  std::size_t reach_slot(std::size_t blocker, const Cell& blocker_cell,
                         Orientation blocker_o, const Cell& target_cell) const;

  std::map<ObjectId, std::size_t> index_;
  Grid grid_;
  OcclusionRelation occl_;
  std::vector<bool> stack_table_;
  std::vector<bool> reach_table_;
};

/// Queries the shape of every named object, then tabulates all checks.
CompiledPreconditions precompile_checks(PerceptView& view,
                                        const ShapeCatalog& catalog,
                                        const OcclusionRelation& occl);

/**
 * Prohibitions implied by every shape currently cached in the view:
 *
 *  - for each unstable (top, bottom) pair: -move(top, bottom, orient) while
 *    bottom has the offending orientation; orientations collapse to
 *    wildcards (and the condition to true) when every combination fails;
 *  - for each object o whose shape blocks at orientation r and each occlusion
 *    pair (l, l'): while o stands on l with orientation r, nothing (other
 *    than o's own stack) may be placed above l', and nothing above l' may be
 *    picked.
 *
 * Sorted and duplicate-free; grows monotonically with the cached shapes.
 */
std::vector<ConditionalProhibition> derive_constraints(
    const PerceptView& view, const ShapeCatalog& catalog,
    const OcclusionRelation& occl);

struct LoadedInstance {
  std::string id;
  SceneTruth scene;
  TaskSpec task;
  Horizon horizon;
  ShapeCatalog catalog;
  DomainConfig config;
};

struct PlanTask {
  enum class Kind : std::uint8_t { kFirst, kCount };

  Kind kind = Kind::kFirst;
  std::size_t count = 1;

  static PlanTask First() { return {Kind::kFirst, 1}; }
  static PlanTask Count(std::size_t n) { return {Kind::kCount, n}; }

  std::size_t target() const { return kind == Kind::kFirst ? 1 : count; }
  bool operator==(const PlanTask&) const = default;
};

/// `first` or `count:<N>`.
std::string to_string(const PlanTask& task);
std::optional<PlanTask> parse_task(std::string_view text);

/// One replanning restart.
struct ReplRound {
  /// Prohibitions in force when the infeasible plan was found.
  std::vector<ConditionalProhibition> constraints;
  Plan infeasible_plan;
  FeasibilityVerdict verdict;
  std::size_t constraints_after = 0;
};

struct RunOptions {
  PlanTask task;
  std::chrono::milliseconds budget{std::chrono::seconds(2000)};
  bool record_infeasible = false;
  std::optional<OrientationNoise> noise;
};

struct RunOutcome {
  std::vector<Plan> feasible_plans;
  std::size_t infeasible_count = 0;
  /// Filled only with RunOptions::record_infeasible.
  std::vector<Plan> infeasible_plans;
  std::size_t query_count = 0;
  bool timed_out = false;
  bool horizon_exhausted = false;
  std::chrono::microseconds wall_time{0};
  std::vector<ReplRound> repl_rounds;
};

/// Never throws on budget overrun; sets timed_out and keeps partial results.
RunOutcome run_strategy(Strategy strategy, const LoadedInstance& instance,
                        const RunOptions& options);

}  // namespace percplan

#endif  // PERCPLAN_STRATEGIES_HPP
