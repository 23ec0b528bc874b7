/**
 * plan_search.hpp
 *
 * Bounded-horizon plan enumeration. Plans come out shortest first and, within
 * one length, in lexicographic order of their action sequences. Distinct
 * action sequences are distinct plans even when they reach the same state.
 */

#ifndef PERCPLAN_PLAN_SEARCH_HPP
#define PERCPLAN_PLAN_SEARCH_HPP

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "percplan/world_model.hpp"

namespace percplan {

/// Step i of the plan is steps[i].
struct Plan {
  std::vector<MoveAction> steps;

  std::size_t length() const { return steps.size(); }
  bool empty() const { return steps.empty(); }

  bool operator==(const Plan&) const = default;
};

/// Shorter plans first, then lexicographic by canonical action order.
std::strong_ordering operator<=>(const Plan& a, const Plan& b);

struct PlanLess {
  bool operator()(const Plan& a, const Plan& b) const { return (a <=> b) < 0; }
};

using BlockedPlanSet = std::set<Plan, PlanLess>;

struct Horizon {
  static constexpr int kCap = 12;

  int maxstep = 3;
};

/// Matches the moved object of an action.
struct ObjectPattern {
  enum class Kind : std::uint8_t {
    kAny,
    kExact,        // the named object
    kAboveCell,    // any object whose stack stands on `cell`
    kNotCarrying,  // any object whose move leaves `obj` where it is
  };

  Kind kind = Kind::kAny;
  ObjectId obj;
  Cell cell;

  static ObjectPattern Any() { return {}; }
  static ObjectPattern Exact(ObjectId obj) { return {Kind::kExact, std::move(obj), {}}; }
  static ObjectPattern AboveCell(Cell cell) { return {Kind::kAboveCell, {}, cell}; }
  static ObjectPattern NotCarrying(ObjectId obj) {
    return {Kind::kNotCarrying, std::move(obj), {}};
  }

  bool operator==(const ObjectPattern&) const = default;
};

/// Matches the normalized destination of an action.
struct DestPattern {
  enum class Kind : std::uint8_t {
    kAny,
    kExact,      // exactly `entity`
    kOnStackAt,  // anything whose stack stands on `cell`, or the cell itself
  };

  Kind kind = Kind::kAny;
  Entity entity;

  static DestPattern Any() { return {}; }
  static DestPattern Exact(Entity e) { return {Kind::kExact, std::move(e)}; }
  static DestPattern OnStackAt(Cell cell) { return {Kind::kOnStackAt, cell}; }

  bool operator==(const DestPattern&) const = default;
};

/**
 * Forbids every action matching the pattern in any state where all condition
 * literals hold. An empty condition is always true.
 */
struct ConditionalProhibition {
  ObjectPattern obj;
  DestPattern dest;
  std::optional<Orientation> orient;  // unset: any orientation
  std::vector<FluentLiteral> condition;

  bool operator==(const ConditionalProhibition&) const = default;
};

std::strong_ordering operator<=>(const ConditionalProhibition& a,
                                 const ConditionalProhibition& b);

std::string to_string(const ConditionalProhibition& prohibition);

bool prohibition_blocks(const ConditionalProhibition& prohibition,
                        const State& state, const MoveAction& action,
                        const Grid& grid);

/// Sorted, duplicate-free prohibitions usable as an action filter.
class ProhibitionSet : public ExternalPreconditions {
 public:
  ProhibitionSet() = default;
  ProhibitionSet(std::vector<ConditionalProhibition> items, Grid grid);

  bool forbids(const State& state, const MoveAction& action) const override;

  const std::vector<ConditionalProhibition>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  std::vector<ConditionalProhibition> items_;
  Grid grid_;
};

class HorizonExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchProblem {
  State init;
  GoalFormula goal;
  Horizon horizon;
  DomainConfig config;
  std::vector<ConditionalProhibition> constraints;
  /// Extra action filter, e.g. precomputed perception checks. Not owned.
  const ExternalPreconditions* external = nullptr;
};

/**
 * Resumable depth-first enumeration, one length at a time from 0 to
 * maxstep. Branches that provably cannot reach the goal in the remaining
 * steps are cut; this never changes which plans come out or their order.
 */
class PlanCursor {
 public:
  using Clock = std::chrono::steady_clock;

  enum class Status : std::uint8_t { kReady, kExhausted, kTimedOut };

  /// `blocked` is not owned and may grow between calls to next().
  explicit PlanCursor(SearchProblem problem,
                      const BlockedPlanSet* blocked = nullptr);

  void set_deadline(Clock::time_point deadline) { deadline_ = deadline; }

  /// Next plan, or nullopt once the horizon is exhausted or the deadline
  /// passed; status() tells which.
  std::optional<Plan> next();

  Status status() const { return status_; }
  std::uint64_t nodes_expanded() const { return nodes_; }
  const SearchProblem& problem() const { return problem_; }

 private:
  struct Frame {
    State state;
    std::vector<MoveAction> actions;
    std::size_t next = 0;
  };

  void start_length(int length);
  void push_frame(State state);
  int lower_bound(const State& state, std::vector<ObjectId>* unsatisfied) const;
  bool deadline_passed();

  SearchProblem problem_;
  ProhibitionSet prohibitions_;
  const BlockedPlanSet* blocked_;
  std::optional<Clock::time_point> deadline_;

  Status status_ = Status::kReady;
  int length_ = -1;
  std::vector<Frame> stack_;
  Plan prefix_;
  std::uint64_t nodes_ = 0;
  std::uint64_t ticks_ = 0;

  // Objects each goal literal depends on; below-literals only count when
  // stacked objects cannot move.
  std::vector<std::pair<ObjectId, std::vector<std::size_t>>> goal_objects_;
};

enum class StopReason : std::uint8_t { kLimitReached, kHorizonExhausted, kTimedOut };

struct Enumeration {
  std::vector<Plan> plans;
  StopReason stop = StopReason::kHorizonExhausted;
};

/**
 * Collects up to `limit` plans. Throws HorizonExhausted when no plan exists
 * within the horizon at all.
 */
Enumeration enumerate_plans(const SearchProblem& problem,
                            const BlockedPlanSet& blocked, std::size_t limit);

}  // namespace percplan

#endif  // PERCPLAN_PLAN_SEARCH_HPP
