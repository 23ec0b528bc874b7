/**
 * plan_search.cc
 */

#include "percplan/plan_search.hpp"

#include <algorithm>
#include <map>

namespace percplan {

std::strong_ordering operator<=>(const Plan& a, const Plan& b) {
  if (auto c = a.steps.size() <=> b.steps.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (auto c = compare_actions(a.steps[i], b.steps[i]); c != 0) return c;
  }
  return std::strong_ordering::equal;
}

// -----------------------------------------------------------------------------
// Prohibitions
// -----------------------------------------------------------------------------

std::string to_string(const ConditionalProhibition& p) {
  std::string obj;
  switch (p.obj.kind) {
    case ObjectPattern::Kind::kAny:
      obj = "*";
      break;
    case ObjectPattern::Kind::kExact:
      obj = p.obj.obj.name;
      break;
    case ObjectPattern::Kind::kAboveCell:
      obj = "above(" + p.obj.cell.name() + ")";
      break;
    case ObjectPattern::Kind::kNotCarrying:
      obj = "not_carrying(" + p.obj.obj.name + ")";
      break;
  }
  std::string dest;
  switch (p.dest.kind) {
    case DestPattern::Kind::kAny:
      dest = "*";
      break;
    case DestPattern::Kind::kExact:
      dest = entity_name(p.dest.entity);
      break;
    case DestPattern::Kind::kOnStackAt:
      dest = "above(" + entity_name(p.dest.entity) + ")";
      break;
  }
  std::string out;
  if (!p.condition.empty()) {
    std::string_view sep;
    for (const FluentLiteral& lit : p.condition) {
      out += sep;
      out += to_string(lit);
      sep = ", ";
    }
    out += " ->> ";
  }
  out += "-move(" + obj + "," + dest + "," +
         (p.orient ? std::string(to_string(*p.orient)) : std::string("*")) + ")";
  return out;
}

std::strong_ordering operator<=>(const ConditionalProhibition& a,
                                 const ConditionalProhibition& b) {
  if (a == b) return std::strong_ordering::equal;
  return to_string(a) <=> to_string(b);
}

namespace {

bool object_matches(const ObjectPattern& pattern, const State& state,
                    const ObjectId& moved) {
  switch (pattern.kind) {
    case ObjectPattern::Kind::kAny:
      return true;
    case ObjectPattern::Kind::kExact:
      return moved == pattern.obj;
    case ObjectPattern::Kind::kAboveCell:
      return state.base_cell(moved) == pattern.cell;
    case ObjectPattern::Kind::kNotCarrying:
      if (moved == pattern.obj) return false;
      return !state.contains(pattern.obj) || !state.is_above(pattern.obj, moved);
  }
  return false;
}

bool dest_matches(const DestPattern& pattern, const State& state,
                  const Entity& dest) {
  switch (pattern.kind) {
    case DestPattern::Kind::kAny:
      return true;
    case DestPattern::Kind::kExact:
      return dest == pattern.entity;
    case DestPattern::Kind::kOnStackAt: {
      const Cell base = is_cell(dest) ? std::get<Cell>(dest)
                                      : state.base_cell(std::get<ObjectId>(dest));
      return Entity(base) == pattern.entity;
    }
  }
  return false;
}

bool literal_holds_safely(const State& state, const FluentLiteral& lit) {
  if (!state.contains(lit.obj)) return false;
  if (const auto* obj = std::get_if<ObjectId>(&lit.entity);
      obj != nullptr && lit.kind != FluentLiteral::Kind::kOri &&
      !state.contains(*obj)) {
    return false;
  }
  return literal_holds(state, lit);
}

bool blocks_with_dest(const ConditionalProhibition& p, const State& state,
                      const MoveAction& action, const Entity& dest) {
  if (p.orient && *p.orient != action.orient) return false;
  if (!object_matches(p.obj, state, action.obj)) return false;
  if (!dest_matches(p.dest, state, dest)) return false;
  return std::all_of(p.condition.begin(), p.condition.end(),
                     [&](const FluentLiteral& lit) {
                       return literal_holds_safely(state, lit);
                     });
}

}  // namespace

bool prohibition_blocks(const ConditionalProhibition& prohibition,
                        const State& state, const MoveAction& action,
                        const Grid& grid) {
  if (!state.contains(action.obj)) return false;
  Entity dest;
  try {
    dest = normalized_destination(state, action, grid);
  } catch (const DomainError&) {
    return false;
  }
  return blocks_with_dest(prohibition, state, action, dest);
}

ProhibitionSet::ProhibitionSet(std::vector<ConditionalProhibition> items,
                               Grid grid)
    : items_(std::move(items)), grid_(grid) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool ProhibitionSet::forbids(const State& state,
                             const MoveAction& action) const {
  if (items_.empty()) return false;
  const Entity dest = normalized_destination(state, action, grid_);
  return std::any_of(items_.begin(), items_.end(),
                     [&](const ConditionalProhibition& p) {
                       return blocks_with_dest(p, state, action, dest);
                     });
}

// -----------------------------------------------------------------------------
// Cursor
// -----------------------------------------------------------------------------

namespace {

class CombinedGate : public ExternalPreconditions {
 public:
  CombinedGate(const ExternalPreconditions* external,
               const ProhibitionSet& prohibitions)
      : external_(external), prohibitions_(prohibitions) {}

  bool forbids(const State& state, const MoveAction& action) const override {
    if (external_ != nullptr && external_->forbids(state, action)) return true;
    return prohibitions_.forbids(state, action);
  }

 private:
  const ExternalPreconditions* external_;
  const ProhibitionSet& prohibitions_;
};

}  // namespace

PlanCursor::PlanCursor(SearchProblem problem, const BlockedPlanSet* blocked)
    : problem_(std::move(problem)),
      prohibitions_(problem_.constraints, problem_.config.grid),
      blocked_(blocked) {
  if (problem_.horizon.maxstep < 0 ||
      problem_.horizon.maxstep > Horizon::kCap) {
    throw DomainError("maxstep must be within 0.." +
                      std::to_string(Horizon::kCap));
  }
  // Every goal literal only changes when its object moves, except that with
  // movable stacks a below-literal also changes when a supporter moves.
  std::map<ObjectId, std::vector<std::size_t>> by_object;
  const auto& literals = problem_.goal.literals;
  for (std::size_t i = 0; i < literals.size(); ++i) {
    if (literals[i].kind == FluentLiteral::Kind::kBelow &&
        !problem_.config.require_clear) {
      continue;
    }
    by_object[literals[i].obj].push_back(i);
  }
  goal_objects_.assign(by_object.begin(), by_object.end());
}

int PlanCursor::lower_bound(const State& state,
                            std::vector<ObjectId>* unsatisfied) const {
  int count = 0;
  const auto& literals = problem_.goal.literals;
  for (const auto& [obj, indices] : goal_objects_) {
    const bool ok =
        std::all_of(indices.begin(), indices.end(), [&](std::size_t i) {
          return literal_holds(state, literals[i]);
        });
    if (!ok) {
      ++count;
      if (unsatisfied != nullptr) unsatisfied->push_back(obj);
    }
  }
  return count;
}

void PlanCursor::push_frame(State state) {
  const int remaining = length_ - static_cast<int>(stack_.size());
  std::vector<ObjectId> unsatisfied;
  const int bound = lower_bound(state, &unsatisfied);
  const CombinedGate gate(problem_.external, prohibitions_);

  Frame frame{std::move(state), {}, 0};
  if (bound > 0 && bound == remaining) {
    // Every remaining step has to move a distinct unsatisfied object.
    for (const ObjectId& obj : unsatisfied) {
      auto more = enumerate_object_actions(frame.state, obj, problem_.config, &gate);
      frame.actions.insert(frame.actions.end(),
                           std::make_move_iterator(more.begin()),
                           std::make_move_iterator(more.end()));
    }
  } else {
    frame.actions = enumerate_actions(frame.state, problem_.config, &gate);
  }
  stack_.push_back(std::move(frame));
}

bool PlanCursor::deadline_passed() {
  if (!deadline_ || (++ticks_ & 0xff) != 0) return false;
  return Clock::now() >= *deadline_;
}

void PlanCursor::start_length(int length) {
  length_ = length;
  stack_.clear();
  prefix_.steps.clear();
}

std::optional<Plan> PlanCursor::next() {
  while (status_ == Status::kReady) {
    if (stack_.empty()) {
      if (length_ >= problem_.horizon.maxstep) {
        status_ = Status::kExhausted;
        break;
      }
      start_length(length_ + 1);
      if (length_ == 0) {
        Plan empty;
        if (goal_holds(problem_.init, problem_.goal) &&
            (blocked_ == nullptr || !blocked_->contains(empty))) {
          return empty;
        }
        continue;
      }
      if (lower_bound(problem_.init, nullptr) <= length_) {
        push_frame(problem_.init);
      }
      continue;
    }

    if (deadline_passed()) {
      status_ = Status::kTimedOut;
      break;
    }

    Frame& frame = stack_.back();
    if (frame.next == frame.actions.size()) {
      stack_.pop_back();
      if (!prefix_.steps.empty()) prefix_.steps.pop_back();
      continue;
    }
    const MoveAction action = frame.actions[frame.next++];
    State child = apply(frame.state, action, problem_.config);
    ++nodes_;

    const int remaining = length_ - static_cast<int>(stack_.size());
    if (remaining == 0) {
      if (!goal_holds(child, problem_.goal)) continue;
      Plan plan = prefix_;
      plan.steps.push_back(action);
      if (blocked_ != nullptr && blocked_->contains(plan)) continue;
      return plan;
    }
    if (lower_bound(child, nullptr) > remaining) continue;
    prefix_.steps.push_back(action);
    push_frame(std::move(child));
  }
  return std::nullopt;
}

Enumeration enumerate_plans(const SearchProblem& problem,
                            const BlockedPlanSet& blocked, std::size_t limit) {
  Enumeration result;
  if (limit == 0) {
    result.stop = StopReason::kLimitReached;
    return result;
  }
  PlanCursor cursor(problem, &blocked);
  while (auto plan = cursor.next()) {
    result.plans.push_back(std::move(*plan));
    if (result.plans.size() >= limit) {
      result.stop = StopReason::kLimitReached;
      return result;
    }
  }
  if (cursor.status() == PlanCursor::Status::kTimedOut) {
    result.stop = StopReason::kTimedOut;
    return result;
  }
  if (result.plans.empty()) {
    throw HorizonExhausted("no plan within maxstep " +
                           std::to_string(problem.horizon.maxstep));
  }
  result.stop = StopReason::kHorizonExhausted;
  return result;
}

}  // namespace percplan
