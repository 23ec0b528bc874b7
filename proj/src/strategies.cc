/**
 * strategies.cc
 */

#include "percplan/strategies.hpp"

#include <algorithm>
#include <charconv>

namespace percplan {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNone:
      return "none";
    case Strategy::kPre:
      return "pre";
    case Strategy::kFilt:
      return "filt";
    case Strategy::kRepl:
      return "repl";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (Strategy s : kReportOrder) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string to_string(const PlanTask& task) {
  if (task.kind == PlanTask::Kind::kFirst) return "first";
  return "count:" + std::to_string(task.count);
}

std::optional<PlanTask> parse_task(std::string_view text) {
  if (text == "first") return PlanTask::First();
  constexpr std::string_view kPrefix = "count:";
  if (!text.starts_with(kPrefix)) return std::nullopt;
  text.remove_prefix(kPrefix.size());
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size() || n == 0) {
    return std::nullopt;
  }
  return PlanTask::Count(n);
}

// -----------------------------------------------------------------------------
// Verification
// -----------------------------------------------------------------------------

FeasibilityVerdict verify_plan_with(const Plan& plan, const State& init,
                                    const DomainConfig& config,
                                    const ShapeCatalog& catalog,
                                    const OcclusionRelation& occl,
                                    const ShapeLookup& shape_of) {
  FeasibilityVerdict verdict;
  State state = init;
  for (std::size_t step = 0; step < plan.steps.size(); ++step) {
    const MoveAction& action = plan.steps[step];
    if (!is_admissible(state, action, config)) {
      verdict.reasons.push_back(
          {step, std::nullopt, to_string(action) + " is not executable"});
      return verdict;
    }
    for (const CheckQuery& query : collect_checks(state, action, occl)) {
      if (evaluate_check(query, catalog, occl, shape_of)) {
        verdict.reasons.push_back({step, query, to_string(query)});
      }
    }
    state = apply(state, action, config);
  }
  return verdict;
}

FeasibilityVerdict verify_plan(const Plan& plan, const State& init,
                               PerceptView& view, const ShapeCatalog& catalog,
                               const OcclusionRelation& occl,
                               const DomainConfig& config) {
  return verify_plan_with(
      plan, init, config, catalog, occl,
      [&view](const ObjectId& obj) { return view.shape_of(obj); });
}

FeasibilityVerdict ground_truth_verdict(const Plan& plan, const State& init,
                                        const PerceptView& view,
                                        const ShapeCatalog& catalog,
                                        const OcclusionRelation& occl,
                                        const DomainConfig& config) {
  const auto truth = ground_truth_shapes(view);
  return verify_plan_with(plan, init, config, catalog, occl,
                          [&truth](const ObjectId& obj) {
                            auto it = truth.find(obj);
                            if (it == truth.end()) {
                              throw UnknownObject("unknown object " + obj.name);
                            }
                            return it->second;
                          });
}

// -----------------------------------------------------------------------------
// Precomputation
// -----------------------------------------------------------------------------

std::size_t CompiledPreconditions::stack_slot(std::size_t top,
                                              Orientation top_o,
                                              std::size_t bottom,
                                              Orientation bottom_o) const {
  const std::size_t n = index_.size();
  return ((top * 3 + static_cast<std::size_t>(top_o)) * n + bottom) * 3 +
         static_cast<std::size_t>(bottom_o);
}

std::size_t CompiledPreconditions::reach_slot(std::size_t blocker,
                                              const Cell& blocker_cell,
                                              Orientation blocker_o,
                                              const Cell& target_cell) const {
  const auto cells = static_cast<std::size_t>(grid_.width * grid_.depth);
  const auto cell_index = [&](const Cell& c) {
    return static_cast<std::size_t>(c.y * grid_.width + c.x);
  };
  return ((blocker * cells + cell_index(blocker_cell)) * 3 +
          static_cast<std::size_t>(blocker_o)) *
             cells +
         cell_index(target_cell);
}

bool CompiledPreconditions::unstable(const ObjectId& top, Orientation top_o,
                                     const ObjectId& bottom,
                                     Orientation bottom_o) const {
  auto t = index_.find(top);
  auto b = index_.find(bottom);
  if (t == index_.end() || b == index_.end()) {
    throw UnknownObject("no precomputed checks for " + top.name + "/" +
                        bottom.name);
  }
  return stack_table_[stack_slot(t->second, top_o, b->second, bottom_o)];
}

bool CompiledPreconditions::blocks(const ObjectId& blocker,
                                   const Cell& blocker_cell,
                                   Orientation blocker_o,
                                   const Cell& target_cell) const {
  auto it = index_.find(blocker);
  if (it == index_.end()) {
    throw UnknownObject("no precomputed checks for " + blocker.name);
  }
  if (!grid_.contains(blocker_cell) || !grid_.contains(target_cell)) {
    throw CellOutOfRange("cell outside the grid");
  }
  return reach_table_[reach_slot(it->second, blocker_cell, blocker_o,
                                 target_cell)];
}

bool CompiledPreconditions::forbids(const State& state,
                                    const MoveAction& action) const {
  for (const CheckQuery& query : collect_checks(state, action, occl_)) {
    if (const auto* stack = std::get_if<StackQuery>(&query)) {
      if (unstable(stack->top, stack->top_orient, stack->bottom,
                   stack->bottom_orient)) {
        return true;
      }
    } else {
      const auto& reach = std::get<ReachQuery>(query);
      if (blocks(reach.blocker, reach.blocker_cell, reach.blocker_orient,
                 reach.target_cell)) {
        return true;
      }
    }
  }
  return false;
}

CompiledPreconditions precompile_checks(PerceptView& view,
                                        const ShapeCatalog& catalog,
                                        const OcclusionRelation& occl) {
  CompiledPreconditions compiled;
  compiled.grid_ = occl.grid();
  compiled.occl_ = occl;

  std::vector<ShapeId> shapes;
  for (const ObjectId& obj : view.objects()) {
    compiled.index_.emplace(obj, shapes.size());
    shapes.push_back(view.shape_of(obj));
  }

  const std::size_t n = shapes.size();
  compiled.stack_table_.assign(n * 3 * n * 3, false);
  for (std::size_t top = 0; top < n; ++top) {
    for (std::size_t bottom = 0; bottom < n; ++bottom) {
      if (top == bottom) continue;
      for (Orientation top_o : kOrientations) {
        for (Orientation bottom_o : kOrientations) {
          compiled.stack_table_[compiled.stack_slot(top, top_o, bottom,
                                                    bottom_o)] =
              unstackable(catalog, shapes[top], top_o, shapes[bottom],
                          bottom_o);
        }
      }
    }
  }

  const Grid& grid = compiled.grid_;
  const auto cells = static_cast<std::size_t>(grid.width * grid.depth);
  compiled.reach_table_.assign(n * cells * 3 * cells, false);
  for (std::size_t blocker = 0; blocker < n; ++blocker) {
    for (int by = 0; by < grid.depth; ++by) {
      for (int bx = 0; bx < grid.width; ++bx) {
        for (Orientation orient : kOrientations) {
          for (int ty = 0; ty < grid.depth; ++ty) {
            for (int tx = 0; tx < grid.width; ++tx) {
              const Cell from{bx, by};
              const Cell to{tx, ty};
              compiled.reach_table_[compiled.reach_slot(blocker, from, orient,
                                                        to)] =
                  reach_blocked(catalog, occl, shapes[blocker], from, orient,
                                to);
            }
          }
        }
      }
    }
  }
  return compiled;
}

// -----------------------------------------------------------------------------
// Replanning constraints
// -----------------------------------------------------------------------------

std::vector<ConditionalProhibition> derive_constraints(
    const PerceptView& view, const ShapeCatalog& catalog,
    const OcclusionRelation& occl) {
  std::vector<ConditionalProhibition> out;
  const auto& known = view.known_shapes();

  for (const auto& [top, top_shape] : known) {
    for (const auto& [bottom, bottom_shape] : known) {
      if (top == bottom) continue;
      bool table[3][3];
      bool all = true;
      for (Orientation t : kOrientations) {
        for (Orientation b : kOrientations) {
          const bool u = unstackable(catalog, top_shape, t, bottom_shape, b);
          table[static_cast<int>(t)][static_cast<int>(b)] = u;
          all = all && u;
        }
      }
      const auto stack_rule = [&](std::optional<Orientation> t,
                                  std::optional<Orientation> b) {
        ConditionalProhibition p{ObjectPattern::Exact(top),
                                 DestPattern::Exact(bottom), t, {}};
        if (b) p.condition.push_back(FluentLiteral::Ori(bottom, *b));
        out.push_back(std::move(p));
      };
      if (all) {
        stack_rule(std::nullopt, std::nullopt);
        continue;
      }
      bool row_done[3] = {false, false, false};
      bool col_done[3] = {false, false, false};
      for (Orientation t : kOrientations) {
        const int ti = static_cast<int>(t);
        if (table[ti][0] && table[ti][1] && table[ti][2]) {
          stack_rule(t, std::nullopt);
          row_done[ti] = true;
        }
      }
      for (Orientation b : kOrientations) {
        const int bi = static_cast<int>(b);
        if (table[0][bi] && table[1][bi] && table[2][bi]) {
          stack_rule(std::nullopt, b);
          col_done[bi] = true;
        }
      }
      for (Orientation t : kOrientations) {
        for (Orientation b : kOrientations) {
          const int ti = static_cast<int>(t);
          const int bi = static_cast<int>(b);
          if (table[ti][bi] && !row_done[ti] && !col_done[bi]) {
            stack_rule(t, b);
          }
        }
      }
    }
  }

  for (const auto& [obj, shape] : known) {
    for (const BlockerRule& rule : catalog.blocker_rules()) {
      if (rule.shape != shape) continue;
      for (const auto& [front, behind] : occl.pairs()) {
        const std::vector<FluentLiteral> condition{
            FluentLiteral::Below(front, obj),
            FluentLiteral::Ori(obj, rule.orient)};
        out.push_back({ObjectPattern::NotCarrying(obj),
                       DestPattern::OnStackAt(behind), std::nullopt, condition});
        out.push_back({ObjectPattern::AboveCell(behind), DestPattern::Any(),
                       std::nullopt, condition});
      }
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// -----------------------------------------------------------------------------
// Orchestration
// -----------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

struct RunContext {
  const LoadedInstance& instance;
  const RunOptions& options;
  PerceptView view;
  OcclusionRelation occl;
  Clock::time_point deadline;
  RunOutcome outcome;

  SearchProblem problem() const {
    SearchProblem p;
    p.init = view.initial_state();
    p.goal = instance.task.goal;
    p.horizon = instance.horizon;
    p.config = instance.config;
    return p;
  }

  bool done() const {
    return outcome.feasible_plans.size() >= options.task.target();
  }

  void note_infeasible(const Plan& plan) {
    ++outcome.infeasible_count;
    if (options.record_infeasible) outcome.infeasible_plans.push_back(plan);
  }

  void note_stop(const PlanCursor& cursor) {
    if (cursor.status() == PlanCursor::Status::kTimedOut) {
      outcome.timed_out = true;
    } else if (cursor.status() == PlanCursor::Status::kExhausted) {
      outcome.horizon_exhausted = true;
    }
  }

  bool out_of_time() {
    if (done() || Clock::now() < deadline) return false;
    outcome.timed_out = true;
    return true;
  }
};

void run_none(RunContext& ctx) {
  PlanCursor cursor(ctx.problem());
  cursor.set_deadline(ctx.deadline);
  std::size_t emitted = 0;
  while (emitted < ctx.options.task.target()) {
    auto plan = cursor.next();
    if (!plan) {
      ctx.note_stop(cursor);
      return;
    }
    ++emitted;
    const FeasibilityVerdict verdict = ground_truth_verdict(
        *plan, ctx.view.initial_state(), ctx.view, ctx.instance.catalog,
        ctx.occl, ctx.instance.config);
    if (verdict.feasible()) {
      ctx.outcome.feasible_plans.push_back(std::move(*plan));
    } else {
      ctx.note_infeasible(*plan);
    }
    if (emitted < ctx.options.task.target() && ctx.out_of_time()) return;
  }
}

void run_pre(RunContext& ctx) {
  const CompiledPreconditions compiled =
      precompile_checks(ctx.view, ctx.instance.catalog, ctx.occl);
  SearchProblem problem = ctx.problem();
  problem.external = &compiled;
  PlanCursor cursor(std::move(problem));
  cursor.set_deadline(ctx.deadline);
  while (!ctx.done()) {
    auto plan = cursor.next();
    if (!plan) {
      ctx.note_stop(cursor);
      return;
    }
    ctx.outcome.feasible_plans.push_back(std::move(*plan));
    if (ctx.out_of_time()) return;
  }
}

void run_filt(RunContext& ctx) {
  PlanCursor cursor(ctx.problem());
  cursor.set_deadline(ctx.deadline);
  while (!ctx.done()) {
    auto plan = cursor.next();
    if (!plan) {
      ctx.note_stop(cursor);
      return;
    }
    const FeasibilityVerdict verdict =
        verify_plan(*plan, ctx.view.initial_state(), ctx.view,
                    ctx.instance.catalog, ctx.occl, ctx.instance.config);
    if (verdict.feasible()) {
      ctx.outcome.feasible_plans.push_back(std::move(*plan));
    } else {
      ctx.note_infeasible(*plan);
    }
    if (ctx.out_of_time()) return;
  }
}

void run_repl(RunContext& ctx) {
  BlockedPlanSet blocked;
  std::vector<ConditionalProhibition> constraints;
  while (!ctx.done()) {
    SearchProblem problem = ctx.problem();
    problem.constraints = constraints;
    PlanCursor cursor(std::move(problem), &blocked);
    cursor.set_deadline(ctx.deadline);

    bool restart = false;
    while (!ctx.done() && !restart) {
      auto plan = cursor.next();
      if (!plan) {
        ctx.note_stop(cursor);
        return;
      }
      FeasibilityVerdict verdict =
          verify_plan(*plan, ctx.view.initial_state(), ctx.view,
                      ctx.instance.catalog, ctx.occl, ctx.instance.config);
      blocked.insert(*plan);
      if (verdict.feasible()) {
        ctx.outcome.feasible_plans.push_back(std::move(*plan));
      } else {
        ctx.note_infeasible(*plan);
        std::vector<ConditionalProhibition> learned =
            derive_constraints(ctx.view, ctx.instance.catalog, ctx.occl);
        ctx.outcome.repl_rounds.push_back(
            {cursor.problem().constraints, std::move(*plan), std::move(verdict),
             learned.size()});
        constraints = std::move(learned);
        restart = true;
      }
      if (ctx.out_of_time()) return;
    }
  }
}

}  // namespace

RunOutcome run_strategy(Strategy strategy, const LoadedInstance& instance,
                        const RunOptions& options) {
  const auto start = Clock::now();
  RunContext ctx{instance,
                 options,
                 bottom_up(instance.scene, instance.task, options.noise),
                 occlusion_of(instance.scene),
                 start + options.budget,
                 {}};
  switch (strategy) {
    case Strategy::kNone:
      run_none(ctx);
      break;
    case Strategy::kPre:
      run_pre(ctx);
      break;
    case Strategy::kFilt:
      run_filt(ctx);
      break;
    case Strategy::kRepl:
      run_repl(ctx);
      break;
  }
  ctx.outcome.query_count = ctx.view.ledger().count();
  ctx.outcome.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
      Clock::now() - start);
  return std::move(ctx.outcome);
}

}  // namespace percplan
