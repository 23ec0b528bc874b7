#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "percplan/instance_io.hpp"
#include "percplan/strategies.hpp"

using namespace percplan;

namespace {

const Orientation V = Orientation::kVert;
const Orientation HX = Orientation::kHorizX;
const Orientation HY = Orientation::kHorizY;

const std::string kData = PERCPLAN_DATA_DIR;

LoadedInstance bundled(int n) {
  return load_instance(kData + "/instances/instance" + std::to_string(n) + ".inst",
                       kData + "/catalog/default.catalog");
}

ObjectId id(const char* name) { return ObjectId{name}; }

struct Env {
  LoadedInstance inst;
  PerceptView view;
  OcclusionRelation occl;

  explicit Env(LoadedInstance i)
      : inst(std::move(i)),
        view(bottom_up(inst.scene, inst.task)),
        occl(occlusion_of(inst.scene)) {}

  FeasibilityVerdict verify(const Plan& plan) {
    return verify_plan(plan, view.initial_state(), view, inst.catalog, occl,
                       inst.config);
  }
};

// Upright bolt sco2 at loc_3x1 in front of loc_3x2; profile obj1 at loc_0x0.
LoadedInstance replanning_scene() {
  LoadedInstance inst;
  inst.id = "replanning";
  inst.catalog = ShapeCatalog::Default();
  inst.scene.objects = {
      {"profile", Cell{0, 0}, HX, ShapeId{"aluprofil_f20_100_gray"}, 0.05, 0.05},
      {"bolt", Cell{3, 1}, V, ShapeId{"bolt_m20_100"}, 0.35, 0.15},
      {"nut", Cell{1, 1}, HX, ShapeId{"nut_m20"}, 0.15, 0.15}};
  inst.task.targets = {{id("obj1"), 0.05, 0.05}};
  inst.task.goal = {{FluentLiteral::Below(Cell{3, 2}, id("obj1"))}};
  return inst;
}

bool forbidden(const std::vector<ConditionalProhibition>& ps, const State& s,
               const MoveAction& a) {
  return ProhibitionSet(ps, Grid{}).forbids(s, a);
}

RunOutcome run(Strategy s, const LoadedInstance& inst, PlanTask task,
               bool record = false) {
  RunOptions options;
  options.task = task;
  options.budget = std::chrono::seconds(60);
  options.record_infeasible = record;
  return run_strategy(s, inst, options);
}

}  // namespace

TEST_CASE("strategy and task names") {
  for (Strategy s : kReportOrder) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_FALSE(parse_strategy("greedy").has_value());
  CHECK(parse_task("first") == PlanTask::First());
  CHECK(parse_task("count:100") == PlanTask::Count(100));
  CHECK_FALSE(parse_task("count:0").has_value());
  CHECK_FALSE(parse_task("count:x").has_value());
  CHECK(to_string(PlanTask::Count(7)) == "count:7");
}

TEST_CASE("moving the nut straight away fails on the upright bolt") {
  Env env(bundled(1));
  const Plan plan{{{id("obj1"), Cell{2, 1}, HY}}};
  const FeasibilityVerdict v = env.verify(plan);
  CHECK_FALSE(v.feasible());
  REQUIRE(v.reasons.size() == 1);
  CHECK(v.reasons[0].step == 0);
  REQUIRE(v.reasons[0].query.has_value());
  CHECK(std::get<ReachQuery>(*v.reasons[0].query).blocker == id("sco1"));
  CHECK(env.view.ledger().queried() == std::set{id("sco1")});
}

TEST_CASE("clearing the bolt first makes the nut move feasible") {
  Env env(bundled(1));
  const Plan plan{{{id("sco1"), Cell{3, 0}, HY}, {id("obj1"), Cell{2, 1}, HY}}};
  CHECK(env.verify(plan).feasible());
  CHECK(ground_truth_verdict(plan, env.view.initial_state(), env.view,
                             env.inst.catalog, env.occl, env.inst.config)
            .feasible());
}

TEST_CASE("a lying bolt on a profile is unstable") {
  Env env(bundled(3));
  const Plan plan{{{id("obj3"), Cell{2, 1}, HX}}};
  const FeasibilityVerdict v = env.verify(plan);
  REQUIRE(v.reasons.size() == 1);
  CHECK(std::holds_alternative<StackQuery>(*v.reasons[0].query));
  CHECK(env.verify(Plan{{{id("obj3"), Cell{2, 1}, V}}}).feasible());
}

TEST_CASE("a plan that cannot be executed is infeasible without a query") {
  Env env(bundled(3));
  const Plan plan{{{id("obj1"), Cell{2, 1}, V}}};
  const FeasibilityVerdict v = env.verify(plan);
  REQUIRE(v.reasons.size() == 1);
  CHECK_FALSE(v.reasons[0].query.has_value());
  CHECK(env.view.ledger().count() == 0);
}

TEST_CASE("precompiling queries every object") {
  for (auto [n, expected] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{3, 4}}) {
    Env env(bundled(n));
    const CompiledPreconditions c = precompile_checks(env.view, env.inst.catalog, env.occl);
    CHECK(env.view.ledger().count() == static_cast<std::size_t>(expected));
    CHECK(c.object_count() == static_cast<std::size_t>(expected));
  }
  LoadedInstance empty;
  Env env(empty);
  const CompiledPreconditions c = precompile_checks(env.view, env.inst.catalog, env.occl);
  CHECK(c.object_count() == 0);
  CHECK(env.view.ledger().count() == 0);
}

TEST_CASE("precompiled tables agree with the rule lookups") {
  Env env(bundled(3));
  const CompiledPreconditions c = precompile_checks(env.view, env.inst.catalog, env.occl);
  const auto truth = ground_truth_shapes(env.view);
  for (const auto& [a, sa] : truth) {
    for (const auto& [b, sb] : truth) {
      if (a == b) continue;  // never asked: an object cannot carry itself
      for (Orientation ra : kOrientations) {
        for (Orientation rb : kOrientations) {
          CHECK(c.unstable(a, ra, b, rb) == unstackable(env.inst.catalog, sa, ra, sb, rb));
        }
      }
    }
    for (const Cell& from : env.inst.scene.grid.cells_by_name()) {
      for (const Cell& to : env.inst.scene.grid.cells_by_name()) {
        for (Orientation r : kOrientations) {
          CHECK(c.blocks(a, from, r, to) ==
                reach_blocked(env.inst.catalog, env.occl, sa, from, r, to));
        }
      }
    }
  }
}

TEST_CASE("nothing is derived before any shape is known") {
  Env env(replanning_scene());
  CHECK(derive_constraints(env.view, env.inst.catalog, env.occl).empty());
}

TEST_CASE("a known bolt and profile forbid lying the bolt on the profile") {
  Env env(replanning_scene());
  env.view.shape_of(id("sco2"));
  env.view.shape_of(id("obj1"));
  const auto ps = derive_constraints(env.view, env.inst.catalog, env.occl);
  const State& s = env.view.initial_state();
  CHECK(forbidden(ps, s, {id("sco2"), Cell{0, 0}, HX}));
  CHECK(forbidden(ps, s, {id("sco2"), Cell{0, 0}, HY}));
  CHECK_FALSE(forbidden(ps, s, {id("sco2"), Cell{0, 0}, V}));
  // nothing may rest on the bolt, whatever its orientation
  for (Orientation r : kOrientations) {
    CHECK(forbidden(ps, s, {id("obj1"), Cell{3, 1}, r}));
  }
  const bool collapsed = std::any_of(ps.begin(), ps.end(), [](const auto& p) {
    return p.obj == ObjectPattern::Exact(ObjectId{"obj1"}) && !p.orient &&
           p.condition.empty();
  });
  CHECK(collapsed);
}

TEST_CASE("a known upright bolt fences off the cell behind it") {
  Env env(replanning_scene());
  env.view.shape_of(id("sco2"));
  const auto ps = derive_constraints(env.view, env.inst.catalog, env.occl);
  const State& s = env.view.initial_state();
  for (Orientation r : kOrientations) {
    CHECK(forbidden(ps, s, {id("obj1"), Cell{3, 2}, r}));
    CHECK(forbidden(ps, s, {id("sco1"), Cell{3, 2}, r}));
  }
  CHECK_FALSE(forbidden(ps, s, {id("obj1"), Cell{2, 2}, V}));
  // the bolt itself may go behind its old cell
  CHECK_FALSE(forbidden(ps, s, {id("sco2"), Cell{3, 2}, V}));
  // once the bolt lies down the fence is gone
  const State flat = apply(s, {id("sco2"), Cell{4, 0}, HX}, env.inst.config);
  CHECK_FALSE(forbidden(ps, flat, {id("obj1"), Cell{4, 1}, V}));
}

TEST_CASE("derived constraints grow with the known shapes") {
  std::mt19937_64 rng(41);
  for (int round = 0; round < 40; ++round) {
    Env env(oracle::random_instance(rng, 3, 3, 2, 2, round % 2 == 0));
    auto objs = env.view.objects();
    std::shuffle(objs.begin(), objs.end(), rng);
    std::vector<ConditionalProhibition> prev;
    for (const ObjectId& o : objs) {
      env.view.shape_of(o);
      const auto next = derive_constraints(env.view, env.inst.catalog, env.occl);
      CHECK(std::is_sorted(next.begin(), next.end()));
      CHECK(std::adjacent_find(next.begin(), next.end()) == next.end());
      for (const auto& p : prev) {
        CHECK(std::find(next.begin(), next.end(), p) != next.end());
      }
      prev = next;
    }
  }
}

TEST_CASE("the bundled runs") {
  const RunOutcome none1 = run(Strategy::kNone, bundled(1), PlanTask::First());
  CHECK(none1.query_count == 0);
  CHECK(none1.feasible_plans.empty());
  CHECK(none1.infeasible_count == 1);

  const RunOutcome pre2 = run(Strategy::kPre, bundled(2), PlanTask::First());
  CHECK(pre2.query_count == 3);
  CHECK(pre2.feasible_plans.size() == 1);
  CHECK(pre2.infeasible_count == 0);

  const RunOutcome repl3 = run(Strategy::kRepl, bundled(3), PlanTask::First());
  CHECK(repl3.query_count == 4);
  REQUIRE(repl3.feasible_plans.size() == 1);
  CHECK(repl3.feasible_plans[0].length() == 4);
  CHECK(repl3.infeasible_count <= 2);

  const RunOutcome none100 = run(Strategy::kNone, bundled(1), PlanTask::Count(100));
  CHECK(none100.feasible_plans.size() + none100.infeasible_count == 100);
}

TEST_CASE("pre plans pass verification and the oracle") {
  for (int n = 1; n <= 3; ++n) {
    Env env(bundled(n));
    const RunOutcome out = run(Strategy::kPre, env.inst, PlanTask::Count(100));
    CHECK(out.feasible_plans.size() == 100);
    const oracle::World world = oracle::from_instance(env.inst, env.view);
    for (const Plan& p : out.feasible_plans) {
      CHECK(env.verify(p).feasible());
      CHECK(oracle::feasible(world, oracle::to_seq(p)));
    }
  }
}

TEST_CASE("a tiny budget times out and keeps partial counts") {
  LoadedInstance inst = bundled(3);
  inst.horizon.maxstep = 6;
  RunOptions options;
  options.task = PlanTask::Count(100);
  options.budget = std::chrono::milliseconds(20);
  const RunOutcome out = run_strategy(Strategy::kFilt, inst, options);
  CHECK(out.timed_out);
  CHECK(out.infeasible_count > 0);
  CHECK(out.feasible_plans.size() < 100);
}

TEST_CASE("all strategies agree on small random instances") {
  std::mt19937_64 rng(43);
  for (int round = 0; round < 60; ++round) {
    const LoadedInstance inst = oracle::random_instance(rng, 3, 3, 2, 2, round % 3 == 0);
    const PlanTask all = PlanTask::Count(1'000'000);
    const RunOutcome none = run(Strategy::kNone, inst, all, true);
    const RunOutcome pre = run(Strategy::kPre, inst, all);
    const RunOutcome filt = run(Strategy::kFilt, inst, all);
    const RunOutcome repl = run(Strategy::kRepl, inst, all, true);
    CHECK(none.query_count == 0);
    CHECK(pre.infeasible_count == 0);
    const auto feasible = oracle::to_seq_set(none.feasible_plans);
    CHECK(oracle::to_seq_set(pre.feasible_plans) == feasible);
    CHECK(oracle::to_seq_set(filt.feasible_plans) == feasible);
    CHECK(oracle::to_seq_set(repl.feasible_plans) == feasible);
    CHECK(repl.query_count <= filt.query_count);
    CHECK(filt.query_count <= pre.query_count);
    CHECK(repl.infeasible_count <= filt.infeasible_count);

    // replanning progress
    std::size_t prev = 0;
    for (const ReplRound& r : repl.repl_rounds) {
      CHECK(r.constraints.size() == prev);
      CHECK(r.constraints_after > prev);
      prev = r.constraints_after;
      State s = bottom_up(inst.scene, inst.task).initial_state();
      const ProhibitionSet in_force(r.constraints, inst.scene.grid);
      for (const MoveAction& a : r.infeasible_plan.steps) {
        CHECK_FALSE(in_force.forbids(s, a));
        s = apply(s, a, inst.config);
      }
    }
  }
}
