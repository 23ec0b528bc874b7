/**
 * geometry.cc
 */

#include "percplan/geometry.hpp"

#include <algorithm>

namespace percplan {

bool StackRule::matches_orientations(Orientation top_o,
                                     Orientation bottom_o) const {
  return (!top_orient || *top_orient == top_o) &&
         (!bottom_orient || *bottom_orient == bottom_o);
}

bool StackRule::matches(const ShapeId& top, Orientation top_o,
                        const ShapeId& bottom, Orientation bottom_o) const {
  return matches_orientations(top_o, bottom_o) &&
         (!top_shape || *top_shape == top) &&
         (!bottom_shape || *bottom_shape == bottom);
}

void ShapeCatalog::require(const ShapeId& shape) const {
  if (!declares(shape)) throw UnknownShape("unknown shape " + shape.name);
}

void ShapeCatalog::add_shape(ShapeId shape) { shapes_.insert(std::move(shape)); }

void ShapeCatalog::add_unstable(StackRule rule) {
  if (!rule.top_shape && !rule.top_orient && !rule.bottom_shape &&
      !rule.bottom_orient) {
    throw DomainError("unstable rule needs at least one non-wildcard field");
  }
  if (rule.top_shape) require(*rule.top_shape);
  if (rule.bottom_shape) require(*rule.bottom_shape);
  if (std::find(unstable_.begin(), unstable_.end(), rule) == unstable_.end()) {
    unstable_.push_back(std::move(rule));
  }
}

void ShapeCatalog::add_blocker(BlockerRule rule) {
  require(rule.shape);
  if (std::find(blockers_.begin(), blockers_.end(), rule) == blockers_.end()) {
    blockers_.push_back(std::move(rule));
  }
}

ShapeCatalog ShapeCatalog::Default() {
  const ShapeId bolt{"bolt_m20_100"};
  const ShapeId nut{"nut_m20"};
  const ShapeId profile{"aluprofil_f20_100_gray"};

  ShapeCatalog catalog;
  catalog.add_shape(bolt);
  catalog.add_shape(nut);
  catalog.add_shape(profile);
  catalog.add_blocker({bolt, Orientation::kVert});
  catalog.add_unstable({bolt, Orientation::kHorizX, profile, std::nullopt});
  catalog.add_unstable({bolt, Orientation::kHorizY, profile, std::nullopt});
  catalog.add_unstable({std::nullopt, std::nullopt, bolt, std::nullopt});
  catalog.add_unstable({profile, std::nullopt, nut, std::nullopt});
  return catalog;
}

OcclusionRelation OcclusionRelation::DepthPreset(const Grid& grid) {
  OcclusionRelation occl(grid);
  for (int x = 0; x < grid.width; ++x) {
    for (int y = 0; y < grid.depth; ++y) {
      for (int behind = y + 1; behind < grid.depth; ++behind) {
        occl.pairs_.insert({Cell{x, y}, Cell{x, behind}});
      }
    }
  }
  return occl;
}

void OcclusionRelation::add(const Cell& front, const Cell& behind) {
  for (const Cell& cell : {front, behind}) {
    if (!grid_.contains(cell)) {
      throw CellOutOfRange(cell.name() + " is outside the grid");
    }
  }
  if (front == behind) {
    throw DomainError("a cell cannot be in front of itself: " + front.name());
  }
  pairs_.insert({front, behind});
}

std::string to_string(const CheckQuery& query) {
  if (const auto* stack = std::get_if<StackQuery>(&query)) {
    return "stack(" + stack->top.name + "," +
           std::string(to_string(stack->top_orient)) + "," + stack->bottom.name +
           "," + std::string(to_string(stack->bottom_orient)) + ")";
  }
  const auto& reach = std::get<ReachQuery>(query);
  return std::string(reach.phase == ReachQuery::Phase::kPick ? "reach_pick("
                                                             : "reach_place(") +
         reach.blocker.name + "," + reach.blocker_cell.name() + "," +
         std::string(to_string(reach.blocker_orient)) + "," + reach.target.name +
         "," + reach.target_cell.name() + "," +
         std::string(to_string(reach.target_orient)) + ")";
}

bool unstackable(const ShapeCatalog& catalog, const ShapeId& top,
                 Orientation top_o, const ShapeId& bottom,
                 Orientation bottom_o) {
  if (!catalog.declares(top)) throw UnknownShape("unknown shape " + top.name);
  if (!catalog.declares(bottom)) {
    throw UnknownShape("unknown shape " + bottom.name);
  }
  return std::any_of(catalog.unstable_rules().begin(),
                     catalog.unstable_rules().end(), [&](const StackRule& r) {
                       return r.matches(top, top_o, bottom, bottom_o);
                     });
}

bool reach_blocked(const ShapeCatalog& catalog, const OcclusionRelation& occl,
                   const ShapeId& blocker_shape, const Cell& blocker_cell,
                   Orientation blocker_o, const Cell& target_cell) {
  if (!catalog.declares(blocker_shape)) {
    throw UnknownShape("unknown shape " + blocker_shape.name);
  }
  for (const Cell& cell : {blocker_cell, target_cell}) {
    if (!occl.grid().contains(cell)) {
      throw CellOutOfRange(cell.name() + " is outside the grid");
    }
  }
  if (!occl.in_front(blocker_cell, target_cell)) return false;
  return std::any_of(catalog.blocker_rules().begin(),
                     catalog.blocker_rules().end(), [&](const BlockerRule& r) {
                       return r.shape == blocker_shape && r.orient == blocker_o;
                     });
}

namespace {

void add_reach_queries(const State& state, const ObjectId& moved,
                       const Cell& target_cell, Orientation target_orient,
                       ReachQuery::Phase phase, const OcclusionRelation& occl,
                       std::vector<CheckQuery>& out) {
  for (const Placement& p : state.placements()) {
    if (p.id == moved || state.is_above(p.id, moved)) continue;
    const Cell cell = state.base_cell(p.id);
    if (!occl.in_front(cell, target_cell)) continue;
    out.emplace_back(ReachQuery{phase, p.id, cell, p.ori, moved, target_cell,
                                target_orient});
  }
}

}  // namespace

std::vector<CheckQuery> collect_checks(const State& state,
                                       const MoveAction& action,
                                       const OcclusionRelation& occl) {
  const Entity dest = normalized_destination(state, action, occl.grid());
  std::vector<CheckQuery> checks;
  if (const auto* bottom = std::get_if<ObjectId>(&dest)) {
    checks.emplace_back(
        StackQuery{action.obj, action.orient, *bottom, state.ori(*bottom)});
  }
  const Placement& moved = state.placement(action.obj);
  add_reach_queries(state, action.obj, state.base_cell(action.obj), moved.ori,
                    ReachQuery::Phase::kPick, occl, checks);
  const Cell dest_cell = is_cell(dest) ? std::get<Cell>(dest)
                                       : state.base_cell(std::get<ObjectId>(dest));
  add_reach_queries(state, action.obj, dest_cell, action.orient,
                    ReachQuery::Phase::kPlace, occl, checks);
  return checks;
}

bool evaluate_check(const CheckQuery& query, const ShapeCatalog& catalog,
                    const OcclusionRelation& occl, const ShapeLookup& shape_of) {
  if (const auto* stack = std::get_if<StackQuery>(&query)) {
    const bool candidate = std::any_of(
        catalog.unstable_rules().begin(), catalog.unstable_rules().end(),
        [&](const StackRule& r) {
          return r.matches_orientations(stack->top_orient,
                                        stack->bottom_orient);
        });
    if (!candidate) return false;
    const ShapeId top = shape_of(stack->top);
    const ShapeId bottom = shape_of(stack->bottom);
    return unstackable(catalog, top, stack->top_orient, bottom,
                       stack->bottom_orient);
  }
  const auto& reach = std::get<ReachQuery>(query);
  if (!occl.in_front(reach.blocker_cell, reach.target_cell)) return false;
  const bool candidate = std::any_of(
      catalog.blocker_rules().begin(), catalog.blocker_rules().end(),
      [&](const BlockerRule& r) { return r.orient == reach.blocker_orient; });
  if (!candidate) return false;
  return reach_blocked(catalog, occl, shape_of(reach.blocker),
                       reach.blocker_cell, reach.blocker_orient,
                       reach.target_cell);
}

}  // namespace percplan
