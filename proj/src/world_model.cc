/**
 * world_model.cc
 */

#include "percplan/world_model.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <utility>

namespace percplan {

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string_view to_string(Orientation orient) {
  switch (orient) {
    case Orientation::kVert:
      return "vert";
    case Orientation::kHorizX:
      return "horiz_x";
    case Orientation::kHorizY:
      return "horiz_y";
  }
  return "?";
}

std::optional<Orientation> parse_orientation(std::string_view text) {
  if (text == "vert") return Orientation::kVert;
  if (text == "horiz_x" || text == "hox") return Orientation::kHorizX;
  if (text == "horiz_y" || text == "hoy") return Orientation::kHorizY;
  return std::nullopt;
}

std::string Cell::name() const {
  return "loc_" + std::to_string(x) + "x" + std::to_string(y);
}

std::optional<Cell> parse_cell_name(std::string_view text) {
  constexpr std::string_view kPrefix = "loc_";
  if (!text.starts_with(kPrefix)) return std::nullopt;
  text.remove_prefix(kPrefix.size());
  const auto sep = text.find('x');
  if (sep == std::string_view::npos) return std::nullopt;
  Cell cell;
  if (!parse_int(text.substr(0, sep), cell.x) ||
      !parse_int(text.substr(sep + 1), cell.y)) {
    return std::nullopt;
  }
  if (cell.x < 0 || cell.y < 0) return std::nullopt;
  return cell;
}

std::string entity_name(const Entity& entity) {
  if (const auto* cell = std::get_if<Cell>(&entity)) return cell->name();
  return std::get<ObjectId>(entity).name;
}

Entity parse_entity(std::string_view text) {
  if (auto cell = parse_cell_name(text)) return *cell;
  return ObjectId{std::string(text)};
}

std::vector<Cell> Grid::cells_by_name() const {
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(width * depth));
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < depth; ++y) cells.push_back({x, y});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.name() < b.name();
  });
  return cells;
}

std::strong_ordering compare_actions(const MoveAction& a, const MoveAction& b) {
  if (auto c = a.obj.name <=> b.obj.name; c != 0) return c;
  if (a.dest != b.dest) {
    if (auto c = entity_name(a.dest) <=> entity_name(b.dest); c != 0) return c;
  }
  return a.orient <=> b.orient;
}

std::string to_string(const MoveAction& action) {
  std::string out = "move(";
  out += action.obj.name;
  out += ',';
  out += entity_name(action.dest);
  out += ',';
  out += to_string(action.orient);
  out += ')';
  return out;
}

std::ostream& operator<<(std::ostream& os, const MoveAction& action) {
  return os << to_string(action);
}

// -----------------------------------------------------------------------------
// State
// -----------------------------------------------------------------------------

State State::FromPlacements(std::vector<Placement> placements,
                            const Grid& grid) {
  std::sort(placements.begin(), placements.end(),
            [](const Placement& a, const Placement& b) { return a.id < b.id; });
  State state;
  state.placements_ = std::move(placements);

  for (std::size_t i = 1; i < state.placements_.size(); ++i) {
    if (state.placements_[i].id == state.placements_[i - 1].id) {
      throw InvalidState("duplicate object " + state.placements_[i].id.name);
    }
  }

  std::set<std::string> supporters;
  for (const Placement& p : state.placements_) {
    if (const auto* cell = std::get_if<Cell>(&p.at)) {
      if (!grid.contains(*cell)) {
        throw InvalidState(p.id.name + " is on " + cell->name() +
                           ", outside the grid");
      }
    } else if (!state.contains(std::get<ObjectId>(p.at))) {
      throw InvalidState(p.id.name + " rests on undeclared object " +
                         entity_name(p.at));
    }
    if (!supporters.insert(entity_name(p.at)).second) {
      throw InvalidState("two objects rest on " + entity_name(p.at));
    }
  }

  // With unique supporters, a chain longer than the object count is a cycle.
  for (const Placement& p : state.placements_) {
    const Entity* e = &p.at;
    std::size_t hops = 0;
    while (const auto* below = std::get_if<ObjectId>(e)) {
      if (*below == p.id || ++hops > state.placements_.size()) {
        throw InvalidState(p.id.name + " is in its own support chain");
      }
      e = &state.placement(*below).at;
    }
  }
  return state;
}

std::vector<ObjectId> State::objects() const {
  std::vector<ObjectId> ids;
  ids.reserve(placements_.size());
  for (const Placement& p : placements_) ids.push_back(p.id);
  return ids;
}

const Placement* State::find(const ObjectId& obj) const {
  auto it = std::lower_bound(
      placements_.begin(), placements_.end(), obj,
      [](const Placement& p, const ObjectId& id) { return p.id < id; });
  if (it == placements_.end() || it->id != obj) return nullptr;
  return &*it;
}

Placement* State::find(const ObjectId& obj) {
  return const_cast<Placement*>(std::as_const(*this).find(obj));
}

const Placement& State::placement(const ObjectId& obj) const {
  const Placement* p = find(obj);
  if (p == nullptr) throw UnknownObject("unknown object " + obj.name);
  return *p;
}

Cell State::base_cell(const ObjectId& obj) const {
  const Entity* e = &placement(obj).at;
  while (const auto* below = std::get_if<ObjectId>(e)) e = &placement(*below).at;
  return std::get<Cell>(*e);
}

const ObjectId* State::occupant(const Entity& support) const {
  for (const Placement& p : placements_) {
    if (p.at == support) return &p.id;
  }
  return nullptr;
}

bool State::is_above(const ObjectId& upper, const ObjectId& lower) const {
  const Entity* e = &placement(upper).at;
  while (const auto* below = std::get_if<ObjectId>(e)) {
    if (*below == lower) return true;
    e = &placement(*below).at;
  }
  return false;
}

std::ostream& operator<<(std::ostream& os, const State& state) {
  os << '{';
  std::string_view sep;
  for (const Placement& p : state.placements()) {
    os << sep << p.id.name << '@' << entity_name(p.at) << ' '
       << to_string(p.ori);
    sep = ", ";
  }
  return os << '}';
}

// -----------------------------------------------------------------------------
// Literals and goals
// -----------------------------------------------------------------------------

FluentLiteral FluentLiteral::At(ObjectId obj, Entity entity) {
  return {Kind::kAt, std::move(obj), std::move(entity), Orientation::kVert};
}

FluentLiteral FluentLiteral::Ori(ObjectId obj, Orientation orient) {
  return {Kind::kOri, std::move(obj), Cell{}, orient};
}

FluentLiteral FluentLiteral::Below(Entity base, ObjectId obj) {
  return {Kind::kBelow, std::move(obj), std::move(base), Orientation::kVert};
}

std::strong_ordering compare_literals(const FluentLiteral& a,
                                      const FluentLiteral& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.obj <=> b.obj; c != 0) return c;
  if (a.kind == FluentLiteral::Kind::kOri) return a.orient <=> b.orient;
  return entity_name(a.entity) <=> entity_name(b.entity);
}

std::string to_string(const FluentLiteral& literal) {
  switch (literal.kind) {
    case FluentLiteral::Kind::kAt:
      return "at(" + literal.obj.name + ")=" + entity_name(literal.entity);
    case FluentLiteral::Kind::kOri:
      return "ori(" + literal.obj.name + ")=" +
             std::string(to_string(literal.orient));
    case FluentLiteral::Kind::kBelow:
      return "below(" + entity_name(literal.entity) + "," + literal.obj.name +
             ")";
  }
  return "?";
}

bool literal_holds(const State& state, const FluentLiteral& literal) {
  switch (literal.kind) {
    case FluentLiteral::Kind::kAt:
      return state.at(literal.obj) == literal.entity;
    case FluentLiteral::Kind::kOri:
      return state.ori(literal.obj) == literal.orient;
    case FluentLiteral::Kind::kBelow:
      return is_below(state, literal.entity, literal.obj);
  }
  return false;
}

bool goal_holds(const State& state, const GoalFormula& goal) {
  return std::all_of(
      goal.literals.begin(), goal.literals.end(),
      [&](const FluentLiteral& lit) { return literal_holds(state, lit); });
}

bool is_below(const State& state, const Entity& base, const ObjectId& obj) {
  if (const auto* base_obj = std::get_if<ObjectId>(&base);
      base_obj != nullptr && !state.contains(*base_obj)) {
    throw UnknownEntity("unknown entity " + base_obj->name);
  }
  const Entity* e = &state.at(obj);
  while (true) {
    if (*e == base) return true;
    const auto* below = std::get_if<ObjectId>(e);
    if (below == nullptr) return false;
    e = &state.at(*below);
  }
}

// -----------------------------------------------------------------------------
// Actions
// -----------------------------------------------------------------------------

namespace {

// Top of the stack above `start`, skipping the moved object and everything it
// carries.
Entity stack_top(const State& state, Entity start, const ObjectId& moved) {
  while (const ObjectId* next = state.occupant(start)) {
    if (*next == moved) break;
    start = *next;
  }
  return start;
}

}  // namespace

Entity normalized_destination(const State& state, const MoveAction& action,
                              const Grid& grid) {
  if (!state.contains(action.obj)) {
    throw UnknownObject("unknown object " + action.obj.name);
  }
  if (const auto* cell = std::get_if<Cell>(&action.dest)) {
    if (!grid.contains(*cell)) {
      throw UnknownEntity(cell->name() + " is outside the grid");
    }
  } else {
    const auto& dest = std::get<ObjectId>(action.dest);
    if (!state.contains(dest)) throw UnknownEntity("unknown entity " + dest.name);
    if (dest == action.obj || state.is_above(dest, action.obj)) {
      throw InadmissibleAction(to_string(action) +
                               ": object cannot be placed on itself");
    }
  }
  return stack_top(state, action.dest, action.obj);
}

namespace {

// Returns the normalized destination when the move passes every built-in
// precondition.
std::optional<Entity> admissible_destination(const State& state,
                                             const MoveAction& action,
                                             const DomainConfig& config) {
  if (config.require_clear && !state.is_clear(action.obj)) return std::nullopt;
  Entity dest;
  try {
    dest = normalized_destination(state, action, config.grid);
  } catch (const InadmissibleAction&) {
    return std::nullopt;
  }
  if (dest == state.at(action.obj)) return std::nullopt;
  return dest;
}

}  // namespace

bool is_admissible(const State& state, const MoveAction& action,
                   const DomainConfig& config) {
  return admissible_destination(state, action, config).has_value();
}

State apply(const State& state, const MoveAction& action,
            const DomainConfig& config) {
  std::optional<Entity> dest = admissible_destination(state, action, config);
  if (!dest) {
    throw InadmissibleAction(to_string(action) + " is not executable in " +
                             [&] {
                               std::ostringstream os;
                               os << state;
                               return os.str();
                             }());
  }
  State next = state;
  Placement* p = next.find(action.obj);
  p->at = std::move(*dest);
  p->ori = action.orient;
  return next;
}

std::vector<MoveAction> enumerate_object_actions(
    const State& state, const ObjectId& obj, const DomainConfig& config,
    const ExternalPreconditions* external) {
  std::vector<MoveAction> actions;
  if (config.require_clear && !state.is_clear(obj)) return actions;
  static thread_local Grid cached_grid{-1, -1};
  static thread_local std::vector<Cell> cached_cells;
  if (!(cached_grid == config.grid)) {
    cached_grid = config.grid;
    cached_cells = config.grid.cells_by_name();
  }
  const Entity& current = state.at(obj);
  for (const Cell& cell : cached_cells) {
    MoveAction action{obj, cell, Orientation::kVert};
    if (stack_top(state, cell, obj) == current) continue;
    for (Orientation orient : kOrientations) {
      action.orient = orient;
      if (external != nullptr && external->forbids(state, action)) continue;
      actions.push_back(action);
    }
  }
  return actions;
}

std::vector<MoveAction> enumerate_actions(const State& state,
                                          const DomainConfig& config,
                                          const ExternalPreconditions* external) {
  std::vector<MoveAction> actions;
  for (const Placement& p : state.placements()) {
    auto more = enumerate_object_actions(state, p.id, config, external);
    actions.insert(actions.end(), std::make_move_iterator(more.begin()),
                   std::make_move_iterator(more.end()));
  }
  return actions;
}

}  // namespace percplan
