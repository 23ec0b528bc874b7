/**
 * world_model.hpp
 *
 * Tabletop manipulation state space: grid cells, objects stacked on cells or
 * on each other, the three object orientations, and the move action.
 */

#ifndef PERCPLAN_WORLD_MODEL_HPP
#define PERCPLAN_WORLD_MODEL_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace percplan {

enum class Orientation : std::uint8_t { kVert = 0, kHorizX = 1, kHorizY = 2 };

/// All orientations in enumeration order.
inline constexpr std::array<Orientation, 3> kOrientations{
    Orientation::kVert, Orientation::kHorizX, Orientation::kHorizY};

std::string_view to_string(Orientation orient);

/// Accepts `vert`, `horiz_x`, `horiz_y` and the short forms `hox`, `hoy`.
std::optional<Orientation> parse_orientation(std::string_view text);

struct Cell {
  int x = 0;  // lateral
  int y = 0;  // depth

  auto operator<=>(const Cell&) const = default;

  /// `loc_<x>x<y>`
  std::string name() const;
};

std::optional<Cell> parse_cell_name(std::string_view text);

struct ObjectId {
  std::string name;

  auto operator<=>(const ObjectId&) const = default;
};

/// Destination of a move and range of the location fluent.
using Entity = std::variant<Cell, ObjectId>;

std::string entity_name(const Entity& entity);

/// Names starting with `loc_` parse as cells, everything else as objects.
Entity parse_entity(std::string_view text);

inline bool is_cell(const Entity& e) { return std::holds_alternative<Cell>(e); }

struct Grid {
  int width = 5;
  int depth = 3;

  bool contains(const Cell& cell) const {
    return cell.x >= 0 && cell.x < width && cell.y >= 0 && cell.y < depth;
  }

  /// Every cell, sorted by textual name.
  std::vector<Cell> cells_by_name() const;

  bool operator==(const Grid&) const = default;
};

struct DomainConfig {
  Grid grid;
  /// Only objects with nothing on top of them may be moved.
  bool require_clear = true;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownObject : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnknownEntity : public DomainError {
 public:
  using DomainError::DomainError;
};

class InadmissibleAction : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidState : public DomainError {
 public:
  using DomainError::DomainError;
};

struct Placement {
  ObjectId id;
  Entity at;
  Orientation ori = Orientation::kVert;

  bool operator==(const Placement&) const = default;
};

struct MoveAction {
  ObjectId obj;
  Entity dest;
  Orientation orient = Orientation::kVert;

  bool operator==(const MoveAction&) const = default;
};

/// Canonical order: object name, destination name, orientation.
std::strong_ordering compare_actions(const MoveAction& a, const MoveAction& b);

std::string to_string(const MoveAction& action);
std::ostream& operator<<(std::ostream& os, const MoveAction& action);

/**
 * Immutable snapshot of the location and orientation fluents.
 *
 * Placements are kept sorted by object name. Construction validates that no
 * two objects share a supporter, that support chains are acyclic, and that
 * each chain ends on a cell inside the grid.
 */
class State {
 public:
  State() = default;

  static State FromPlacements(std::vector<Placement> placements,
                              const Grid& grid);

  const std::vector<Placement>& placements() const { return placements_; }
  std::size_t size() const { return placements_.size(); }
  std::vector<ObjectId> objects() const;

  bool contains(const ObjectId& obj) const { return find(obj) != nullptr; }

  /// Throws UnknownObject.
  const Placement& placement(const ObjectId& obj) const;
  const Entity& at(const ObjectId& obj) const { return placement(obj).at; }
  Orientation ori(const ObjectId& obj) const { return placement(obj).ori; }

  /// Cell at the bottom of the stack holding obj.
  Cell base_cell(const ObjectId& obj) const;

  /// Object resting directly on the entity, if any.
  const ObjectId* occupant(const Entity& support) const;

  bool is_clear(const ObjectId& obj) const { return occupant(obj) == nullptr; }

  /// True if `upper` sits somewhere above `lower` in the same stack.
  bool is_above(const ObjectId& upper, const ObjectId& lower) const;

  bool operator==(const State&) const = default;

 private:
  friend State apply(const State&, const MoveAction&, const DomainConfig&);

  const Placement* find(const ObjectId& obj) const;
  Placement* find(const ObjectId& obj);

  std::vector<Placement> placements_;
};

std::ostream& operator<<(std::ostream& os, const State& state);

/// One literal of a goal or of a prohibition's condition.
struct FluentLiteral {
  enum class Kind : std::uint8_t { kAt, kOri, kBelow };

  Kind kind = Kind::kAt;
  ObjectId obj;
  Entity entity;  // kAt: supporter; kBelow: base
  Orientation orient = Orientation::kVert;  // kOri only

  static FluentLiteral At(ObjectId obj, Entity entity);
  static FluentLiteral Ori(ObjectId obj, Orientation orient);
  static FluentLiteral Below(Entity base, ObjectId obj);

  bool operator==(const FluentLiteral&) const = default;
};

std::strong_ordering compare_literals(const FluentLiteral& a,
                                      const FluentLiteral& b);
std::string to_string(const FluentLiteral& literal);

bool literal_holds(const State& state, const FluentLiteral& literal);

/// Conjunction of literals.
struct GoalFormula {
  std::vector<FluentLiteral> literals;

  bool operator==(const GoalFormula&) const = default;
};

/**
 * Extra action filters layered on top of the built-in preconditions. The
 * precomputed perception checks and learned prohibitions plug in here.
 */
class ExternalPreconditions {
 public:
  virtual ~ExternalPreconditions() = default;
  virtual bool forbids(const State& state, const MoveAction& action) const = 0;
};

/**
 * Where the object actually lands: a cell destination resolves to the top of
 * the stack rooted at that cell, an object destination to the top of the
 * stack above that object. The moved object and anything it carries are
 * ignored. Throws UnknownObject / UnknownEntity / InadmissibleAction (when
 * the destination is the object itself or something it carries).
 */
Entity normalized_destination(const State& state, const MoveAction& action,
                              const Grid& grid);

/// Built-in preconditions only.
bool is_admissible(const State& state, const MoveAction& action,
                   const DomainConfig& config);

State apply(const State& state, const MoveAction& action,
            const DomainConfig& config);

/// Admissible moves of one object in canonical order.
std::vector<MoveAction> enumerate_object_actions(
    const State& state, const ObjectId& obj, const DomainConfig& config,
    const ExternalPreconditions* external = nullptr);

/// Every admissible move in canonical order. Only cell destinations are
/// generated.
std::vector<MoveAction> enumerate_actions(
    const State& state, const DomainConfig& config,
    const ExternalPreconditions* external = nullptr);

/// Transitive support: following `at` links down from obj reaches base.
bool is_below(const State& state, const Entity& base, const ObjectId& obj);

bool goal_holds(const State& state, const GoalFormula& goal);

}  // namespace percplan

#endif  // PERCPLAN_WORLD_MODEL_HPP
