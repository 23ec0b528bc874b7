/**
 * geometry.hpp
 *
 * Stack stability and reach blocking as rule-table lookups over shapes,
 * orientations and the camera's occlusion relation.
 */

#ifndef PERCPLAN_GEOMETRY_HPP
#define PERCPLAN_GEOMETRY_HPP

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "percplan/world_model.hpp"

namespace percplan {

struct ShapeId {
  std::string name;

  auto operator<=>(const ShapeId&) const = default;
};

class UnknownShape : public DomainError {
 public:
  using DomainError::DomainError;
};

class CellOutOfRange : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Unset fields are wildcards.
struct StackRule {
  std::optional<ShapeId> top_shape;
  std::optional<Orientation> top_orient;
  std::optional<ShapeId> bottom_shape;
  std::optional<Orientation> bottom_orient;

  bool matches(const ShapeId& top, Orientation top_o, const ShapeId& bottom,
               Orientation bottom_o) const;
  bool matches_orientations(Orientation top_o, Orientation bottom_o) const;

  bool operator==(const StackRule&) const = default;
};

struct BlockerRule {
  ShapeId shape;
  Orientation orient = Orientation::kVert;

  bool operator==(const BlockerRule&) const = default;
};

/**
 * Known shapes plus the unstable-stack and reach-blocker rules. A stack is
 * stable unless some rule says otherwise.
 */
class ShapeCatalog {
 public:
  void add_shape(ShapeId shape);
  /// Throws UnknownShape for undeclared shapes and DomainError for a rule
  /// that is all wildcards.
  void add_unstable(StackRule rule);
  void add_blocker(BlockerRule rule);

  bool declares(const ShapeId& shape) const { return shapes_.contains(shape); }
  const std::set<ShapeId>& shapes() const { return shapes_; }
  const std::vector<StackRule>& unstable_rules() const { return unstable_; }
  const std::vector<BlockerRule>& blocker_rules() const { return blockers_; }

  /// Catalog with bolts, nuts and aluminium profiles.
  static ShapeCatalog Default();

 private:
  void require(const ShapeId& shape) const;

  std::set<ShapeId> shapes_;
  std::vector<StackRule> unstable_;
  std::vector<BlockerRule> blockers_;
};

/// Ordered (front, behind) cell pairs. Irreflexive.
class OcclusionRelation {
 public:
  OcclusionRelation() = default;
  explicit OcclusionRelation(Grid grid) : grid_(grid) {}

  /// Each cell occludes every cell deeper in the same column.
  static OcclusionRelation DepthPreset(const Grid& grid);

  /// Throws CellOutOfRange, or DomainError when front == behind.
  void add(const Cell& front, const Cell& behind);

  bool in_front(const Cell& front, const Cell& behind) const {
    return pairs_.contains({front, behind});
  }

  const Grid& grid() const { return grid_; }
  const std::set<std::pair<Cell, Cell>>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }

  bool operator==(const OcclusionRelation&) const = default;

 private:
  Grid grid_;
  std::set<std::pair<Cell, Cell>> pairs_;
};

/// Does putting `top` at `top_orient` on `bottom` at `bottom_orient` make an
/// unstable stack?
struct StackQuery {
  ObjectId top;
  Orientation top_orient = Orientation::kVert;
  ObjectId bottom;
  Orientation bottom_orient = Orientation::kVert;

  auto operator<=>(const StackQuery&) const = default;
};

/// Does `blocker` block the reach into `target_cell`? `target` is the object
/// being picked (kPick) or placed (kPlace).
struct ReachQuery {
  enum class Phase : std::uint8_t { kPick, kPlace };

  Phase phase = Phase::kPick;
  ObjectId blocker;
  Cell blocker_cell;
  Orientation blocker_orient = Orientation::kVert;
  ObjectId target;
  Cell target_cell;
  Orientation target_orient = Orientation::kVert;

  auto operator<=>(const ReachQuery&) const = default;
};

using CheckQuery = std::variant<StackQuery, ReachQuery>;

std::string to_string(const CheckQuery& query);

/// Throws UnknownShape.
bool unstackable(const ShapeCatalog& catalog, const ShapeId& top,
                 Orientation top_o, const ShapeId& bottom,
                 Orientation bottom_o);

/// Independent of the target's shape and orientation. Throws UnknownShape and
/// CellOutOfRange.
bool reach_blocked(const ShapeCatalog& catalog, const OcclusionRelation& occl,
                   const ShapeId& blocker_shape, const Cell& blocker_cell,
                   Orientation blocker_o, const Cell& target_cell);

/**
 * Queries that decide whether `action` is physically feasible in `state`:
 * a stack query when it lands on an object, and one reach query for every
 * object standing in front of the pick cell or of the place cell. The moved
 * object and anything it carries are never their own blockers.
 */
std::vector<CheckQuery> collect_checks(const State& state,
                                       const MoveAction& action,
                                       const OcclusionRelation& occl);

/// Shape source used while evaluating queries; may have side effects such as
/// perception requests.
using ShapeLookup = std::function<ShapeId(const ObjectId&)>;

/**
 * Evaluates a query, asking `shape_of` only for shapes that can change the
 * answer. A query whose orientations match no rule is false without any
 * lookups; otherwise a stack query fetches both shapes and a reach query the
 * blocker's shape.
 */
bool evaluate_check(const CheckQuery& query, const ShapeCatalog& catalog,
                    const OcclusionRelation& occl, const ShapeLookup& shape_of);

}  // namespace percplan

#endif  // PERCPLAN_GEOMETRY_HPP
