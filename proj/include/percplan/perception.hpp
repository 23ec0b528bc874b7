/**
 * perception.hpp
 *
 * Simulated two-phase perception. The bottom-up pass names and localizes
 * objects from a ground-truth scene; the top-down pass reveals shapes one
 * object at a time and counts every distinct object it was asked about.
 */

#ifndef PERCPLAN_PERCEPTION_HPP
#define PERCPLAN_PERCEPTION_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "percplan/geometry.hpp"
#include "percplan/world_model.hpp"

namespace percplan {

struct PhysicalObject {
  std::string label;
  Cell cell;
  Orientation orient = Orientation::kVert;
  ShapeId shape;
  /// Nominal planar position used for data association.
  double fx = 0.0;
  double fy = 0.0;
};

struct CameraSpec {
  /// `depth` or `none`.
  std::string preset = "depth";
  std::vector<std::pair<Cell, Cell>> infront;
};

/// Objects declared on the same cell are stacked in declaration order, the
/// first one resting on the table.
struct SceneTruth {
  Grid grid;
  std::vector<PhysicalObject> objects;
  CameraSpec camera;
};

struct TaskTarget {
  ObjectId name;
  double fx = 0.0;
  double fy = 0.0;
};

struct TaskSpec {
  std::vector<TaskTarget> targets;
  GoalFormula goal;
};

class AssociationFailure : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnknownPreset : public DomainError {
 public:
  using DomainError::DomainError;
};

class QueryLedger {
 public:
  std::size_t count() const { return queried_.size(); }
  const std::set<ObjectId>& queried() const { return queried_; }
  bool contains(const ObjectId& obj) const { return queried_.contains(obj); }

  /// Returns true the first time obj is recorded.
  bool record(const ObjectId& obj) { return queried_.insert(obj).second; }

 private:
  std::set<ObjectId> queried_;
};

/// Swaps each object's perceived orientation with probability `probability`.
struct OrientationNoise {
  double probability = 0.0;
  std::uint64_t seed = 0;
};

/**
 * What perception has revealed so far. Shapes are only reachable through
 * shape_of(), which caches and ledgers each distinct object.
 */
class PerceptView {
 public:
  const State& initial_state() const { return initial_; }
  const Grid& grid() const { return scene_->grid; }

  /// Task or scene name -> index into the scene's physical objects.
  const std::map<ObjectId, std::size_t>& naming() const { return naming_; }
  std::vector<ObjectId> objects() const;
  const std::string& label_of(const ObjectId& obj) const;

  const QueryLedger& ledger() const { return ledger_; }
  const std::map<ObjectId, ShapeId>& known_shapes() const { return shapes_; }
  std::optional<ShapeId> cached_shape(const ObjectId& obj) const;

  /// Throws UnknownObject.
  ShapeId shape_of(const ObjectId& obj);

 private:
  friend PerceptView bottom_up(const SceneTruth&, const TaskSpec&,
                               std::optional<OrientationNoise>);
  friend std::map<ObjectId, ShapeId> ground_truth_shapes(const PerceptView&);

  std::shared_ptr<const SceneTruth> scene_;
  std::map<ObjectId, std::size_t> naming_;
  State initial_;
  std::map<ObjectId, ShapeId> shapes_;
  QueryLedger ledger_;
};

/**
 * Associates each task target, in declaration order, with the nearest
 * unassociated physical object; ties go to the object earlier in row-major
 * (y, then x, then stack height) order. The rest are named sco1, sco2, ... in
 * that same order. Throws AssociationFailure.
 */
PerceptView bottom_up(const SceneTruth& scene, const TaskSpec& task,
                      std::optional<OrientationNoise> noise = std::nullopt);

/// Direct access to the true shapes, bypassing the ledger. Used only for
/// grading plans and for tests.
std::map<ObjectId, ShapeId> ground_truth_shapes(const PerceptView& view);

/// Preset pairs plus explicit `infront` declarations. Throws UnknownPreset.
OcclusionRelation occlusion_of(const SceneTruth& scene);

}  // namespace percplan

#endif  // PERCPLAN_PERCEPTION_HPP
