/**
 * perception.cc
 */

#include "percplan/perception.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace percplan {

std::vector<ObjectId> PerceptView::objects() const {
  std::vector<ObjectId> ids;
  ids.reserve(naming_.size());
  for (const auto& [id, index] : naming_) ids.push_back(id);
  return ids;
}

const std::string& PerceptView::label_of(const ObjectId& obj) const {
  auto it = naming_.find(obj);
  if (it == naming_.end()) throw UnknownObject("unknown object " + obj.name);
  return scene_->objects[it->second].label;
}

std::optional<ShapeId> PerceptView::cached_shape(const ObjectId& obj) const {
  auto it = shapes_.find(obj);
  if (it == shapes_.end()) return std::nullopt;
  return it->second;
}

ShapeId PerceptView::shape_of(const ObjectId& obj) {
  if (auto it = shapes_.find(obj); it != shapes_.end()) return it->second;
  auto named = naming_.find(obj);
  if (named == naming_.end()) throw UnknownObject("unknown object " + obj.name);
  ledger_.record(obj);
  return shapes_.emplace(obj, scene_->objects[named->second].shape)
      .first->second;
}

namespace {

// Physical object indices sorted by (y, x, stack height).
std::vector<std::size_t> row_major_order(const SceneTruth& scene) {
  std::vector<std::size_t> order(scene.objects.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Cell& ca = scene.objects[a].cell;
    const Cell& cb = scene.objects[b].cell;
    return std::pair(ca.y, ca.x) < std::pair(cb.y, cb.x);
  });
  return order;
}

}  // namespace

PerceptView bottom_up(const SceneTruth& scene, const TaskSpec& task,
                      std::optional<OrientationNoise> noise) {
  if (scene.objects.size() < task.targets.size()) {
    throw AssociationFailure(
        "scene has " + std::to_string(scene.objects.size()) +
        " objects but the task names " + std::to_string(task.targets.size()));
  }
  PerceptView view;
  view.scene_ = std::make_shared<const SceneTruth>(scene);

  const std::vector<std::size_t> order = row_major_order(scene);
  std::vector<bool> taken(scene.objects.size(), false);

  for (const TaskTarget& target : task.targets) {
    std::optional<std::size_t> best;
    double best_dist = 0.0;
    for (std::size_t index : order) {
      if (taken[index]) continue;
      const double dx = scene.objects[index].fx - target.fx;
      const double dy = scene.objects[index].fy - target.fy;
      const double dist = dx * dx + dy * dy;
      if (!best || dist < best_dist) {
        best = index;
        best_dist = dist;
      }
    }
    taken[*best] = true;
    if (!view.naming_.emplace(target.name, *best).second) {
      throw AssociationFailure("target " + target.name.name +
                               " is declared twice");
    }
  }

  std::size_t next_scene_name = 1;
  for (std::size_t index : order) {
    if (taken[index]) continue;
    ObjectId name{"sco" + std::to_string(next_scene_name++)};
    if (!view.naming_.emplace(name, index).second) {
      throw AssociationFailure("generated name " + name.name +
                               " collides with a task target");
    }
  }

  std::vector<ObjectId> name_of(scene.objects.size());
  for (const auto& [id, index] : view.naming_) name_of[index] = id;

  std::optional<std::mt19937_64> rng;
  if (noise && noise->probability > 0.0) rng.emplace(noise->seed);

  // Objects sharing a cell stack in declaration order.
  std::map<Cell, ObjectId> stack_top;
  std::vector<Placement> placements;
  placements.reserve(scene.objects.size());
  for (std::size_t index = 0; index < scene.objects.size(); ++index) {
    const PhysicalObject& obj = scene.objects[index];
    Orientation orient = obj.orient;
    if (rng) {
      std::bernoulli_distribution flip(noise->probability);
      if (flip(*rng)) {
        std::uniform_int_distribution<int> shift(1, 2);
        orient = static_cast<Orientation>(
            (static_cast<int>(orient) + shift(*rng)) % 3);
      }
    }
    Entity at = obj.cell;
    if (auto it = stack_top.find(obj.cell); it != stack_top.end()) {
      at = it->second;
    }
    stack_top[obj.cell] = name_of[index];
    placements.push_back({name_of[index], at, orient});
  }
  view.initial_ = State::FromPlacements(std::move(placements), scene.grid);
  return view;
}

std::map<ObjectId, ShapeId> ground_truth_shapes(const PerceptView& view) {
  std::map<ObjectId, ShapeId> shapes;
  for (const auto& [id, index] : view.naming_) {
    shapes.emplace(id, view.scene_->objects[index].shape);
  }
  return shapes;
}

OcclusionRelation occlusion_of(const SceneTruth& scene) {
  OcclusionRelation occl;
  if (scene.camera.preset == "depth") {
    occl = OcclusionRelation::DepthPreset(scene.grid);
  } else if (scene.camera.preset == "none") {
    occl = OcclusionRelation(scene.grid);
  } else {
    throw UnknownPreset("unknown camera preset " + scene.camera.preset);
  }
  for (const auto& [front, behind] : scene.camera.infront) {
    occl.add(front, behind);
  }
  return occl;
}

}  // namespace percplan
