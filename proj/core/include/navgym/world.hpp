#pragma once

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "navgym/geometry.hpp"

namespace navgym {

struct SegmentShape {
  Vec2 p1, p2;
};
struct CircleShape {
  Vec2 center;
  double radius = 0.0;
};
struct RectShape {
  AABB box;
};

// 2.5D obstacle: a planar shape extruded up to `height` meters.
struct ObstaclePrimitive {
  std::variant<SegmentShape, CircleShape, RectShape> shape;
  double height = 1.0;
};

// Robot collision shape, inflated by collision_tolerance when testing.
struct Footprint {
  enum class Shape { kCircle, kRectangle };
  Shape shape = Shape::kCircle;
  double radius = 0.2;          // circle
  double length = 0.4;          // rectangle, along heading
  double width = 0.3;           // rectangle, across heading
  double collision_tolerance = 0.0;

  // Radius of the smallest circle containing the footprint.
  double bounding_radius() const;
};

struct NamedRegion {
  std::string name;
  AABB box;
};

class WorldError : public std::runtime_error {
 public:
  explicit WorldError(const std::string& msg) : std::runtime_error(msg) {}
};

// Static world: enclosing bounds (solid walls), obstacles, spawn/goal
// regions. Immutable after construction; queries are reentrant.
struct World {
  AABB bounds;
  std::vector<ObstaclePrimitive> obstacles;
  std::vector<NamedRegion> spawn_regions;
  std::vector<NamedRegion> goal_regions;

  void validate() const;  // throws WorldError on any invariant violation

  const NamedRegion* find_spawn(const std::string& name) const;
  const NamedRegion* find_goal(const std::string& name) const;
};

// Parses and validates a world file (YAML mapping, see docs/world_schema.md).
World load_world(const std::string& path);
World parse_world(const std::string& yaml_text);

// Euclidean distance from p to the nearest obstacle boundary; bounds
// walls count as obstacles; 0 if p is inside or on an obstacle.
double distance_to_nearest_obstacle(const World& w, const Vec2& p);

// True iff the footprint (inflated by its collision_tolerance) placed at
// pose touches any obstacle or the bounds boundary.
bool check_collision(const World& w, const Pose2D& pose, const Footprint& f);

// Uniformly samples a collision-free pose inside the named spawn/goal
// region by rejection; throws WorldError after max_attempts rejections.
Pose2D sample_free_pose(const World& w, const NamedRegion& region,
                        const Footprint& f, std::mt19937_64& rng,
                        int max_attempts = 1000);

}  // namespace navgym
