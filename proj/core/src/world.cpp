#include "navgym/world.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace navgym {
namespace {

ConvexPolygon footprint_polygon(const Footprint& f, const Pose2D& pose) {
  const double hl = f.length * 0.5, hw = f.width * 0.5;
  const Vec2 local[4] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  ConvexPolygon poly;
  poly.reserve(4);
  for (const Vec2& v : local)
    poly.push_back(pose.position() + v.rotated(pose.theta));
  return poly;  // CCW
}

ConvexPolygon aabb_polygon(const AABB& b) {
  return {{b.min.x, b.min.y}, {b.max.x, b.min.y},
          {b.max.x, b.max.y}, {b.min.x, b.max.y}};
}

double point_polygon_distance(const Vec2& p, const ConvexPolygon& poly) {
  if (point_in_convex_polygon(p, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

double obstacle_boundary_distance(const ObstaclePrimitive& ob, const Vec2& p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SegmentShape>) {
          return point_segment_distance(p, s.p1, s.p2);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          return std::max((p - s.center).norm() - s.radius, 0.0);
        } else {
          return point_aabb_distance(p, s.box);
        }
      },
      ob.shape);
}

double bounds_wall_distance(const AABB& b, const Vec2& p) {
  const Vec2 c[4] = {{b.min.x, b.min.y}, {b.max.x, b.min.y},
                     {b.max.x, b.max.y}, {b.min.x, b.max.y}};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    best = std::min(best, point_segment_distance(p, c[i], c[(i + 1) % 4]));
  return best;
}

// Distance from an obstacle to the oriented footprint polygon; 0 on overlap.
double obstacle_polygon_distance(const ObstaclePrimitive& ob,
                                 const ConvexPolygon& poly) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SegmentShape>) {
          return segment_polygon_distance(s.p1, s.p2, poly);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          return std::max(point_polygon_distance(s.center, poly) - s.radius,
                          0.0);
        } else {
          return convex_polygon_distance(aabb_polygon(s.box), poly);
        }
      },
      ob.shape);
}

bool obstacle_within_bounds(const ObstaclePrimitive& ob, const AABB& b) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SegmentShape>) {
          return b.contains(s.p1) && b.contains(s.p2);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          return s.center.x - s.radius >= b.min.x &&
                 s.center.x + s.radius <= b.max.x &&
                 s.center.y - s.radius >= b.min.y &&
                 s.center.y + s.radius <= b.max.y;
        } else {
          return b.contains(s.box.min) && b.contains(s.box.max);
        }
      },
      ob.shape);
}

}  // namespace

double Footprint::bounding_radius() const {
  if (shape == Shape::kCircle) return radius;
  return 0.5 * std::hypot(length, width);
}

void World::validate() const {
  if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y))
    throw WorldError("bounds: min must be componentwise less than max");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto& ob = obstacles[i];
    const std::string ctx = "obstacles[" + std::to_string(i) + "]";
    if (ob.height <= 0.0) throw WorldError(ctx + ".height must be > 0");
    if (const auto* c = std::get_if<CircleShape>(&ob.shape)) {
      if (c->radius <= 0.0) throw WorldError(ctx + ".radius must be > 0");
    } else if (const auto* r = std::get_if<RectShape>(&ob.shape)) {
      if (!(r->box.min.x < r->box.max.x && r->box.min.y < r->box.max.y))
        throw WorldError(ctx + ": rect min must be less than max");
    }
    if (!obstacle_within_bounds(ob, bounds))
      throw WorldError(ctx + ": obstacle extends outside bounds");
  }
  if (spawn_regions.empty())
    throw WorldError("spawn_regions: at least one region required");
  if (goal_regions.empty())
    throw WorldError("goal_regions: at least one region required");
  auto check_region = [&](const NamedRegion& r, const std::string& kind) {
    const std::string ctx = kind + " region '" + r.name + "'";
    if (!(r.box.min.x < r.box.max.x && r.box.min.y < r.box.max.y))
      throw WorldError(ctx + ": min must be less than max");
    if (!bounds.contains(r.box.min) || !bounds.contains(r.box.max))
      throw WorldError(ctx + ": region extends outside bounds");
  };
  for (const auto& r : spawn_regions) check_region(r, "spawn");
  for (const auto& r : goal_regions) check_region(r, "goal");
}

const NamedRegion* World::find_spawn(const std::string& name) const {
  for (const auto& r : spawn_regions)
    if (r.name == name) return &r;
  return nullptr;
}

const NamedRegion* World::find_goal(const std::string& name) const {
  for (const auto& r : goal_regions)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

void reject_unknown_keys(const YAML::Node& node,
                         const std::vector<std::string>& allowed,
                         const std::string& ctx) {
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw WorldError(ctx + ": unknown key '" + key + "'");
  }
}

Vec2 parse_vec2(const YAML::Node& n, const std::string& ctx) {
  if (!n || !n.IsSequence() || n.size() != 2)
    throw WorldError(ctx + ": expected [x, y]");
  return {n[0].as<double>(), n[1].as<double>()};
}

AABB parse_box(const YAML::Node& n, const std::string& ctx) {
  if (!n || !n.IsMap()) throw WorldError(ctx + ": expected {min, max}");
  reject_unknown_keys(n, {"min", "max"}, ctx);
  return {parse_vec2(n["min"], ctx + ".min"), parse_vec2(n["max"], ctx + ".max")};
}

ObstaclePrimitive parse_obstacle(const YAML::Node& n, const std::string& ctx) {
  if (!n.IsMap()) throw WorldError(ctx + ": expected a mapping");
  const std::string type = n["type"] ? n["type"].as<std::string>() : "";
  ObstaclePrimitive ob;
  ob.height = n["height"] ? n["height"].as<double>() : 1.0;
  if (type == "circle") {
    reject_unknown_keys(n, {"type", "center", "radius", "height"}, ctx);
    ob.shape = CircleShape{parse_vec2(n["center"], ctx + ".center"),
                           n["radius"] ? n["radius"].as<double>() : 0.0};
  } else if (type == "segment") {
    reject_unknown_keys(n, {"type", "p1", "p2", "height"}, ctx);
    ob.shape = SegmentShape{parse_vec2(n["p1"], ctx + ".p1"),
                            parse_vec2(n["p2"], ctx + ".p2")};
  } else if (type == "rect") {
    reject_unknown_keys(n, {"type", "min", "max", "height"}, ctx);
    ob.shape = RectShape{{parse_vec2(n["min"], ctx + ".min"),
                          parse_vec2(n["max"], ctx + ".max")}};
  } else {
    throw WorldError(ctx + ".type: expected circle, segment, or rect");
  }
  return ob;
}

std::vector<NamedRegion> parse_regions(const YAML::Node& n,
                                       const std::string& ctx) {
  std::vector<NamedRegion> out;
  if (!n) return out;
  if (!n.IsSequence()) throw WorldError(ctx + ": expected a list");
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string rctx = ctx + "[" + std::to_string(i) + "]";
    const YAML::Node& e = n[i];
    if (!e.IsMap()) throw WorldError(rctx + ": expected a mapping");
    reject_unknown_keys(e, {"name", "min", "max"}, rctx);
    NamedRegion r;
    r.name = e["name"] ? e["name"].as<std::string>() : "region" + std::to_string(i);
    r.box = {parse_vec2(e["min"], rctx + ".min"),
             parse_vec2(e["max"], rctx + ".max")};
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

World parse_world(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw WorldError(std::string("world file parse error: ") + e.what());
  }
  if (!root.IsMap()) throw WorldError("world file: expected a top-level mapping");
  reject_unknown_keys(root,
                      {"bounds", "obstacles", "spawn_regions", "goal_regions"},
                      "world");
  World w;
  w.bounds = parse_box(root["bounds"], "bounds");
  if (const YAML::Node& obs = root["obstacles"]) {
    if (!obs.IsSequence()) throw WorldError("obstacles: expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i)
      w.obstacles.push_back(
          parse_obstacle(obs[i], "obstacles[" + std::to_string(i) + "]"));
  }
  w.spawn_regions = parse_regions(root["spawn_regions"], "spawn_regions");
  w.goal_regions = parse_regions(root["goal_regions"], "goal_regions");
  w.validate();
  return w;
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw WorldError("cannot open world file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_world(ss.str());
}

double distance_to_nearest_obstacle(const World& w, const Vec2& p) {
  double best = bounds_wall_distance(w.bounds, p);
  for (const auto& ob : w.obstacles)
    best = std::min(best, obstacle_boundary_distance(ob, p));
  return best;
}

bool check_collision(const World& w, const Pose2D& pose, const Footprint& f) {
  const double tol = f.collision_tolerance;
  if (f.shape == Footprint::Shape::kCircle) {
    if (!w.bounds.contains(pose.position())) return true;
    const double r = f.radius + tol;
    return distance_to_nearest_obstacle(w, pose.position()) <= r;
  }
  const ConvexPolygon poly = footprint_polygon(f, pose);
  for (const Vec2& corner : poly) {
    if (!w.bounds.contains(corner)) return true;
    if (bounds_wall_distance(w.bounds, corner) <= tol) return true;
  }
  for (const auto& ob : w.obstacles)
    if (obstacle_polygon_distance(ob, poly) <= tol) return true;
  return false;
}

Pose2D sample_free_pose(const World& w, const NamedRegion& region,
                        const Footprint& f, std::mt19937_64& rng,
                        int max_attempts) {
  std::uniform_real_distribution<double> ux(region.box.min.x, region.box.max.x);
  std::uniform_real_distribution<double> uy(region.box.min.y, region.box.max.y);
  std::uniform_real_distribution<double> ut(-M_PI, M_PI);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Pose2D pose;
    pose.x = ux(rng);
    pose.y = uy(rng);
    pose.theta = wrap_angle(ut(rng));
    if (!check_collision(w, pose, f)) return pose;
  }
  throw WorldError("sample_free_pose: no collision-free pose found in region '" +
                   region.name + "' after " + std::to_string(max_attempts) +
                   " attempts");
}

}  // namespace navgym
