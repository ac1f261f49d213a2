#include "navgym/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace navgym {
namespace {

constexpr double kWallHeight = 1e9;

double obstacle_ray_distance(const ObstaclePrimitive& ob, const Vec2& origin,
                             const Vec2& dir) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SegmentShape>) {
          return ray_segment_intersection(origin, dir, s.p1, s.p2);
        } else if constexpr (std::is_same_v<T, CircleShape>) {
          return ray_circle_intersection(origin, dir, s.center, s.radius);
        } else {
          return ray_aabb_intersection(origin, dir, s.box);
        }
      },
      ob.shape);
}

double bounds_ray_distance(const AABB& b, const Vec2& origin, const Vec2& dir) {
  const Vec2 c[4] = {{b.min.x, b.min.y}, {b.max.x, b.min.y},
                     {b.max.x, b.max.y}, {b.min.x, b.max.y}};
  double best = -1.0;
  for (int i = 0; i < 4; ++i) {
    const double t =
        ray_segment_intersection(origin, dir, c[i], c[(i + 1) % 4]);
    if (t >= 0.0 && (best < 0.0 || t < best)) best = t;
  }
  return best;
}

double clip_range(double r, double max_r) {
  return std::clamp(r, kRangeMin, max_r);
}

}  // namespace

RaycastHit raycast_hit(const World& w, const Vec2& origin, double direction,
                       double max_d) {
  const Vec2 dir{std::cos(direction), std::sin(direction)};
  RaycastHit best;
  best.distance = max_d;
  const double wall_t = bounds_ray_distance(w.bounds, origin, dir);
  if (wall_t >= 0.0 && wall_t < best.distance) {
    best.distance = wall_t;
    best.obstacle_height = kWallHeight;
    best.hit = true;
  }
  for (const auto& ob : w.obstacles) {
    const double t = obstacle_ray_distance(ob, origin, dir);
    if (t >= 0.0 && t < best.distance) {
      best.distance = t;
      best.obstacle_height = ob.height;
      best.hit = true;
    }
  }
  return best;
}

double raycast(const World& w, const Vec2& origin, double direction,
               double max_d) {
  return raycast_hit(w, origin, direction, max_d).distance;
}

LidarScan scan_lidar(const World& w, const Pose2D& robot_pose,
                     const LidarSpec& spec, std::mt19937_64& rng) {
  const Vec2 origin =
      robot_pose.position() + spec.mount_offset.position().rotated(robot_pose.theta);
  const double heading =
      wrap_angle(robot_pose.theta + spec.mount_offset.theta);
  const bool full_circle = spec.fov >= 2.0 * M_PI - 1e-12;
  const double step = full_circle ? spec.fov / spec.n_ranges
                                  : spec.fov / (spec.n_ranges - 1);
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  LidarScan scan;
  scan.ranges.resize(spec.n_ranges);
  for (int i = 0; i < spec.n_ranges; ++i) {
    const double angle = heading - spec.fov * 0.5 + i * step;
    double r = raycast(w, origin, angle, spec.max_distance);
    if (spec.noise_std > 0.0) r += noise(rng);
    scan.ranges[i] = clip_range(r, spec.max_distance);
  }
  return scan;
}

DepthImage render_depth(const World& w, const Pose2D& robot_pose,
                        const DepthSpec& spec, std::mt19937_64& rng) {
  DepthImage img;
  img.width = spec.width;
  img.height = spec.height;
  img.depths.resize(static_cast<std::size_t>(spec.width) * spec.height);
  std::normal_distribution<double> noise(0.0, spec.noise_std);
  const Vec2 origin = robot_pose.position();
  for (int u = 0; u < spec.width; ++u) {
    const double azimuth = robot_pose.theta - spec.h_fov * 0.5 +
                           (u + 0.5) * spec.h_fov / spec.width;
    const RaycastHit hit = raycast_hit(w, origin, azimuth, spec.max_depth);
    for (int v = 0; v < spec.height; ++v) {
      const double elevation =
          spec.v_fov * 0.5 - (v + 0.5) * spec.v_fov / spec.height;
      double depth = spec.max_depth;
      const double cos_e = std::cos(elevation);
      if (hit.hit) {
        // Height of the ray where it meets the first obstacle face.
        const double z_face =
            spec.mount_height + hit.distance * std::tan(elevation);
        if (z_face >= 0.0 && z_face <= hit.obstacle_height) {
          depth = hit.distance / cos_e;
        } else if (elevation < 0.0) {
          depth = spec.mount_height / -std::sin(elevation);
        }
      } else if (elevation < 0.0) {
        depth = spec.mount_height / -std::sin(elevation);
      }
      if (spec.noise_std > 0.0) depth += noise(rng);
      img.depths[v * spec.width + u] = clip_range(depth, spec.max_depth);
    }
  }
  return img;
}

std::vector<double> process_observation(const LidarScan& scan,
                                        const LidarSpec& spec) {
  std::vector<double> out(scan.ranges.size());
  for (std::size_t i = 0; i < scan.ranges.size(); ++i)
    out[i] = scan.ranges[i] / spec.max_distance;
  return out;
}

std::vector<double> process_observation(const DepthImage& img,
                                        const DepthSpec& spec) {
  std::vector<double> out(img.depths.size());
  for (std::size_t i = 0; i < img.depths.size(); ++i)
    out[i] = img.depths[i] / spec.max_depth;
  return out;
}

std::vector<double> downsample_area(const std::vector<double>& img, int in_w,
                                    int in_h, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1 || in_w % out_w != 0 || in_h % out_h != 0)
    throw std::invalid_argument(
        "downsample_area: output resolution must divide input resolution");
  const int bx = in_w / out_w;
  const int by = in_h / out_h;
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h, 0.0);
  const double inv = 1.0 / (bx * by);
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      double sum = 0.0;
      for (int dy = 0; dy < by; ++dy)
        for (int dx = 0; dx < bx; ++dx)
          sum += img[(oy * by + dy) * in_w + ox * bx + dx];
      out[oy * out_w + ox] = sum * inv;
    }
  }
  return out;
}

}  // namespace navgym
