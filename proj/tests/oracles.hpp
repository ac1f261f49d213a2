// Independent brute-force oracles used to cross-check the geometry,
// kinematics, and gradient implementations. These deliberately avoid
// the code paths under test: ray marching instead of analytic
// intersections, boundary sampling instead of shape-distance formulas,
// fine-step Euler instead of the closed-form arc, and central finite
// differences instead of backprop.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "navgym/geometry.hpp"
#include "navgym/nn.hpp"
#include "navgym/robot.hpp"
#include "navgym/world.hpp"

namespace oracles {

// Point-membership predicates, kept independent of the analytic
// ray-shape intersection code.
inline bool inside_solid_obstacle(const navgym::World& w,
                                  const navgym::Vec2& p) {
  for (const auto& ob : w.obstacles) {
    if (const auto* c = std::get_if<navgym::CircleShape>(&ob.shape)) {
      if ((p - c->center).norm() <= c->radius) return true;
    } else if (const auto* r = std::get_if<navgym::RectShape>(&ob.shape)) {
      if (r->box.contains(p)) return true;
    }
  }
  return !w.bounds.contains(p);
}

// Side of p relative to the (infinite) line through a segment.
inline double segment_side(const navgym::SegmentShape& s,
                           const navgym::Vec2& p) {
  return (s.p2 - s.p1).cross(p - s.p1);
}

inline bool within_segment_span(const navgym::SegmentShape& s,
                                const navgym::Vec2& p) {
  const navgym::Vec2 d = s.p2 - s.p1;
  const double t = (p - s.p1).dot(d) / d.dot(d);
  return t >= -1e-9 && t <= 1.0 + 1e-9;
}

// Fixed-pitch marching: step 1 mm at a time, detect entry into a solid
// shape or a side-sign crossing of a thin segment, then bisect the
// bracketing interval on the same predicates.
inline double raymarch(const navgym::World& w, const navgym::Vec2& origin,
                       double direction, double max_d, double pitch = 1e-3) {
  const navgym::Vec2 dir{std::cos(direction), std::sin(direction)};
  std::vector<const navgym::SegmentShape*> segments;
  for (const auto& ob : w.obstacles)
    if (const auto* s = std::get_if<navgym::SegmentShape>(&ob.shape))
      segments.push_back(s);
  std::vector<double> sides(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i)
    sides[i] = segment_side(*segments[i], origin);

  if (inside_solid_obstacle(w, origin)) return 0.0;
  double t_prev = 0.0;
  for (double t = pitch; t_prev < max_d; t += pitch) {
    t = std::min(t, max_d);
    const navgym::Vec2 p = origin + dir * t;
    double hit = -1.0;
    if (inside_solid_obstacle(w, p)) {
      double lo = t_prev, hi = t;
      for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (inside_solid_obstacle(w, origin + dir * mid)) hi = mid;
        else lo = mid;
      }
      hit = hi;
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const double side_now = segment_side(*segments[i], p);
      if (sides[i] != 0.0 && side_now != 0.0 &&
          std::signbit(side_now) != std::signbit(sides[i])) {
        double lo = t_prev, hi = t;
        for (int k = 0; k < 50; ++k) {
          const double mid = 0.5 * (lo + hi);
          if (std::signbit(segment_side(*segments[i], origin + dir * mid)) ==
              std::signbit(sides[i]))
            lo = mid;
          else
            hi = mid;
        }
        const double cross_t = 0.5 * (lo + hi);
        if (within_segment_span(*segments[i], origin + dir * cross_t) &&
            (hit < 0.0 || cross_t < hit))
          hit = cross_t;
      }
      sides[i] = side_now;
    }
    if (hit >= 0.0) return hit;
    if (t >= max_d) break;
    t_prev = t;
  }
  return max_d;
}

// Exact membership in the tolerance-inflated footprint (circle, or
// rounded rectangle for the Minkowski sum of the box with a disc).
inline bool inside_inflated_footprint(const navgym::Pose2D& pose,
                                      const navgym::Footprint& f,
                                      const navgym::Vec2& p) {
  const navgym::Vec2 local = (p - pose.position()).rotated(-pose.theta);
  if (f.shape == navgym::Footprint::Shape::kCircle)
    return local.norm() <= f.radius + f.collision_tolerance;
  const double ex = std::max(std::abs(local.x) - f.length * 0.5, 0.0);
  const double ey = std::max(std::abs(local.y) - f.width * 0.5, 0.0);
  return std::hypot(ex, ey) <= f.collision_tolerance;
}

// Samples every obstacle outline (and the bounds walls) at `pitch`
// spacing and tests membership in the inflated footprint. Conservative
// within a pitch-sized band around the exact tolerance boundary.
inline bool collision_by_sampling(const navgym::World& w,
                                  const navgym::Pose2D& pose,
                                  const navgym::Footprint& f,
                                  double pitch = 1e-3) {
  bool hit = false;
  auto test = [&](const navgym::Vec2& p) {
    if (inside_inflated_footprint(pose, f, p)) hit = true;
  };
  auto sample_segment = [&](const navgym::Vec2& a, const navgym::Vec2& b) {
    if (hit) return;
    const double len = (b - a).norm();
    const int n = std::max(2, static_cast<int>(len / pitch));
    for (int i = 0; i <= n && !hit; ++i)
      test(a + (b - a) * (static_cast<double>(i) / n));
  };
  const navgym::AABB& bb = w.bounds;
  sample_segment({bb.min.x, bb.min.y}, {bb.max.x, bb.min.y});
  sample_segment({bb.max.x, bb.min.y}, {bb.max.x, bb.max.y});
  sample_segment({bb.max.x, bb.max.y}, {bb.min.x, bb.max.y});
  sample_segment({bb.min.x, bb.max.y}, {bb.min.x, bb.min.y});
  for (const auto& ob : w.obstacles) {
    if (hit) break;
    if (const auto* s = std::get_if<navgym::SegmentShape>(&ob.shape)) {
      sample_segment(s->p1, s->p2);
    } else if (const auto* c = std::get_if<navgym::CircleShape>(&ob.shape)) {
      // Footprint center swallowed by the circle leaves no boundary
      // sample inside the footprint.
      if ((pose.position() - c->center).norm() <= c->radius) return true;
      const int n =
          std::max(16, static_cast<int>(2.0 * M_PI * c->radius / pitch));
      for (int i = 0; i < n && !hit; ++i) {
        const double a = 2.0 * M_PI * i / n;
        test(c->center + navgym::Vec2{c->radius * std::cos(a),
                                      c->radius * std::sin(a)});
      }
    } else if (const auto* r = std::get_if<navgym::RectShape>(&ob.shape)) {
      if (r->box.contains(pose.position())) return true;
      const navgym::AABB& b = r->box;
      sample_segment({b.min.x, b.min.y}, {b.max.x, b.min.y});
      sample_segment({b.max.x, b.min.y}, {b.max.x, b.max.y});
      sample_segment({b.max.x, b.max.y}, {b.min.x, b.max.y});
      sample_segment({b.min.x, b.max.y}, {b.min.x, b.min.y});
    }
  }
  return hit;
}

// Dense boundary sampling of all obstacle outlines; the minimum sample
// distance approximates the exact obstacle distance within the pitch.
inline double obstacle_distance_by_sampling(const navgym::World& w,
                                            const navgym::Vec2& p,
                                            double pitch = 1e-3) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const navgym::Vec2& q) {
    best = std::min(best, (p - q).norm());
  };
  auto sample_segment = [&](const navgym::Vec2& a, const navgym::Vec2& b) {
    const double len = (b - a).norm();
    const int n = std::max(2, static_cast<int>(len / pitch));
    for (int i = 0; i <= n; ++i)
      consider(a + (b - a) * (static_cast<double>(i) / n));
  };
  const navgym::AABB& bb = w.bounds;
  sample_segment({bb.min.x, bb.min.y}, {bb.max.x, bb.min.y});
  sample_segment({bb.max.x, bb.min.y}, {bb.max.x, bb.max.y});
  sample_segment({bb.max.x, bb.max.y}, {bb.min.x, bb.max.y});
  sample_segment({bb.min.x, bb.max.y}, {bb.min.x, bb.min.y});
  for (const auto& ob : w.obstacles) {
    if (const auto* s = std::get_if<navgym::SegmentShape>(&ob.shape)) {
      sample_segment(s->p1, s->p2);
    } else if (const auto* c = std::get_if<navgym::CircleShape>(&ob.shape)) {
      if ((p - c->center).norm() <= c->radius) return 0.0;
      const int n =
          std::max(16, static_cast<int>(2.0 * M_PI * c->radius / pitch));
      for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        consider(c->center + navgym::Vec2{c->radius * std::cos(a),
                                          c->radius * std::sin(a)});
      }
    } else if (const auto* r = std::get_if<navgym::RectShape>(&ob.shape)) {
      if (r->box.contains(p)) return 0.0;
      const navgym::AABB& b = r->box;
      sample_segment({b.min.x, b.min.y}, {b.max.x, b.min.y});
      sample_segment({b.max.x, b.min.y}, {b.max.x, b.max.y});
      sample_segment({b.max.x, b.max.y}, {b.min.x, b.max.y});
      sample_segment({b.min.x, b.max.y}, {b.min.x, b.min.y});
    }
  }
  return best;
}

// Fine-step Euler integration of the same constant twist.
inline navgym::Pose2D euler_integrate(const navgym::Pose2D& start,
                                      const navgym::VelocityCommand& cmd,
                                      double dt, int substeps) {
  navgym::Pose2D p = start;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const navgym::Vec2 v = navgym::Vec2{cmd.v_x, cmd.v_y}.rotated(p.theta);
    p.x += v.x * h;
    p.y += v.y * h;
    p.theta += cmd.omega * h;
  }
  p.theta = navgym::wrap_angle(p.theta);
  return p;
}

// Central finite-difference gradient of a scalar function of the
// network parameters.
inline std::vector<std::vector<double>> finite_difference_gradients(
    navgym::nn::Network& net, const std::function<double()>& loss,
    double h = 1e-5) {
  std::vector<std::vector<double>> grads;
  for (auto& tensor : net.parameters()) {
    std::vector<double> g(tensor.value->size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double saved = (*tensor.value)[i];
      (*tensor.value)[i] = saved + h;
      const double up = loss();
      (*tensor.value)[i] = saved - h;
      const double down = loss();
      (*tensor.value)[i] = saved;
      g[i] = (up - down) / (2.0 * h);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

// Random cluttered world for property tests.
inline navgym::World random_world(std::mt19937_64& rng, int n_obstacles = 6) {
  navgym::World w;
  w.bounds = {{-5.0, -5.0}, {5.0, 5.0}};
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> size(0.2, 1.0);
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 0; i < n_obstacles; ++i) {
    navgym::ObstaclePrimitive ob;
    ob.height = 1.0 + size(rng);
    switch (kind(rng)) {
      case 0:
        ob.shape = navgym::CircleShape{{pos(rng) * 0.9, pos(rng) * 0.9},
                                       0.5 * size(rng)};
        break;
      case 1: {
        const navgym::Vec2 p1{pos(rng), pos(rng)};
        ob.shape = navgym::SegmentShape{
            p1, {std::clamp(p1.x + size(rng), -5.0, 5.0),
                 std::clamp(p1.y + size(rng), -5.0, 5.0)}};
        break;
      }
      default: {
        const navgym::Vec2 mn{pos(rng) * 0.8, pos(rng) * 0.8};
        ob.shape = navgym::RectShape{
            {mn, {std::min(mn.x + size(rng), 5.0), std::min(mn.y + size(rng), 5.0)}}};
        break;
      }
    }
    w.obstacles.push_back(ob);
  }
  w.spawn_regions.push_back({"all", {{-4.5, -4.5}, {4.5, 4.5}}});
  w.goal_regions.push_back({"all", {{-4.5, -4.5}, {4.5, 4.5}}});
  w.validate();
  return w;
}

}  // namespace oracles
