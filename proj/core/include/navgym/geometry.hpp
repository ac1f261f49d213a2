#pragma once

#include <cmath>
#include <vector>

namespace navgym {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

// Pose on the plane; theta is always kept in [-pi, pi).
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

// Wraps an angle into [-pi, pi).
double wrap_angle(double theta);

// Axis-aligned rectangle, min < max componentwise.
struct AABB {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  Vec2 center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diagonal() const { return (max - min).norm(); }
};

// Distance from point p to segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Distance from point p to the boundary or interior of box (0 inside).
double point_aabb_distance(const Vec2& p, const AABB& box);

// Minimum distance between two segments; 0 if they intersect.
double segment_segment_distance(const Vec2& a1, const Vec2& a2,
                                const Vec2& b1, const Vec2& b2);

bool segments_intersect(const Vec2& a1, const Vec2& a2,
                        const Vec2& b1, const Vec2& b2);

// Convex polygon given as CCW vertex list.
using ConvexPolygon = std::vector<Vec2>;

bool point_in_convex_polygon(const Vec2& p, const ConvexPolygon& poly);

// Minimum distance between two convex polygons; 0 if they overlap.
double convex_polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b);

// Distance from a segment to a convex polygon; 0 on overlap.
double segment_polygon_distance(const Vec2& a, const Vec2& b,
                                const ConvexPolygon& poly);

// Ray-shape intersections. Each returns the smallest t >= 0 along
// origin + t * dir (dir unit length) or a negative value on miss.
double ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                const Vec2& a, const Vec2& b);
double ray_circle_intersection(const Vec2& origin, const Vec2& dir,
                               const Vec2& center, double radius);
double ray_aabb_intersection(const Vec2& origin, const Vec2& dir,
                             const AABB& box);

}  // namespace navgym
