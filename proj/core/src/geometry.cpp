#include "navgym/geometry.hpp"

#include <algorithm>
#include <limits>

namespace navgym {

double wrap_angle(double theta) {
  double w = std::fmod(theta + M_PI, 2.0 * M_PI);
  if (w < 0.0) w += 2.0 * M_PI;
  return w - M_PI;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return (p - a).norm();
  double t = (p - a).dot(ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double point_aabb_distance(const Vec2& p, const AABB& box) {
  const double dx = std::max({box.min.x - p.x, 0.0, p.x - box.max.x});
  const double dy = std::max({box.min.y - p.y, 0.0, p.y - box.max.y});
  return std::hypot(dx, dy);
}

bool segments_intersect(const Vec2& a1, const Vec2& a2,
                        const Vec2& b1, const Vec2& b2) {
  const Vec2 r = a2 - a1;
  const Vec2 s = b2 - b1;
  const double rxs = r.cross(s);
  const Vec2 qp = b1 - a1;
  if (rxs == 0.0) {
    if (qp.cross(r) != 0.0) return false;  // parallel, non-collinear
    // Collinear: project onto the dominant axis.
    const double r2 = r.dot(r);
    if (r2 == 0.0) return point_segment_distance(a1, b1, b2) == 0.0;
    const double t0 = qp.dot(r) / r2;
    const double t1 = t0 + s.dot(r) / r2;
    return std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), 1.0);
  }
  const double t = qp.cross(s) / rxs;
  const double u = qp.cross(r) / rxs;
  return t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0;
}

double segment_segment_distance(const Vec2& a1, const Vec2& a2,
                                const Vec2& b1, const Vec2& b2) {
  if (segments_intersect(a1, a2, b1, b2)) return 0.0;
  return std::min({point_segment_distance(a1, b1, b2),
                   point_segment_distance(a2, b1, b2),
                   point_segment_distance(b1, a1, a2),
                   point_segment_distance(b2, a1, a2)});
}

bool point_in_convex_polygon(const Vec2& p, const ConvexPolygon& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b - a).cross(p - a) < 0.0) return false;
  }
  return true;
}

double convex_polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (point_in_convex_polygon(a[0], b) || point_in_convex_polygon(b[0], a))
    return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t na = a.size(), nb = b.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      best = std::min(best, segment_segment_distance(a[i], a[(i + 1) % na],
                                                     b[j], b[(j + 1) % nb]));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

double segment_polygon_distance(const Vec2& a, const Vec2& b,
                                const ConvexPolygon& poly) {
  if (point_in_convex_polygon(a, poly)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best,
                    segment_segment_distance(a, b, poly[i], poly[(i + 1) % n]));
    if (best == 0.0) return 0.0;
  }
  return best;
}

double ray_segment_intersection(const Vec2& origin, const Vec2& dir,
                                const Vec2& a, const Vec2& b) {
  const Vec2 s = b - a;
  const double rxs = dir.cross(s);
  const Vec2 qp = a - origin;
  if (rxs == 0.0) {
    if (qp.cross(dir) != 0.0) return -1.0;
    // Collinear ray and segment: nearest endpoint ahead of origin.
    const double ta = qp.dot(dir);
    const double tb = (b - origin).dot(dir);
    const double lo = std::min(ta, tb), hi = std::max(ta, tb);
    if (hi < 0.0) return -1.0;
    return std::max(lo, 0.0);
  }
  const double t = qp.cross(s) / rxs;
  const double u = qp.cross(dir) / rxs;
  if (t >= 0.0 && u >= 0.0 && u <= 1.0) return t;
  return -1.0;
}

double ray_circle_intersection(const Vec2& origin, const Vec2& dir,
                               const Vec2& center, double radius) {
  const Vec2 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.dot(oc) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return -1.0;
  const double sq = std::sqrt(disc);
  const double t0 = -b - sq;
  if (t0 >= 0.0) return t0;
  const double t1 = -b + sq;
  if (t1 >= 0.0) return 0.0;  // origin inside: boundary already crossed
  return -1.0;
}

double ray_aabb_intersection(const Vec2& origin, const Vec2& dir,
                             const AABB& box) {
  // Slab method over the solid box.
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (o[i] < lo[i] || o[i] > hi[i]) return -1.0;
      continue;
    }
    double t0 = (lo[i] - o[i]) / d[i];
    double t1 = (hi[i] - o[i]) / d[i];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
  }
  if (tmax < tmin || tmax < 0.0) return -1.0;
  return std::max(tmin, 0.0);
}

}  // namespace navgym
