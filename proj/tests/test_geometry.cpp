#include <doctest.h>

#include <random>

#include "navgym/geometry.hpp"

using namespace navgym;

TEST_CASE("wrap_angle maps into [-pi, pi)") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(3.0 * M_PI) == doctest::Approx(-M_PI));
  CHECK(wrap_angle(-M_PI - 1e-6) == doctest::Approx(M_PI - 1e-6));
  CHECK(wrap_angle(M_PI) == doctest::Approx(-M_PI));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = wrap_angle(a);
    CHECK(w >= -M_PI);
    CHECK(w < M_PI);
    CHECK(std::remainder(a - w, 2.0 * M_PI) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("point-segment distance") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2.0));
  CHECK(point_segment_distance({0, 0}, {0, 0}, {0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("ray-circle intersection") {
  CHECK(ray_circle_intersection({0, 0}, {1, 0}, {3, 0}, 1.0) == doctest::Approx(2.0));
  CHECK(ray_circle_intersection({0, 0}, {1, 0}, {0, 3}, 1.0) < 0.0);
  // origin inside the circle
  CHECK(ray_circle_intersection({3, 0}, {1, 0}, {3, 0}, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("ray-aabb slab intersection") {
  const AABB box{{1, -1}, {2, 1}};
  CHECK(ray_aabb_intersection({0, 0}, {1, 0}, box) == doctest::Approx(1.0));
  CHECK(ray_aabb_intersection({0, 5}, {1, 0}, box) < 0.0);
  CHECK(ray_aabb_intersection({1.5, 0}, {1, 0}, box) == doctest::Approx(0.0));
}

TEST_CASE("segment-segment distance and intersection") {
  CHECK(segments_intersect({0, -1}, {0, 1}, {-1, 0}, {1, 0}));
  CHECK(!segments_intersect({0, 2}, {0, 3}, {-1, 0}, {1, 0}));
  CHECK(segment_segment_distance({0, 2}, {1, 2}, {-1, 0}, {1, 0}) ==
        doctest::Approx(2.0));
  CHECK(segment_segment_distance({0, -1}, {0, 1}, {-1, 0}, {1, 0}) ==
        doctest::Approx(0.0));
}

TEST_CASE("convex polygon distance") {
  const ConvexPolygon a{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const ConvexPolygon b{{3, 0}, {4, 0}, {4, 1}, {3, 1}};
  CHECK(convex_polygon_distance(a, b) == doctest::Approx(2.0));
  const ConvexPolygon c{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}};
  CHECK(convex_polygon_distance(a, c) == doctest::Approx(0.0));
}
