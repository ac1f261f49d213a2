#pragma once

#include <random>
#include <vector>

#include "navgym/geometry.hpp"
#include "navgym/world.hpp"

namespace navgym {

struct LidarSpec {
  int n_ranges = 36;
  double fov = 2.0 * M_PI;
  double max_distance = 10.0;
  Pose2D mount_offset;     // relative to robot frame
  double noise_std = 0.0;  // meters, additive Gaussian
};

struct DepthSpec {
  int width = 64;
  int height = 48;
  double h_fov = 1.51;  // radians
  double v_fov = 1.01;
  double max_depth = 10.0;
  double mount_height = 0.3;  // camera height above ground, meters
  double noise_std = 0.0;
};

struct LidarScan {
  std::vector<double> ranges;  // each in (range_min, max_distance]
};

struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depths;  // row-major, height x width

  double at(int row, int col) const { return depths[row * width + col]; }
};

// Readings below this floor are clipped up (keeps noisy values positive).
constexpr double kRangeMin = 0.01;

struct RaycastHit {
  double distance = 0.0;        // clipped to max_d when nothing is hit
  double obstacle_height = 0.0; // height of the hit primitive; walls report
                                // an effectively unbounded height
  bool hit = false;
};

// First intersection along the ray from origin; bounds walls are solid.
double raycast(const World& w, const Vec2& origin, double direction,
               double max_d);
RaycastHit raycast_hit(const World& w, const Vec2& origin, double direction,
                       double max_d);

// n_ranges rays spread over the fov, centered on the robot heading plus
// the mount offset. Ray 0 points at heading - fov/2; angles increase
// counterclockwise. A full-circle fov spaces rays by fov/n so the first
// and last rays do not coincide.
LidarScan scan_lidar(const World& w, const Pose2D& robot_pose,
                     const LidarSpec& spec, std::mt19937_64& rng);

// 2.5D depth render over extruded obstacle prisms. Column azimuths span
// h_fov like lidar rays; row 0 is the top of the image. A pixel sees the
// first horizontal hit iff the prism band [0, height] covers the ray's
// elevation at the hit; descending rays otherwise hit the ground plane.
// Pixel values are slant distances, clipped to (kRangeMin, max_depth].
DepthImage render_depth(const World& w, const Pose2D& robot_pose,
                        const DepthSpec& spec, std::mt19937_64& rng);

// Normalizes ranges/depths into [0, 1] by the spec maximum.
std::vector<double> process_observation(const LidarScan& scan,
                                        const LidarSpec& spec);
std::vector<double> process_observation(const DepthImage& img,
                                        const DepthSpec& spec);

// Area-average downsampling; in_w/in_h must be divisible by out_w/out_h.
std::vector<double> downsample_area(const std::vector<double>& img, int in_w,
                                    int in_h, int out_w, int out_h);

}  // namespace navgym
