#pragma once

#include "navgym/geometry.hpp"
#include "navgym/world.hpp"

namespace navgym {

// Body-frame velocity command; v_y is only meaningful for omni platforms.
struct VelocityCommand {
  double v_x = 0.0;    // m/s
  double v_y = 0.0;    // m/s
  double omega = 0.0;  // rad/s
};

enum class DriveType { kDifferential, kOmnidirectional };

struct Limit {
  double min = 0.0;
  double max = 0.0;
};

struct PlatformSpec {
  DriveType drive_type = DriveType::kDifferential;
  Limit v_x_limits{0.0, 0.5};
  Limit v_y_limits{-0.5, 0.5};
  Limit omega_limits{-1.0, 1.0};
  Footprint footprint;
};

struct RobotState {
  Pose2D pose;
  VelocityCommand velocity;       // realized (= clamped command)
  double linear_acceleration = 0.0;  // m/s^2, finite difference of speed
  double yaw_acceleration = 0.0;     // rad/s^2
};

// Clamps each component into the platform limits; v_y is zeroed for
// differential drives.
VelocityCommand clamp_command(const PlatformSpec& spec,
                              const VelocityCommand& cmd);

// Advances the state over dt seconds with the closed-form constant-twist
// solution (exact circular arc; straight-line limit for |omega| < 1e-9).
RobotState integrate(const PlatformSpec& spec, const RobotState& state,
                     const VelocityCommand& cmd, double dt);

}  // namespace navgym
