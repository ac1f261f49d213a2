#include "navgym/robot.hpp"

#include <algorithm>
#include <cmath>

namespace navgym {
namespace {

constexpr double kOmegaStraightEps = 1e-9;

double clamp(double v, const Limit& l) { return std::clamp(v, l.min, l.max); }

}  // namespace

VelocityCommand clamp_command(const PlatformSpec& spec,
                              const VelocityCommand& cmd) {
  VelocityCommand out;
  out.v_x = clamp(cmd.v_x, spec.v_x_limits);
  out.v_y = spec.drive_type == DriveType::kDifferential
                ? 0.0
                : clamp(cmd.v_y, spec.v_y_limits);
  out.omega = clamp(cmd.omega, spec.omega_limits);
  return out;
}

RobotState integrate(const PlatformSpec& spec, const RobotState& state,
                     const VelocityCommand& cmd, double dt) {
  const double theta0 = state.pose.theta;
  const double w = cmd.omega;
  Vec2 delta;
  if (std::abs(w) < kOmegaStraightEps) {
    delta = Vec2{cmd.v_x, cmd.v_y}.rotated(theta0) * dt;
  } else {
    // Integral of R(theta0 + w t) * u over [0, dt]:
    //   dx = ( (sin th1 - sin th0) u_x - (cos th0 - cos th1) u_y ) / w
    //   dy = ( (cos th0 - cos th1) u_x + (sin th1 - sin th0) u_y ) / w
    const double theta1 = theta0 + w * dt;
    const double ds = std::sin(theta1) - std::sin(theta0);
    const double dc = std::cos(theta0) - std::cos(theta1);
    delta.x = (ds * cmd.v_x - dc * cmd.v_y) / w;
    delta.y = (dc * cmd.v_x + ds * cmd.v_y) / w;
  }
  RobotState next;
  next.pose.x = state.pose.x + delta.x;
  next.pose.y = state.pose.y + delta.y;
  next.pose.theta = wrap_angle(theta0 + w * dt);
  next.velocity = cmd;
  const double speed_prev = std::hypot(state.velocity.v_x, state.velocity.v_y);
  const double speed_now = std::hypot(cmd.v_x, cmd.v_y);
  next.linear_acceleration = (speed_now - speed_prev) / dt;
  next.yaw_acceleration = (cmd.omega - state.velocity.omega) / dt;
  return next;
}

}  // namespace navgym
