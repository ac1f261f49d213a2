#include "navgym/env.hpp"

#include <algorithm>
#include <cmath>

namespace navgym {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kRunning: return "running";
    case Outcome::kGoalReached: return "goal_reached";
    case Outcome::kCollision: return "collision";
    case Outcome::kTimeout: return "timeout";
  }
  return "unknown";
}

std::vector<double> Observation::flat() const {
  std::vector<double> out = sensor;
  out.push_back(goal_distance);
  out.push_back(goal_bearing);
  return out;
}

double compute_reward(const RewardSpec& spec, double d_prev, double d_now,
                      Outcome outcome) {
  double r = spec.dense_coefficient * (d_prev - d_now);
  if (outcome == Outcome::kGoalReached) r += spec.r_goal;
  else if (outcome == Outcome::kCollision) r += spec.r_collision;
  return r;
}

Observation assemble_observation(std::vector<double> sensor_part,
                                 const Pose2D& robot_pose, const Vec2& goal,
                                 double distance_normalizer) {
  Observation obs;
  obs.sensor = std::move(sensor_part);
  const Vec2 to_goal = goal - robot_pose.position();
  obs.goal_distance = to_goal.norm() / distance_normalizer;
  obs.goal_bearing = wrap_angle(std::atan2(to_goal.y, to_goal.x) - robot_pose.theta);
  return obs;
}

NavEnv::NavEnv(World world, PlatformSpec platform, SensorConfig sensors,
               EpisodeConfig episode, RewardSpec reward)
    : world_(std::move(world)),
      platform_(platform),
      sensors_(sensors),
      episode_(episode),
      reward_(reward),
      distance_normalizer_(world_.bounds.diagonal()) {
  if (episode_.stages.empty())
    episode_.stages.push_back({world_.spawn_regions.front().name,
                               world_.goal_regions.front().name});
}

const CurriculumStage& NavEnv::stage_for_episode(int episode_index) const {
  const int stage =
      std::min<int>(episode_index / episode_.curriculum_stage_episodes,
                    static_cast<int>(episode_.stages.size()) - 1);
  return episode_.stages[stage];
}

std::size_t NavEnv::observation_size() const {
  if (sensors_.kind == SensorKind::kLidar)
    return static_cast<std::size_t>(sensors_.lidar.n_ranges) + 2;
  const int w = sensors_.depth_out_width > 0 ? sensors_.depth_out_width
                                             : sensors_.depth.width;
  const int h = sensors_.depth_out_height > 0 ? sensors_.depth_out_height
                                              : sensors_.depth.height;
  return static_cast<std::size_t>(w) * h + 2;
}

int NavEnv::action_dim() const {
  return platform_.drive_type == DriveType::kDifferential ? 2 : 3;
}

double NavEnv::goal_distance() const {
  return (goal_ - state_.pose.position()).norm();
}

Observation NavEnv::observe(std::mt19937_64& rng) {
  std::vector<double> sensor_part;
  if (sensors_.kind == SensorKind::kLidar) {
    const LidarScan scan = scan_lidar(world_, state_.pose, sensors_.lidar, rng);
    last_min_range_ =
        *std::min_element(scan.ranges.begin(), scan.ranges.end());
    sensor_part = process_observation(scan, sensors_.lidar);
  } else {
    const DepthImage img = render_depth(world_, state_.pose, sensors_.depth, rng);
    last_min_range_ = *std::min_element(img.depths.begin(), img.depths.end());
    sensor_part = process_observation(img, sensors_.depth);
    if (sensors_.depth_out_width > 0 && sensors_.depth_out_height > 0)
      sensor_part = downsample_area(sensor_part, sensors_.depth.width,
                                    sensors_.depth.height,
                                    sensors_.depth_out_width,
                                    sensors_.depth_out_height);
  }
  return assemble_observation(std::move(sensor_part), state_.pose, goal_,
                              distance_normalizer_);
}

Observation NavEnv::reset(int episode_index) {
  const CurriculumStage& stage = stage_for_episode(episode_index);
  const NamedRegion* spawn = world_.find_spawn(stage.spawn_region);
  const NamedRegion* goal_region = world_.find_goal(stage.goal_region);
  if (!spawn) throw EnvError("unknown spawn region: " + stage.spawn_region);
  if (!goal_region) throw EnvError("unknown goal region: " + stage.goal_region);

  // Per-episode stream so reset(i) never depends on the episode history.
  std::seed_seq seq{episode_.seed, static_cast<std::uint64_t>(episode_index)};
  std::mt19937_64 rng(seq);

  const Footprint& fp = platform_.footprint;
  const Pose2D start = sample_free_pose(world_, *spawn, fp, rng);
  const double min_separation =
      episode_.goal_threshold + 2.0 * fp.bounding_radius();
  Vec2 goal;
  Footprint goal_probe = fp;
  for (int attempt = 0;; ++attempt) {
    const Pose2D g = sample_free_pose(world_, *goal_region, goal_probe, rng);
    goal = g.position();
    if ((goal - start.position()).norm() >= min_separation) break;
    if (attempt >= 1000)
      throw EnvError("reset: could not place goal away from start");
  }

  state_ = RobotState{};
  state_.pose = start;
  goal_ = goal;
  steps_ = 0;
  done_ = false;
  started_ = true;
  outcome_ = Outcome::kRunning;
  std::seed_seq step_seq{
      episode_.seed ^ static_cast<std::uint64_t>(0x9e3779b97f4a7c15ull),
      static_cast<std::uint64_t>(episode_index)};
  step_rng_.seed(step_seq);
  return observe(step_rng_);
}

Observation NavEnv::reset_to(const Pose2D& start, const Vec2& goal) {
  state_ = RobotState{};
  state_.pose = start;
  goal_ = goal;
  steps_ = 0;
  done_ = false;
  started_ = true;
  outcome_ = Outcome::kRunning;
  std::seed_seq step_seq{
      episode_.seed ^ static_cast<std::uint64_t>(0x9e3779b97f4a7c15ull),
      static_cast<std::uint64_t>(0)};
  step_rng_.seed(step_seq);
  return observe(step_rng_);
}

StepResult NavEnv::step(const VelocityCommand& action) {
  if (!started_) throw EnvError("step called before reset");
  if (done_) throw EnvError("step called on a finished episode; call reset");

  const double d_prev = goal_distance();
  const VelocityCommand cmd = clamp_command(platform_, action);
  state_ = integrate(platform_, state_, cmd, episode_.dt);
  ++steps_;

  const double d_now = goal_distance();
  Outcome outcome = Outcome::kRunning;
  // Priority: collision > goal > timeout.
  if (check_collision(world_, state_.pose, platform_.footprint))
    outcome = Outcome::kCollision;
  else if (d_now <= episode_.goal_threshold)
    outcome = Outcome::kGoalReached;
  else if (steps_ >= episode_.max_steps)
    outcome = Outcome::kTimeout;

  StepResult result;
  result.reward = compute_reward(reward_, d_prev, d_now, outcome);
  result.outcome = outcome;
  result.done = outcome != Outcome::kRunning;
  result.observation = observe(step_rng_);
  done_ = result.done;
  outcome_ = outcome;
  return result;
}

}  // namespace navgym
