#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "navgym/robot.hpp"
#include "navgym/sensors.hpp"
#include "navgym/world.hpp"

namespace navgym {

enum class Outcome { kRunning, kGoalReached, kCollision, kTimeout };

const char* outcome_name(Outcome o);

enum class SensorKind { kLidar, kDepth };

// One curriculum stage: where the robot spawns and where goals appear.
struct CurriculumStage {
  std::string spawn_region;
  std::string goal_region;
};

struct EpisodeConfig {
  int max_steps = 500;
  double dt = 0.1;
  double goal_threshold = 0.3;
  int curriculum_stage_episodes = 300;
  std::vector<CurriculumStage> stages;  // stage i active for episodes
                                        // [i*stage_episodes, ...), last
                                        // stage holds forever
  std::uint64_t seed = 0;
};

struct RewardSpec {
  double r_goal = 1000.0;
  double r_collision = -150.0;
  double dense_coefficient = 1.0;  // on (d_prev - d_now)
};

struct SensorConfig {
  SensorKind kind = SensorKind::kLidar;
  LidarSpec lidar;
  DepthSpec depth;
  int depth_out_width = 0;   // 0: no downsampling
  int depth_out_height = 0;
};

// Agent input: normalized sensor part followed by [d_goal / d_max,
// bearing to goal in [-pi, pi)].
struct Observation {
  std::vector<double> sensor;
  double goal_distance = 0.0;  // normalized
  double goal_bearing = 0.0;

  std::vector<double> flat() const;
  std::size_t size() const { return sensor.size() + 2; }
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
  Outcome outcome = Outcome::kRunning;
};

class EnvError : public std::runtime_error {
 public:
  explicit EnvError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense reward on goal-distance reduction plus the terminal bonus or
// penalty; timeouts add no terminal term.
double compute_reward(const RewardSpec& spec, double d_prev, double d_now,
                      Outcome outcome);

Observation assemble_observation(std::vector<double> sensor_part,
                                 const Pose2D& robot_pose, const Vec2& goal,
                                 double distance_normalizer);

// Point-to-point mapless navigation environment. Synchronous and
// episodic: state only advances inside step(). Deterministic given
// (seed, episode_index, action sequence).
class NavEnv {
 public:
  NavEnv(World world, PlatformSpec platform, SensorConfig sensors,
         EpisodeConfig episode, RewardSpec reward);

  Observation reset(int episode_index);
  StepResult step(const VelocityCommand& action);

  const World& world() const { return world_; }
  const PlatformSpec& platform() const { return platform_; }
  const SensorConfig& sensors() const { return sensors_; }
  const EpisodeConfig& episode_config() const { return episode_; }
  const RewardSpec& reward_spec() const { return reward_; }

  const RobotState& robot_state() const { return state_; }
  const Vec2& goal() const { return goal_; }
  double goal_distance() const;  // meters, from current pose
  int steps_taken() const { return steps_; }
  bool episode_done() const { return done_; }
  Outcome outcome() const { return outcome_; }
  double min_lidar_range() const { return last_min_range_; }
  std::size_t observation_size() const;
  int action_dim() const;

  // Manual episode setup, used by the evaluation harness for fixed
  // start-goal couples.
  Observation reset_to(const Pose2D& start, const Vec2& goal);

  const CurriculumStage& stage_for_episode(int episode_index) const;

 private:
  Observation observe(std::mt19937_64& rng);

  World world_;
  PlatformSpec platform_;
  SensorConfig sensors_;
  EpisodeConfig episode_;
  RewardSpec reward_;
  double distance_normalizer_;

  RobotState state_;
  Vec2 goal_;
  int steps_ = 0;
  bool done_ = true;
  bool started_ = false;
  Outcome outcome_ = Outcome::kRunning;
  double last_min_range_ = 0.0;
  std::mt19937_64 step_rng_;  // sensor noise stream for the episode
};

}  // namespace navgym
