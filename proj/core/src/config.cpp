#include "navgym/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace navgym {
namespace {

double get_d(const YAML::Node& n, const char* key, double fallback) {
  return n && n[key] ? n[key].as<double>() : fallback;
}
int get_i(const YAML::Node& n, const char* key, int fallback) {
  return n && n[key] ? n[key].as<int>() : fallback;
}
std::uint64_t get_u64(const YAML::Node& n, const char* key, std::uint64_t fb) {
  return n && n[key] ? n[key].as<std::uint64_t>() : fb;
}
std::string get_s(const YAML::Node& n, const char* key,
                  const std::string& fallback) {
  return n && n[key] ? n[key].as<std::string>() : fallback;
}
bool get_b(const YAML::Node& n, const char* key, bool fallback) {
  return n && n[key] ? n[key].as<bool>() : fallback;
}

Limit parse_limit(const YAML::Node& n, const char* key, Limit fallback,
                  const std::string& ctx) {
  if (!n || !n[key]) return fallback;
  const YAML::Node& l = n[key];
  if (!l.IsSequence() || l.size() != 2)
    throw ConfigError(ctx + "." + key + ": expected [min, max]");
  Limit out{l[0].as<double>(), l[1].as<double>()};
  if (!(out.min < out.max))
    throw ConfigError(ctx + "." + key + ": min must be less than max");
  return out;
}

PlatformSpec parse_robot(const YAML::Node& n) {
  PlatformSpec p;
  const std::string drive = get_s(n, "drive_type", "differential");
  if (drive == "differential") p.drive_type = DriveType::kDifferential;
  else if (drive == "omnidirectional") p.drive_type = DriveType::kOmnidirectional;
  else throw ConfigError("robot.drive_type: expected differential or omnidirectional");
  p.v_x_limits = parse_limit(n, "v_x_limits", p.v_x_limits, "robot");
  p.v_y_limits = parse_limit(n, "v_y_limits", p.v_y_limits, "robot");
  p.omega_limits = parse_limit(n, "omega_limits", p.omega_limits, "robot");

  if (n && n["footprint"]) {
    const YAML::Node& f = n["footprint"];
    const std::string shape = get_s(f, "shape", "circle");
    if (shape == "circle") {
      p.footprint.shape = Footprint::Shape::kCircle;
      p.footprint.radius = get_d(f, "radius", p.footprint.radius);
      if (p.footprint.radius <= 0.0)
        throw ConfigError("robot.footprint.radius must be > 0");
    } else if (shape == "rectangle") {
      p.footprint.shape = Footprint::Shape::kRectangle;
      p.footprint.length = get_d(f, "length", p.footprint.length);
      p.footprint.width = get_d(f, "width", p.footprint.width);
      if (p.footprint.length <= 0.0 || p.footprint.width <= 0.0)
        throw ConfigError("robot.footprint: length and width must be > 0");
    } else {
      throw ConfigError("robot.footprint.shape: expected circle or rectangle");
    }
    p.footprint.collision_tolerance = get_d(f, "collision_tolerance", 0.0);
    if (p.footprint.collision_tolerance < 0.0)
      throw ConfigError("robot.footprint.collision_tolerance must be >= 0");
  }
  return p;
}

SensorConfig parse_sensors(const YAML::Node& n) {
  SensorConfig s;
  const std::string kind = get_s(n, "kind", "lidar");
  if (kind == "lidar") s.kind = SensorKind::kLidar;
  else if (kind == "depth") s.kind = SensorKind::kDepth;
  else throw ConfigError("sensors.kind: expected lidar or depth");
  if (n && n["lidar"]) {
    const YAML::Node& l = n["lidar"];
    s.lidar.n_ranges = get_i(l, "n_ranges", s.lidar.n_ranges);
    s.lidar.fov = get_d(l, "fov", s.lidar.fov);
    s.lidar.max_distance = get_d(l, "max_distance", s.lidar.max_distance);
    s.lidar.noise_std = get_d(l, "noise_std", 0.0);
    if (s.lidar.n_ranges < 2) throw ConfigError("sensors.lidar.n_ranges must be >= 2");
    if (!(s.lidar.fov > 0.0 && s.lidar.fov <= 2.0 * M_PI + 1e-12))
      throw ConfigError("sensors.lidar.fov must be in (0, 2*pi]");
    if (s.lidar.max_distance <= 0.0)
      throw ConfigError("sensors.lidar.max_distance must be > 0");
  }
  if (n && n["depth"]) {
    const YAML::Node& d = n["depth"];
    s.depth.width = get_i(d, "width", s.depth.width);
    s.depth.height = get_i(d, "height", s.depth.height);
    s.depth.h_fov = get_d(d, "h_fov", s.depth.h_fov);
    s.depth.v_fov = get_d(d, "v_fov", s.depth.v_fov);
    s.depth.max_depth = get_d(d, "max_depth", s.depth.max_depth);
    s.depth.mount_height = get_d(d, "mount_height", s.depth.mount_height);
    s.depth.noise_std = get_d(d, "noise_std", 0.0);
    s.depth_out_width = get_i(d, "out_width", 0);
    s.depth_out_height = get_i(d, "out_height", 0);
    if (s.depth.width < 1 || s.depth.height < 1)
      throw ConfigError("sensors.depth: width and height must be >= 1");
    if (!(s.depth.h_fov > 0.0 && s.depth.h_fov < M_PI) ||
        !(s.depth.v_fov > 0.0 && s.depth.v_fov < M_PI))
      throw ConfigError("sensors.depth: fovs must be in (0, pi)");
    if (s.depth.max_depth <= 0.0)
      throw ConfigError("sensors.depth.max_depth must be > 0");
    if (s.depth_out_width > 0 &&
        (s.depth.width % s.depth_out_width != 0 ||
         s.depth.height % s.depth_out_height != 0))
      throw ConfigError("sensors.depth: out resolution must divide input resolution");
  }
  return s;
}

EpisodeConfig parse_episode(const YAML::Node& n) {
  EpisodeConfig e;
  e.max_steps = get_i(n, "max_steps", e.max_steps);
  e.dt = get_d(n, "dt", e.dt);
  e.goal_threshold = get_d(n, "goal_threshold", e.goal_threshold);
  e.curriculum_stage_episodes =
      get_i(n, "curriculum_stage_episodes", e.curriculum_stage_episodes);
  e.seed = get_u64(n, "seed", 0);
  if (e.max_steps < 1) throw ConfigError("episode.max_steps must be >= 1");
  if (e.goal_threshold <= 0.0)
    throw ConfigError("episode.goal_threshold must be > 0");
  if (e.dt <= 0.0) throw ConfigError("episode.dt must be > 0");
  if (n && n["stages"]) {
    for (const YAML::Node& st : n["stages"]) {
      CurriculumStage stage;
      stage.spawn_region = get_s(st, "spawn", "");
      stage.goal_region = get_s(st, "goal", "");
      if (stage.spawn_region.empty() || stage.goal_region.empty())
        throw ConfigError("episode.stages: each stage needs spawn and goal");
      e.stages.push_back(stage);
    }
  }
  return e;
}

RewardSpec parse_reward(const YAML::Node& n) {
  RewardSpec r;
  r.r_goal = get_d(n, "r_goal", r.r_goal);
  r.r_collision = get_d(n, "r_collision", r.r_collision);
  r.dense_coefficient = get_d(n, "dense_coefficient", r.dense_coefficient);
  if (!(r.r_goal > 0.0) || !(r.r_collision < 0.0))
    throw ConfigError("reward: r_goal must be > 0 and r_collision < 0");
  return r;
}

drl::TrainerConfig parse_training(const YAML::Node& n) {
  drl::TrainerConfig t;
  try {
    t.agent.algorithm = drl::algorithm_from_name(get_s(n, "algorithm", "td3"));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("training.algorithm: ") + e.what());
  }
  t.agent.gamma = get_d(n, "gamma", t.agent.gamma);
  if (!(t.agent.gamma >= 0.0 && t.agent.gamma < 1.0))
    throw ConfigError("training.gamma must be in [0, 1)");
  t.agent.tau = get_d(n, "tau", t.agent.tau);
  t.agent.batch_size = static_cast<std::size_t>(
      get_i(n, "batch_size", static_cast<int>(t.agent.batch_size)));
  t.agent.actor_lr = get_d(n, "actor_lr", t.agent.actor_lr);
  t.agent.critic_lr = get_d(n, "critic_lr", t.agent.critic_lr);
  t.agent.exploration_noise_std =
      get_d(n, "exploration_noise_std", t.agent.exploration_noise_std);
  t.agent.policy_delay = get_i(n, "policy_delay", t.agent.policy_delay);
  t.agent.target_noise_std =
      get_d(n, "target_noise_std", t.agent.target_noise_std);
  t.agent.target_noise_clip =
      get_d(n, "target_noise_clip", t.agent.target_noise_clip);
  t.agent.auto_alpha = get_b(n, "auto_alpha", t.agent.auto_alpha);
  t.agent.init_alpha = get_d(n, "init_alpha", t.agent.init_alpha);
  t.agent.alpha_lr = get_d(n, "alpha_lr", t.agent.alpha_lr);
  t.agent.target_entropy = get_d(n, "target_entropy", 0.0);
  if (n && n["hidden"]) t.agent.hidden = n["hidden"].as<std::vector<int>>();
  if (n && n["state_branch"])
    t.agent.state_branch = n["state_branch"].as<std::vector<int>>();
  if (n && n["conv"]) {
    t.agent.conv.clear();
    for (const YAML::Node& c : n["conv"])
      t.agent.conv.push_back({get_i(c, "out_channels", 8), get_i(c, "kernel", 3),
                              get_i(c, "stride", 2)});
  }

  const std::string buffer = get_s(n, "buffer", "uniform");
  if (buffer == "uniform") t.buffer.kind = drl::BufferKind::kUniform;
  else if (buffer == "prioritized") t.buffer.kind = drl::BufferKind::kPrioritized;
  else if (buffer == "n_step") t.buffer.kind = drl::BufferKind::kNStep;
  else throw ConfigError("training.buffer: expected uniform, prioritized, or n_step");
  t.buffer.capacity = static_cast<std::size_t>(
      get_i(n, "buffer_capacity", static_cast<int>(t.buffer.capacity)));
  t.buffer.alpha = get_d(n, "per_alpha", t.buffer.alpha);
  t.buffer.beta0 = get_d(n, "per_beta0", t.buffer.beta0);
  t.buffer.n = get_i(n, "n_step", t.buffer.n);
  if (t.buffer.n < 1) throw ConfigError("training.n_step must be >= 1");
  t.buffer.gamma = t.agent.gamma;

  t.warmup_steps = get_i(n, "warmup_steps", static_cast<int>(t.warmup_steps));
  t.eps0 = get_d(n, "eps0", t.eps0);
  t.eps_min = get_d(n, "eps_min", t.eps_min);
  t.eps_decay = get_d(n, "eps_decay", t.eps_decay);
  if (t.eps_min > t.eps0) throw ConfigError("training.eps_min must be <= eps0");
  if (!(t.eps_decay > 0.0 && t.eps_decay <= 1.0))
    throw ConfigError("training.eps_decay must be in (0, 1]");
  t.total_episodes = get_i(n, "total_episodes", t.total_episodes);
  t.checkpoint_every = get_i(n, "checkpoint_every", t.checkpoint_every);
  t.seed = get_u64(n, "seed", 0);
  t.agent.init_seed = t.seed;
  return t;
}

bench::BenchmarkSpec parse_test(const YAML::Node& n) {
  bench::BenchmarkSpec spec;
  spec.episodes_per_couple = get_i(n, "episodes_per_couple", 1);
  spec.agent_label = get_s(n, "agent_label", "agent");
  if (n && n["couples"]) {
    for (const YAML::Node& c : n["couples"]) {
      bench::StartGoalCouple couple;
      if (!c["start"] || !c["goal"])
        throw ConfigError("test.couples: each couple needs start and goal");
      const YAML::Node& s = c["start"];
      couple.start.x = s[0].as<double>();
      couple.start.y = s[1].as<double>();
      couple.start.theta = s.size() > 2 ? wrap_angle(s[2].as<double>()) : 0.0;
      couple.goal = {c["goal"][0].as<double>(), c["goal"][1].as<double>()};
      spec.couples.push_back(couple);
    }
  }
  return spec;
}

}  // namespace

NavEnv ExperimentConfig::make_env() const {
  return NavEnv(world, platform, sensors, episode, reward);
}

ExperimentConfig parse_experiment(const std::string& yaml_text,
                                  const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("parameters file parse error: ") + e.what());
  }
  if (!root.IsMap())
    throw ConfigError("parameters file: expected a top-level mapping");

  ExperimentConfig cfg;
  const YAML::Node& world_node = root["world"];
  if (!world_node || !world_node["path"])
    throw ConfigError("world.path is required");
  std::filesystem::path wp = world_node["path"].as<std::string>();
  if (wp.is_relative() && !base_dir.empty()) wp = base_dir / wp;
  cfg.world_path = wp.string();
  cfg.world = load_world(cfg.world_path);

  cfg.platform = parse_robot(root["robot"]);
  cfg.sensors = parse_sensors(root["sensors"]);
  cfg.episode = parse_episode(root["episode"]);
  cfg.reward = parse_reward(root["reward"]);
  cfg.training = parse_training(root["training"]);
  cfg.test = parse_test(root["test"]);

  for (const CurriculumStage& st : cfg.episode.stages) {
    if (!cfg.world.find_spawn(st.spawn_region))
      throw ConfigError("episode.stages: unknown spawn region '" +
                        st.spawn_region + "'");
    if (!cfg.world.find_goal(st.goal_region))
      throw ConfigError("episode.stages: unknown goal region '" +
                        st.goal_region + "'");
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameters file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str(),
                          std::filesystem::path(path).parent_path().string());
}

}  // namespace navgym
