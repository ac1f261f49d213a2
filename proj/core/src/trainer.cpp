#include "navgym/trainer.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace navgym::drl {

ObsLayout layout_for_env(const NavEnv& env) {
  ObsLayout layout;
  if (env.sensors().kind == SensorKind::kDepth) {
    layout.multi_input = true;
    const auto& s = env.sensors();
    layout.img_width = s.depth_out_width > 0 ? s.depth_out_width : s.depth.width;
    layout.img_height =
        s.depth_out_height > 0 ? s.depth_out_height : s.depth.height;
    layout.state_dim = 2;
  } else {
    layout.multi_input = false;
    layout.state_dim = static_cast<int>(env.observation_size());
  }
  return layout;
}

std::pair<std::vector<double>, std::vector<double>> action_limits_for_env(
    const NavEnv& env) {
  const PlatformSpec& p = env.platform();
  std::vector<double> low{p.v_x_limits.min};
  std::vector<double> high{p.v_x_limits.max};
  if (p.drive_type == DriveType::kOmnidirectional) {
    low.push_back(p.v_y_limits.min);
    high.push_back(p.v_y_limits.max);
  }
  low.push_back(p.omega_limits.min);
  high.push_back(p.omega_limits.max);
  return {low, high};
}

VelocityCommand command_from_action(const NavEnv& env,
                                    const std::vector<double>& action) {
  VelocityCommand cmd;
  cmd.v_x = action[0];
  if (env.platform().drive_type == DriveType::kOmnidirectional) {
    cmd.v_y = action[1];
    cmd.omega = action[2];
  } else {
    cmd.omega = action[1];
  }
  return cmd;
}

Trainer::Trainer(NavEnv& env, const TrainerConfig& config)
    : env_(env), config_(config), buffer_(config.buffer), rng_(config.seed) {
  auto [low, high] = action_limits_for_env(env);
  agent_ = std::make_unique<Agent>(config_.agent, layout_for_env(env),
                                   std::move(low), std::move(high));
}

EpisodeLogRow Trainer::run_episode(int episode_index) {
  const auto t0 = std::chrono::steady_clock::now();
  Observation obs = env_.reset(episode_index);
  std::vector<double> state = obs.flat();

  EpisodeLogRow row;
  row.episode = episode_index;
  double discount = 1.0;
  const auto [low, high] = action_limits_for_env(env_);

  while (true) {
    const double eps = epsilon_schedule(env_steps_, config_.eps0,
                                        config_.eps_min, config_.eps_decay);
    std::vector<double> action;
    if (env_steps_ < config_.warmup_steps) {
      action.resize(low.size());
      for (std::size_t i = 0; i < low.size(); ++i) {
        std::uniform_real_distribution<double> u(low[i], high[i]);
        action[i] = u(rng_);
      }
    } else {
      action = agent_->select_action(state, ActionMode::kTrain, eps, rng_);
    }

    const StepResult result = env_.step(command_from_action(env_, action));
    ++env_steps_;
    row.steps += 1;
    row.undiscounted_return += result.reward;
    row.discounted_return += discount * result.reward;
    discount *= config_.agent.gamma;
    row.epsilon = eps;

    Transition t;
    t.state = std::move(state);
    t.action = action;
    t.reward = result.reward;
    t.next_state = result.observation.flat();
    t.terminal = result.outcome == Outcome::kGoalReached ||
                 result.outcome == Outcome::kCollision;
    t.episode_end = result.done;
    buffer_.push(t);
    state = result.observation.flat();

    if (env_steps_ > config_.warmup_steps &&
        buffer_.size() >= config_.agent.batch_size) {
      agent_->update(buffer_.sample(config_.agent.batch_size, rng_), buffer_,
                     rng_);
      ++updates_done_;
    }

    if (result.done) {
      row.outcome = result.outcome;
      break;
    }
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return row;
}

std::string Trainer::log_csv_header() {
  // No wall-clock column: the log is bitwise reproducible for a fixed
  // config and seed.
  return "episode,steps,return,discounted_return,outcome,epsilon";
}

std::string Trainer::log_csv_row(const EpisodeLogRow& row) {
  std::ostringstream ss;
  ss.precision(17);
  ss << row.episode << ',' << row.steps << ',' << row.undiscounted_return << ','
     << row.discounted_return << ',' << outcome_name(row.outcome) << ','
     << row.epsilon;
  return ss.str();
}

void Trainer::run() {
  std::ofstream log_file;
  if (!config_.out_dir.empty()) {
    std::filesystem::create_directories(config_.out_dir);
    log_file.open(config_.out_dir + "/training_log.csv");
    log_file << log_csv_header() << '\n';
  }
  for (int ep = 0; ep < config_.total_episodes; ++ep) {
    const EpisodeLogRow row = run_episode(ep);
    log_.push_back(row);
    episodes_done_ = ep + 1;
    if (log_file) log_file << log_csv_row(row) << '\n';
    std::cout << "episode " << row.episode << " steps " << row.steps
              << " return " << row.undiscounted_return << " outcome "
              << outcome_name(row.outcome) << " eps " << row.epsilon << '\n';
    if (!config_.out_dir.empty() && config_.checkpoint_every > 0 &&
        (ep + 1) % config_.checkpoint_every == 0)
      save_checkpoint(config_.out_dir + "/checkpoint.json");
  }
  if (!config_.out_dir.empty())
    save_checkpoint(config_.out_dir + "/checkpoint.json");
}

nlohmann::json agent_config_to_json(const AgentConfig& c) {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(c.algorithm);
  j["gamma"] = c.gamma;
  j["tau"] = c.tau;
  j["batch_size"] = c.batch_size;
  j["actor_lr"] = c.actor_lr;
  j["critic_lr"] = c.critic_lr;
  j["exploration_noise_std"] = c.exploration_noise_std;
  j["policy_delay"] = c.policy_delay;
  j["target_noise_std"] = c.target_noise_std;
  j["target_noise_clip"] = c.target_noise_clip;
  j["auto_alpha"] = c.auto_alpha;
  j["init_alpha"] = c.init_alpha;
  j["alpha_lr"] = c.alpha_lr;
  j["target_entropy"] = c.target_entropy;
  j["hidden"] = c.hidden;
  j["conv"] = nlohmann::json::array();
  for (const auto& cs : c.conv)
    j["conv"].push_back({{"out_channels", cs.out_channels},
                         {"kernel", cs.kernel},
                         {"stride", cs.stride}});
  j["state_branch"] = c.state_branch;
  j["init_seed"] = c.init_seed;
  return j;
}

AgentConfig agent_config_from_json(const nlohmann::json& j) {
  AgentConfig c;
  c.algorithm = algorithm_from_name(j.at("algorithm"));
  c.gamma = j.at("gamma");
  c.tau = j.at("tau");
  c.batch_size = j.at("batch_size");
  c.actor_lr = j.at("actor_lr");
  c.critic_lr = j.at("critic_lr");
  c.exploration_noise_std = j.at("exploration_noise_std");
  c.policy_delay = j.at("policy_delay");
  c.target_noise_std = j.at("target_noise_std");
  c.target_noise_clip = j.at("target_noise_clip");
  c.auto_alpha = j.at("auto_alpha");
  c.init_alpha = j.at("init_alpha");
  c.alpha_lr = j.at("alpha_lr");
  c.target_entropy = j.at("target_entropy");
  c.hidden = j.at("hidden").get<std::vector<int>>();
  c.conv.clear();
  for (const auto& cs : j.at("conv"))
    c.conv.push_back({cs.at("out_channels"), cs.at("kernel"), cs.at("stride")});
  c.state_branch = j.at("state_branch").get<std::vector<int>>();
  c.init_seed = j.at("init_seed");
  return c;
}

nlohmann::json Trainer::checkpoint_json() const {
  nlohmann::json j;
  j["format"] = "navgym-checkpoint";
  j["version"] = 1;
  j["agent_config"] = agent_config_to_json(config_.agent);
  j["agent"] = agent_->to_json();
  j["episodes_done"] = episodes_done_;
  j["env_steps"] = env_steps_;
  std::ostringstream rng_state;
  rng_state << rng_;
  j["rng_state"] = rng_state.str();
  return j;
}

void Trainer::save_checkpoint(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw AgentError("cannot write checkpoint: " + path);
  out << checkpoint_json().dump();
}

void Trainer::load_checkpoint_state(const nlohmann::json& j) {
  agent_->load_json(j.at("agent"));
  episodes_done_ = j.at("episodes_done");
  env_steps_ = j.at("env_steps");
  std::istringstream rng_state(j.at("rng_state").get<std::string>());
  rng_state >> rng_;
}

std::unique_ptr<Agent> load_agent_checkpoint(const std::string& path,
                                             const NavEnv& env) {
  std::ifstream in(path);
  if (!in) throw AgentError("cannot open checkpoint: " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "navgym-checkpoint")
    throw AgentError("not a checkpoint file: " + path);
  AgentConfig cfg = agent_config_from_json(j.at("agent_config"));
  auto [low, high] = action_limits_for_env(env);
  auto agent = std::make_unique<Agent>(cfg, layout_for_env(env),
                                       std::move(low), std::move(high));
  agent->load_json(j.at("agent"));
  return agent;
}

}  // namespace navgym::drl
