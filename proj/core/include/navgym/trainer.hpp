#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navgym/agents.hpp"
#include "navgym/env.hpp"
#include "navgym/replay.hpp"

namespace navgym::drl {

struct TrainerConfig {
  AgentConfig agent;
  BufferConfig buffer;
  long warmup_steps = 1000;
  double eps0 = 1.0;
  double eps_min = 0.05;
  double eps_decay = 0.999;  // per environment step
  int total_episodes = 300;
  int checkpoint_every = 100;  // episodes; 0 disables periodic saves
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: keep logs in memory only
};

struct EpisodeLogRow {
  int episode = 0;
  int steps = 0;
  double undiscounted_return = 0.0;
  double discounted_return = 0.0;
  Outcome outcome = Outcome::kRunning;
  double epsilon = 0.0;
  double wall_seconds = 0.0;
};

// Builds the network input layout and action limits the environment
// implies for its platform and sensor selection.
ObsLayout layout_for_env(const NavEnv& env);
std::pair<std::vector<double>, std::vector<double>> action_limits_for_env(
    const NavEnv& env);
VelocityCommand command_from_action(const NavEnv& env,
                                    const std::vector<double>& action);

// Sequential trainer: warm-up with a uniform random policy, then one
// gradient update per environment step.
class Trainer {
 public:
  Trainer(NavEnv& env, const TrainerConfig& config);

  void run();
  // Runs a single training episode; exposed for fine-grained tests.
  EpisodeLogRow run_episode(int episode_index);

  Agent& agent() { return *agent_; }
  ReplayBuffer& buffer() { return buffer_; }
  long env_steps() const { return env_steps_; }
  long updates_done() const { return updates_done_; }
  const std::vector<EpisodeLogRow>& log() const { return log_; }

  nlohmann::json checkpoint_json() const;
  void save_checkpoint(const std::string& path) const;
  void load_checkpoint_state(const nlohmann::json& j);

  static std::string log_csv_header();
  static std::string log_csv_row(const EpisodeLogRow& row);

 private:
  NavEnv& env_;
  TrainerConfig config_;
  std::unique_ptr<Agent> agent_;
  ReplayBuffer buffer_;
  std::mt19937_64 rng_;
  long env_steps_ = 0;
  long updates_done_ = 0;
  int episodes_done_ = 0;
  std::vector<EpisodeLogRow> log_;
};

// Reconstructs an agent from a checkpoint written by save_checkpoint.
std::unique_ptr<Agent> load_agent_checkpoint(const std::string& path,
                                             const NavEnv& env);

nlohmann::json agent_config_to_json(const AgentConfig& c);
AgentConfig agent_config_from_json(const nlohmann::json& j);

}  // namespace navgym::drl
