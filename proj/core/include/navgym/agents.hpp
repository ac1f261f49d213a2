#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "navgym/nn.hpp"
#include "navgym/replay.hpp"

namespace navgym::drl {

enum class Algorithm { kDDPG, kTD3, kSAC };

Algorithm algorithm_from_name(const std::string& name);
const char* algorithm_name(Algorithm a);

// How flat observation vectors map onto network inputs. Dense agents
// feed the whole vector; depth agents split it into an image part and
// the trailing goal-state part.
struct ObsLayout {
  bool multi_input = false;
  int img_width = 0;
  int img_height = 0;
  int state_dim = 2;  // trailing task-state components
  std::size_t total() const {
    return multi_input
               ? static_cast<std::size_t>(img_width) * img_height + state_dim
               : static_cast<std::size_t>(state_dim);
  }
};

struct AgentConfig {
  Algorithm algorithm = Algorithm::kTD3;
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t batch_size = 64;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double exploration_noise_std = 0.1;  // DDPG/TD3 action noise

  // TD3
  int policy_delay = 2;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;

  // SAC
  bool auto_alpha = true;
  double init_alpha = 0.2;
  double alpha_lr = 3e-4;
  double target_entropy = 0.0;  // 0: use -action_dim

  // Network shapes
  std::vector<int> hidden = {256, 128};
  std::vector<nn::ConvLayerSpec> conv = {{8, 5, 3}, {16, 3, 2}};
  std::vector<int> state_branch = {32};
  std::uint64_t init_seed = 0;
};

enum class ActionMode { kTrain, kEval };

// eps_t = eps_min + (eps0 - eps_min) * decay^t; never drops below
// eps_min, so exploration persists for the whole run.
double epsilon_schedule(long env_step, double eps0, double eps_min,
                        double decay);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double alpha = 0.0;
  bool actor_updated = false;
};

class AgentError : public std::runtime_error {
 public:
  explicit AgentError(const std::string& m) : std::runtime_error(m) {}
};

// Off-policy continuous-control agent: one class, three update rules.
class Agent {
 public:
  Agent(const AgentConfig& config, const ObsLayout& layout,
        std::vector<double> action_low, std::vector<double> action_high);

  // Train mode: with probability eps a uniform random action, otherwise
  // the policy output plus exploration noise. Eval mode: deterministic
  // policy output (SAC: squashed mean). Always within limits.
  std::vector<double> select_action(const std::vector<double>& obs,
                                    ActionMode mode, double eps,
                                    std::mt19937_64& rng);

  // One gradient update from a sampled batch; returns new priorities via
  // the buffer when it is prioritized.
  UpdateStats update(const SampledBatch& batch, ReplayBuffer& buffer,
                     std::mt19937_64& rng);

  int action_dim() const { return static_cast<int>(action_low_.size()); }
  const AgentConfig& config() const { return config_; }
  double alpha() const;
  long critic_updates() const { return critic_updates_; }

  nn::Network& actor() { return *actor_; }
  nn::Network& critic1() { return *critic1_; }

  nlohmann::json to_json();
  void load_json(const nlohmann::json& j);

 private:
  nn::Matrix obs_image_part(const std::vector<const std::vector<double>*>& obs) const;
  nn::Matrix obs_state_part(const std::vector<const std::vector<double>*>& obs,
                            const std::vector<std::vector<double>>* actions) const;
  nn::Matrix critic_forward(nn::Network& critic,
                            const std::vector<const std::vector<double>*>& obs,
                            const std::vector<std::vector<double>>& actions);
  std::vector<double> policy_eval_single(const std::vector<double>& obs);

  AgentConfig config_;
  ObsLayout layout_;
  std::vector<double> action_low_, action_high_;
  double log_alpha_ = 0.0;
  long critic_updates_ = 0;

  std::unique_ptr<nn::Network> actor_, actor_target_;
  std::unique_ptr<nn::Network> critic1_, critic2_;
  std::unique_ptr<nn::Network> critic1_target_, critic2_target_;
  std::unique_ptr<nn::Adam> actor_opt_, critic1_opt_, critic2_opt_;
};

}  // namespace navgym::drl
