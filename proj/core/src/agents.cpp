#include "navgym/agents.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace navgym::drl {
namespace {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw AgentError(std::string("non-finite ") + what + " during update");
}

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ddpg") return Algorithm::kDDPG;
  if (name == "td3") return Algorithm::kTD3;
  if (name == "sac") return Algorithm::kSAC;
  throw AgentError("unknown algorithm: " + name);
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kDDPG: return "ddpg";
    case Algorithm::kTD3: return "td3";
    case Algorithm::kSAC: return "sac";
  }
  return "unknown";
}

double epsilon_schedule(long env_step, double eps0, double eps_min,
                        double decay) {
  return eps_min + (eps0 - eps_min) * std::pow(decay, static_cast<double>(env_step));
}

Agent::Agent(const AgentConfig& config, const ObsLayout& layout,
             std::vector<double> action_low, std::vector<double> action_high)
    : config_(config), layout_(layout), action_low_(std::move(action_low)),
      action_high_(std::move(action_high)) {
  const int act_dim = static_cast<int>(action_low_.size());
  log_alpha_ = std::log(config_.init_alpha);
  if (config_.target_entropy == 0.0) config_.target_entropy = -act_dim;

  auto base_spec = [&](int extra_state, std::uint64_t seed) {
    nn::NetworkSpec s;
    if (layout_.multi_input) {
      s.arch = nn::NetworkSpec::Arch::kMultiInput;
      s.img_width = layout_.img_width;
      s.img_height = layout_.img_height;
      s.img_channels = 1;
      s.conv = config_.conv;
      s.state_dim = layout_.state_dim + extra_state;
      s.state_branch = config_.state_branch;
    } else {
      s.arch = nn::NetworkSpec::Arch::kDense;
      s.input_dim = static_cast<int>(layout_.total()) + extra_state;
    }
    s.hidden = config_.hidden;
    s.init_seed = seed;
    return s;
  };

  nn::NetworkSpec actor_spec = base_spec(0, config_.init_seed + 1);
  actor_spec.output_dim = act_dim;
  if (config_.algorithm == Algorithm::kSAC) {
    actor_spec.head = nn::NetworkSpec::Head::kGaussian;
  } else {
    actor_spec.head = nn::NetworkSpec::Head::kTanhScaled;
    actor_spec.out_low = action_low_;
    actor_spec.out_high = action_high_;
    actor_spec.small_final_init = true;
  }
  actor_ = std::make_unique<nn::Network>(actor_spec);
  if (config_.algorithm != Algorithm::kSAC)
    actor_target_ = std::make_unique<nn::Network>(*actor_);

  auto make_critic = [&](std::uint64_t seed) {
    nn::NetworkSpec s = base_spec(act_dim, seed);
    s.output_dim = 1;
    s.head = nn::NetworkSpec::Head::kLinear;
    return std::make_unique<nn::Network>(s);
  };
  critic1_ = make_critic(config_.init_seed + 2);
  critic1_target_ = std::make_unique<nn::Network>(*critic1_);
  if (config_.algorithm != Algorithm::kDDPG) {
    critic2_ = make_critic(config_.init_seed + 3);
    critic2_target_ = std::make_unique<nn::Network>(*critic2_);
  }

  actor_opt_ = std::make_unique<nn::Adam>(config_.actor_lr);
  critic1_opt_ = std::make_unique<nn::Adam>(config_.critic_lr);
  if (critic2_) critic2_opt_ = std::make_unique<nn::Adam>(config_.critic_lr);
}

double Agent::alpha() const { return std::exp(log_alpha_); }

nn::Matrix Agent::obs_image_part(
    const std::vector<const std::vector<double>*>& obs) const {
  const int pixels = layout_.img_width * layout_.img_height;
  nn::Matrix m(static_cast<int>(obs.size()), pixels);
  for (std::size_t n = 0; n < obs.size(); ++n)
    std::copy_n(obs[n]->data(), pixels, m.a.data() + n * pixels);
  return m;
}

nn::Matrix Agent::obs_state_part(
    const std::vector<const std::vector<double>*>& obs,
    const std::vector<std::vector<double>>* actions) const {
  const int act_extra = actions ? action_dim() : 0;
  int base;
  std::size_t offset;
  if (layout_.multi_input) {
    base = layout_.state_dim;
    offset = static_cast<std::size_t>(layout_.img_width) * layout_.img_height;
  } else {
    base = static_cast<int>(obs[0]->size());
    offset = 0;
  }
  nn::Matrix m(static_cast<int>(obs.size()), base + act_extra);
  for (std::size_t n = 0; n < obs.size(); ++n) {
    for (int c = 0; c < base; ++c) m(static_cast<int>(n), c) = (*obs[n])[offset + c];
    for (int c = 0; c < act_extra; ++c)
      m(static_cast<int>(n), base + c) = (*actions)[n][c];
  }
  return m;
}

nn::Matrix Agent::critic_forward(
    nn::Network& critic, const std::vector<const std::vector<double>*>& obs,
    const std::vector<std::vector<double>>& actions) {
  if (layout_.multi_input)
    return critic.forward(obs_image_part(obs), obs_state_part(obs, &actions));
  return critic.forward(obs_state_part(obs, &actions));
}

namespace {

nn::Matrix actor_forward(nn::Network& actor, bool multi,
                         const nn::Matrix& img, const nn::Matrix& state) {
  return multi ? actor.forward(img, state) : actor.forward(state);
}

}  // namespace

std::vector<double> Agent::policy_eval_single(const std::vector<double>& obs) {
  std::vector<const std::vector<double>*> one{&obs};
  nn::Matrix img, state;
  if (layout_.multi_input) img = obs_image_part(one);
  state = obs_state_part(one, nullptr);
  nn::Matrix out = actor_forward(*actor_, layout_.multi_input, img, state);
  const int act_dim = action_dim();
  std::vector<double> a(act_dim);
  if (config_.algorithm == Algorithm::kSAC) {
    for (int i = 0; i < act_dim; ++i) {
      const double mid = 0.5 * (action_low_[i] + action_high_[i]);
      const double half = 0.5 * (action_high_[i] - action_low_[i]);
      a[i] = mid + half * std::tanh(out(0, i));
    }
  } else {
    for (int i = 0; i < act_dim; ++i) a[i] = out(0, i);
  }
  return a;
}

std::vector<double> Agent::select_action(const std::vector<double>& obs,
                                         ActionMode mode, double eps,
                                         std::mt19937_64& rng) {
  const int act_dim = action_dim();
  if (mode == ActionMode::kEval) return policy_eval_single(obs);

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  if (u01(rng) < eps) {
    std::vector<double> a(act_dim);
    for (int i = 0; i < act_dim; ++i) {
      std::uniform_real_distribution<double> ua(action_low_[i], action_high_[i]);
      a[i] = ua(rng);
    }
    return a;
  }

  std::vector<const std::vector<double>*> one{&obs};
  nn::Matrix img, state;
  if (layout_.multi_input) img = obs_image_part(one);
  state = obs_state_part(one, nullptr);
  nn::Matrix out = actor_forward(*actor_, layout_.multi_input, img, state);

  std::vector<double> a(act_dim);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < act_dim; ++i) {
    const double mid = 0.5 * (action_low_[i] + action_high_[i]);
    const double half = 0.5 * (action_high_[i] - action_low_[i]);
    if (config_.algorithm == Algorithm::kSAC) {
      const double mean = out(0, i);
      const double log_std =
          std::clamp(out(0, act_dim + i), kLogStdMin, kLogStdMax);
      const double pre = mean + std::exp(log_std) * n01(rng);
      a[i] = mid + half * std::tanh(pre);
    } else {
      a[i] = out(0, i) + config_.exploration_noise_std * half * n01(rng);
    }
    a[i] = std::clamp(a[i], action_low_[i], action_high_[i]);
  }
  return a;
}

UpdateStats Agent::update(const SampledBatch& batch, ReplayBuffer& buffer,
                          std::mt19937_64& rng) {
  const int act_dim = action_dim();
  const int n = static_cast<int>(batch.transitions.size());
  std::vector<const std::vector<double>*> states, next_states;
  std::vector<std::vector<double>> actions;
  states.reserve(n);
  next_states.reserve(n);
  actions.reserve(n);
  for (const Transition& t : batch.transitions) {
    states.push_back(&t.state);
    next_states.push_back(&t.next_state);
    actions.push_back(t.action);
  }

  // ---- TD targets ----
  std::vector<double> targets(n);
  {
    nn::Matrix next_img, next_state_in;
    if (layout_.multi_input) next_img = obs_image_part(next_states);
    next_state_in = obs_state_part(next_states, nullptr);

    std::vector<std::vector<double>> next_actions(n, std::vector<double>(act_dim));
    std::vector<double> next_logp(n, 0.0);
    if (config_.algorithm == Algorithm::kSAC) {
      nn::Matrix out =
          actor_forward(*actor_, layout_.multi_input, next_img, next_state_in);
      std::normal_distribution<double> n01(0.0, 1.0);
      for (int k = 0; k < n; ++k) {
        double logp = 0.0;
        for (int i = 0; i < act_dim; ++i) {
          const double mid = 0.5 * (action_low_[i] + action_high_[i]);
          const double half = 0.5 * (action_high_[i] - action_low_[i]);
          const double mean = out(k, i);
          const double log_std =
              std::clamp(out(k, act_dim + i), kLogStdMin, kLogStdMax);
          const double std = std::exp(log_std);
          const double xi = n01(rng);
          const double pre = mean + std * xi;
          const double u = std::tanh(pre);
          next_actions[k][i] = mid + half * u;
          logp += -0.5 * std::log(2.0 * M_PI) - log_std - 0.5 * xi * xi -
                  std::log(1.0 - u * u + kSquashEps) - std::log(half);
        }
        next_logp[k] = logp;
      }
    } else {
      nn::Matrix out = actor_forward(*actor_target_, layout_.multi_input,
                                     next_img, next_state_in);
      std::normal_distribution<double> tnoise(0.0, config_.target_noise_std);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < act_dim; ++i) {
          double a = out(k, i);
          if (config_.algorithm == Algorithm::kTD3) {
            const double half = 0.5 * (action_high_[i] - action_low_[i]);
            const double noise =
                std::clamp(tnoise(rng), -config_.target_noise_clip,
                           config_.target_noise_clip);
            a += noise * half;
          }
          next_actions[k][i] = std::clamp(a, action_low_[i], action_high_[i]);
        }
    }

    nn::Matrix q1 = critic_forward(*critic1_target_, next_states, next_actions);
    std::vector<double> q_next(n);
    for (int k = 0; k < n; ++k) q_next[k] = q1(k, 0);
    if (critic2_target_) {
      nn::Matrix q2 =
          critic_forward(*critic2_target_, next_states, next_actions);
      for (int k = 0; k < n; ++k) q_next[k] = std::min(q_next[k], q2(k, 0));
    }
    const double alpha_now = alpha();
    for (int k = 0; k < n; ++k) {
      const Transition& t = batch.transitions[k];
      double boot = q_next[k];
      if (config_.algorithm == Algorithm::kSAC)
        boot -= alpha_now * next_logp[k];
      const double discount = std::pow(config_.gamma, t.n_steps);
      targets[k] = t.reward + (t.terminal ? 0.0 : discount * boot);
    }
  }

  // ---- Critic regression ----
  UpdateStats stats;
  std::vector<double> td_errors(n);
  auto critic_step = [&](nn::Network& critic, nn::Adam& opt, bool record) {
    nn::Matrix q = critic_forward(critic, states, actions);
    nn::Matrix gq(n, 1);
    double loss = 0.0;
    for (int k = 0; k < n; ++k) {
      const double err = q(k, 0) - targets[k];
      const double w = batch.weights[k];
      loss += w * err * err;
      gq(k, 0) = 2.0 * w * err / n;
      if (record) td_errors[k] = err;
    }
    loss /= n;
    check_finite(loss, "critic loss");
    critic.zero_grad();
    critic.backward(gq);
    opt.step(critic);
    return loss;
  };
  stats.critic_loss = critic_step(*critic1_, *critic1_opt_, true);
  if (critic2_) critic_step(*critic2_, *critic2_opt_, false);
  ++critic_updates_;
  buffer.update_priorities(batch.indices, td_errors);

  // ---- Actor ----
  const bool delayed = config_.algorithm == Algorithm::kTD3;
  const bool do_actor = !delayed || (critic_updates_ % config_.policy_delay == 0);
  stats.actor_updated = do_actor;
  if (do_actor) {
    nn::Matrix img, state_in;
    if (layout_.multi_input) img = obs_image_part(states);
    state_in = obs_state_part(states, nullptr);

    if (config_.algorithm == Algorithm::kSAC) {
      nn::Matrix out = actor_forward(*actor_, layout_.multi_input, img, state_in);
      std::normal_distribution<double> n01(0.0, 1.0);
      std::vector<std::vector<double>> new_actions(n, std::vector<double>(act_dim));
      std::vector<double> xi(n * act_dim), uval(n * act_dim), stdv(n * act_dim);
      std::vector<bool> clamped(n * act_dim);
      std::vector<double> logp(n, 0.0);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < act_dim; ++i) {
          const double mid = 0.5 * (action_low_[i] + action_high_[i]);
          const double half = 0.5 * (action_high_[i] - action_low_[i]);
          const double raw_log_std = out(k, act_dim + i);
          const bool cl = raw_log_std < kLogStdMin || raw_log_std > kLogStdMax;
          const double log_std = std::clamp(raw_log_std, kLogStdMin, kLogStdMax);
          const double std = std::exp(log_std);
          const double x = n01(rng);
          const double pre = out(k, i) + std * x;
          const double u = std::tanh(pre);
          const std::size_t idx = static_cast<std::size_t>(k) * act_dim + i;
          xi[idx] = x;
          uval[idx] = u;
          stdv[idx] = std;
          clamped[idx] = cl;
          new_actions[k][i] = mid + half * u;
          logp[k] += -0.5 * std::log(2.0 * M_PI) - log_std - 0.5 * x * x -
                     std::log(1.0 - u * u + kSquashEps) - std::log(half);
        }

      // dQmin/da via the critic that attains the per-sample minimum.
      nn::Matrix q1 = critic_forward(*critic1_, states, new_actions);
      nn::Matrix q2 = critic_forward(*critic2_, states, new_actions);
      nn::Matrix g1(n, 1), g2(n, 1);
      double qmin_mean = 0.0;
      for (int k = 0; k < n; ++k) {
        const bool use1 = q1(k, 0) <= q2(k, 0);
        qmin_mean += use1 ? q1(k, 0) : q2(k, 0);
        (use1 ? g1 : g2)(k, 0) = 1.0;
      }
      qmin_mean /= n;
      critic1_->zero_grad();
      critic2_->zero_grad();
      nn::Matrix in_g1 = critic1_->backward(g1);
      nn::Matrix in_g2 = critic2_->backward(g2);
      const int act_off = in_g1.cols - act_dim;  // action columns at the end

      const double alpha_now = alpha();
      nn::Matrix gout(n, 2 * act_dim);
      double actor_loss = 0.0;
      for (int k = 0; k < n; ++k) {
        actor_loss += alpha_now * logp[k];
        for (int i = 0; i < act_dim; ++i) {
          const std::size_t idx = static_cast<std::size_t>(k) * act_dim + i;
          const double half = 0.5 * (action_high_[i] - action_low_[i]);
          const double u = uval[idx];
          const double one_m_u2 = 1.0 - u * u;
          const double dq_da = in_g1(k, act_off + i) + in_g2(k, act_off + i);
          const double dlogp_dpre =
              2.0 * u * one_m_u2 / (one_m_u2 + kSquashEps);
          // d(alpha logp - Q)/d mean
          const double da_dpre = half * one_m_u2;
          double g_mean = (alpha_now * dlogp_dpre - dq_da * da_dpre) / n;
          // d/d log_std: pre depends as sigma*xi; plus the -log_std term
          double g_ls = 0.0;
          if (!clamped[idx]) {
            g_ls = (alpha_now * (dlogp_dpre * stdv[idx] * xi[idx] - 1.0) -
                    dq_da * da_dpre * stdv[idx] * xi[idx]) / n;
          }
          gout(k, i) = g_mean;
          gout(k, act_dim + i) = g_ls;
        }
      }
      actor_loss = actor_loss / n - qmin_mean;
      check_finite(actor_loss, "actor loss");
      stats.actor_loss = actor_loss;

      actor_->zero_grad();
      actor_forward(*actor_, layout_.multi_input, img, state_in);  // fresh cache
      actor_->backward(gout);
      actor_opt_->step(*actor_);

      if (config_.auto_alpha) {
        double mean_term = 0.0;
        for (int k = 0; k < n; ++k) mean_term += logp[k] + config_.target_entropy;
        mean_term /= n;
        log_alpha_ += config_.alpha_lr * mean_term;
        check_finite(log_alpha_, "temperature");
      }
    } else {
      nn::Matrix a = actor_forward(*actor_, layout_.multi_input, img, state_in);
      std::vector<std::vector<double>> new_actions(n, std::vector<double>(act_dim));
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < act_dim; ++i) new_actions[k][i] = a(k, i);
      nn::Matrix q = critic_forward(*critic1_, states, new_actions);
      double actor_loss = 0.0;
      nn::Matrix gq(n, 1);
      for (int k = 0; k < n; ++k) {
        actor_loss -= q(k, 0);
        gq(k, 0) = -1.0 / n;
      }
      actor_loss /= n;
      check_finite(actor_loss, "actor loss");
      stats.actor_loss = actor_loss;
      critic1_->zero_grad();
      nn::Matrix in_g = critic1_->backward(gq);
      const int act_off = in_g.cols - act_dim;
      nn::Matrix ga(n, act_dim);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < act_dim; ++i) ga(k, i) = in_g(k, act_off + i);
      actor_->zero_grad();
      actor_->backward(ga);
      actor_opt_->step(*actor_);
    }
  }

  // ---- Target tracking ----
  if (config_.algorithm == Algorithm::kSAC) {
    soft_update(*critic1_target_, *critic1_, config_.tau);
    soft_update(*critic2_target_, *critic2_, config_.tau);
  } else if (config_.algorithm == Algorithm::kDDPG) {
    soft_update(*critic1_target_, *critic1_, config_.tau);
    soft_update(*actor_target_, *actor_, config_.tau);
  } else if (do_actor) {
    soft_update(*critic1_target_, *critic1_, config_.tau);
    soft_update(*critic2_target_, *critic2_, config_.tau);
    soft_update(*actor_target_, *actor_, config_.tau);
  }

  stats.alpha = alpha();
  return stats;
}

nlohmann::json Agent::to_json() {
  nlohmann::json j;
  j["algorithm"] = algorithm_name(config_.algorithm);
  j["log_alpha"] = log_alpha_;
  j["critic_updates"] = critic_updates_;
  j["action_low"] = action_low_;
  j["action_high"] = action_high_;
  j["actor"] = actor_->to_json();
  j["critic1"] = critic1_->to_json();
  j["critic1_target"] = critic1_target_->to_json();
  if (actor_target_) j["actor_target"] = actor_target_->to_json();
  if (critic2_) {
    j["critic2"] = critic2_->to_json();
    j["critic2_target"] = critic2_target_->to_json();
  }
  j["actor_opt"] = actor_opt_->to_json();
  j["critic1_opt"] = critic1_opt_->to_json();
  if (critic2_opt_) j["critic2_opt"] = critic2_opt_->to_json();
  return j;
}

void Agent::load_json(const nlohmann::json& j) {
  if (j.at("algorithm").get<std::string>() !=
      algorithm_name(config_.algorithm))
    throw AgentError("checkpoint algorithm does not match configuration");
  log_alpha_ = j.at("log_alpha");
  critic_updates_ = j.at("critic_updates");
  actor_->load_json(j.at("actor"));
  critic1_->load_json(j.at("critic1"));
  critic1_target_->load_json(j.at("critic1_target"));
  if (actor_target_) actor_target_->load_json(j.at("actor_target"));
  if (critic2_) {
    critic2_->load_json(j.at("critic2"));
    critic2_target_->load_json(j.at("critic2_target"));
  }
  actor_opt_->load_json(j.at("actor_opt"));
  critic1_opt_->load_json(j.at("critic1_opt"));
  if (critic2_opt_) critic2_opt_->load_json(j.at("critic2_opt"));
}

}  // namespace navgym::drl
