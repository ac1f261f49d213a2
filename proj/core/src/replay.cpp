#include "navgym/replay.hpp"

#include <algorithm>
#include <cmath>

namespace navgym::drl {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity) {
  std::size_t leaves = 1;
  while (leaves < capacity_) leaves <<= 1;
  tree_.assign(2 * leaves, 0.0);
}

void SumTree::set(std::size_t index, double priority) {
  std::size_t i = tree_.size() / 2 + index;
  tree_[i] = priority;
  for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

double SumTree::get(std::size_t index) const {
  return tree_[tree_.size() / 2 + index];
}

double SumTree::total() const { return tree_[1]; }

std::size_t SumTree::find(double mass) const {
  std::size_t i = 1;
  const std::size_t leaves = tree_.size() / 2;
  while (i < leaves) {
    if (mass < tree_[2 * i] || tree_[2 * i + 1] == 0.0) {
      i = 2 * i;
    } else {
      mass -= tree_[2 * i];
      i = 2 * i + 1;
    }
  }
  return i - leaves;
}

ReplayBuffer::ReplayBuffer(const BufferConfig& config)
    : config_(config), tree_(config.capacity) {
  data_.reserve(std::min<std::size_t>(config.capacity, 1 << 20));
}

void ReplayBuffer::store(Transition t) {
  if (data_.size() < config_.capacity) {
    data_.push_back(std::move(t));
    tree_.set(data_.size() - 1, std::pow(max_priority_, config_.alpha));
  } else {
    data_[next_] = std::move(t);
    tree_.set(next_, std::pow(max_priority_, config_.alpha));
    next_ = (next_ + 1) % config_.capacity;
  }
}

void ReplayBuffer::push(const Transition& t) {
  if (config_.kind != BufferKind::kNStep) {
    store(t);
    return;
  }
  pending_.push_back(t);
  if (static_cast<int>(pending_.size()) == config_.n) {
    // Fold the window into one n-step transition.
    Transition folded = pending_.front();
    double discount = 1.0;
    folded.reward = 0.0;
    for (const Transition& p : pending_) {
      folded.reward += discount * p.reward;
      discount *= config_.gamma;
    }
    folded.next_state = pending_.back().next_state;
    folded.terminal = pending_.back().terminal;
    folded.episode_end = pending_.back().episode_end;
    folded.n_steps = static_cast<int>(pending_.size());
    store(std::move(folded));
    pending_.pop_front();
  }
  if (t.episode_end) end_episode();
}

void ReplayBuffer::end_episode() {
  // Remaining windows are truncated at the episode boundary.
  while (!pending_.empty()) {
    Transition folded = pending_.front();
    double discount = 1.0;
    folded.reward = 0.0;
    for (const Transition& p : pending_) {
      folded.reward += discount * p.reward;
      discount *= config_.gamma;
    }
    folded.next_state = pending_.back().next_state;
    folded.terminal = pending_.back().terminal;
    folded.episode_end = pending_.back().episode_end;
    folded.n_steps = static_cast<int>(pending_.size());
    store(std::move(folded));
    pending_.pop_front();
  }
}

double ReplayBuffer::beta() const {
  if (config_.beta_anneal_steps == 0) return config_.beta_final;
  const double frac =
      std::min(1.0, static_cast<double>(sample_calls_) /
                        static_cast<double>(config_.beta_anneal_steps));
  return config_.beta0 + frac * (config_.beta_final - config_.beta0);
}

SampledBatch ReplayBuffer::sample(std::size_t batch_size,
                                  std::mt19937_64& rng) {
  if (data_.size() < batch_size)
    throw BufferError("replay buffer holds fewer transitions than batch size");
  SampledBatch batch;
  batch.transitions.reserve(batch_size);
  batch.indices.reserve(batch_size);
  batch.weights.reserve(batch_size);
  if (config_.kind == BufferKind::kPrioritized) {
    const double b = beta();
    ++sample_calls_;
    std::uniform_real_distribution<double> u(0.0, tree_.total());
    const double n = static_cast<double>(data_.size());
    double max_weight = 0.0;
    for (std::size_t k = 0; k < batch_size; ++k) {
      std::size_t idx = tree_.find(u(rng));
      idx = std::min(idx, data_.size() - 1);
      batch.indices.push_back(idx);
      batch.transitions.push_back(data_[idx]);
      const double p = tree_.get(idx) / tree_.total();
      const double w = std::pow(n * p, -b);
      batch.weights.push_back(w);
      max_weight = std::max(max_weight, w);
    }
    for (double& w : batch.weights) w /= max_weight;
  } else {
    std::uniform_int_distribution<std::size_t> u(0, data_.size() - 1);
    for (std::size_t k = 0; k < batch_size; ++k) {
      const std::size_t idx = u(rng);
      batch.indices.push_back(idx);
      batch.transitions.push_back(data_[idx]);
      batch.weights.push_back(1.0);
    }
  }
  return batch;
}

void ReplayBuffer::update_priorities(const std::vector<std::size_t>& indices,
                                     const std::vector<double>& td_errors) {
  if (config_.kind != BufferKind::kPrioritized) return;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double priority = std::abs(td_errors[k]) + 1e-6;
    max_priority_ = std::max(max_priority_, priority);
    tree_.set(indices[k], std::pow(priority, config_.alpha));
  }
}

}  // namespace navgym::drl
