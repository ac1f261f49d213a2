#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

namespace navgym::drl {

// Stored experience. `terminal` is a true MDP terminal (goal/collision):
// TD targets bootstrap through timeouts but not through terminals.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  bool episode_end = false;  // terminal or timeout
  int n_steps = 1;           // reward spans gamma^0..gamma^(n_steps-1)
};

struct SampledBatch {
  std::vector<Transition> transitions;
  std::vector<double> weights;       // importance weights (1 for uniform)
  std::vector<std::size_t> indices;  // for priority updates
};

enum class BufferKind { kUniform, kPrioritized, kNStep };

struct BufferConfig {
  BufferKind kind = BufferKind::kUniform;
  std::size_t capacity = 100000;
  double alpha = 0.6;       // prioritized exponent
  double beta0 = 0.4;       // initial importance correction
  double beta_final = 1.0;
  std::size_t beta_anneal_steps = 100000;
  int n = 1;                // n-step horizon
  double gamma = 0.99;      // discount used to fold n-step rewards
};

// Sum tree over priorities for O(log n) proportional sampling.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);
  void set(std::size_t index, double priority);
  double get(std::size_t index) const;
  double total() const;
  // Index whose cumulative-priority interval contains mass in [0, total).
  std::size_t find(double mass) const;

 private:
  std::size_t capacity_;
  std::vector<double> tree_;  // binary heap layout, leaves at the bottom
};

class BufferError : public std::runtime_error {
 public:
  explicit BufferError(const std::string& m) : std::runtime_error(m) {}
};

// Ring-buffer experience replay with uniform, prioritized, and n-step
// behavior selected by config. The n-step variant folds the next n
// rewards (truncated at episode end) into each stored transition.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(const BufferConfig& config);

  void push(const Transition& t);
  // Flushes a partial n-step window; call at every episode boundary.
  void end_episode();

  SampledBatch sample(std::size_t batch_size, std::mt19937_64& rng);
  void update_priorities(const std::vector<std::size_t>& indices,
                         const std::vector<double>& td_errors);

  std::size_t size() const { return data_.size(); }
  const BufferConfig& config() const { return config_; }
  const Transition& at(std::size_t i) const { return data_[i]; }
  double beta() const;

 private:
  void store(Transition t);

  BufferConfig config_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
  SumTree tree_;
  double max_priority_ = 1.0;
  std::size_t sample_calls_ = 0;
  std::deque<Transition> pending_;  // n-step accumulation window
};

}  // namespace navgym::drl
