#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace navgym::nn {

// Row-major dense matrix; a batch is one row per sample.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

struct TensorRef {
  std::string name;
  std::vector<double>* value;
  std::vector<double>* grad;
};

class Layer {
 public:
  virtual ~Layer() = default;
  // Caches whatever backward needs; one in-flight forward/backward pair
  // per layer instance.
  virtual Matrix forward(const Matrix& x) = 0;
  virtual Matrix backward(const Matrix& gy) = 0;  // accumulates param grads
  virtual void collect(std::vector<TensorRef>& out, const std::string& prefix) {}
  virtual int output_dim(int input_dim) const = 0;
};

enum class Activation { kReLU, kTanh };

struct ConvLayerSpec {
  int out_channels = 8;
  int kernel = 3;
  int stride = 2;
};

// Architecture description. Dense nets consume a flat vector;
// multi-input nets consume an image plus a flat state vector, run a
// conv stack and a dense state branch, and fuse by concatenation.
struct NetworkSpec {
  enum class Arch { kDense, kMultiInput };
  enum class Head { kLinear, kTanhScaled, kGaussian };

  Arch arch = Arch::kDense;
  int input_dim = 0;  // dense arch

  int img_width = 0, img_height = 0, img_channels = 1;  // multi-input
  std::vector<ConvLayerSpec> conv;
  int state_dim = 0;
  std::vector<int> state_branch;  // hidden widths of the state branch

  std::vector<int> hidden;  // dense hidden widths / fusion widths
  int output_dim = 1;
  Head head = Head::kLinear;
  std::vector<double> out_low, out_high;  // tanh-scaled action limits
  Activation activation = Activation::kReLU;
  bool small_final_init = false;  // uniform(+-3e-3) on the output layer
  std::uint64_t init_seed = 0;

  // Gaussian heads emit [mean, log_std]; the stored output layer is
  // 2 * output_dim wide.
  int head_width() const {
    return head == Head::kGaussian ? 2 * output_dim : output_dim;
  }
};

// Feed-forward network with reverse-mode gradients. Forward caches the
// intermediates that backward consumes; not reentrant across batches.
class Network {
 public:
  explicit Network(const NetworkSpec& spec);
  Network(const Network& other);
  Network& operator=(const Network&) = delete;

  const NetworkSpec& spec() const { return spec_; }

  Matrix forward(const Matrix& x);
  Matrix forward(const Matrix& image, const Matrix& state);

  // Returns the gradient w.r.t. the (dense) input, or w.r.t. the state
  // branch input for multi-input nets.
  Matrix backward(const Matrix& gout);

  void zero_grad();
  std::vector<TensorRef> parameters();
  std::size_t parameter_count();

  nlohmann::json to_json();
  void load_json(const nlohmann::json& j);

 private:
  void build();

  NetworkSpec spec_;
  std::vector<std::unique_ptr<Layer>> image_layers_;  // multi-input only
  std::vector<std::unique_ptr<Layer>> state_layers_;  // multi-input only
  std::vector<std::unique_ptr<Layer>> trunk_;         // dense / fusion
  int image_flat_dim_ = 0;
  int state_out_dim_ = 0;
};

// Canonical Adam with bias correction, one state slot per parameter
// tensor of the bound network.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Network& net);
  long step_count() const { return t_; }
  double learning_rate() const { return lr_; }

  nlohmann::json to_json() const;
  void load_json(const nlohmann::json& j);

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

// target <- (1 - tau) * target + tau * online, elementwise.
void soft_update(Network& target, Network& online, double tau);

void copy_parameters(Network& dst, Network& src);

}  // namespace navgym::nn
