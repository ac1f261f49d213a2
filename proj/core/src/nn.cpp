#include "navgym/nn.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace navgym::nn {
namespace {

using json = nlohmann::json;

class DenseLayer : public Layer {
 public:
  DenseLayer(int in, int out, std::mt19937_64& rng, bool small_init)
      : in_(in), out_(out), w_(static_cast<std::size_t>(in) * out),
        b_(out, 0.0), gw_(w_.size(), 0.0), gb_(out, 0.0) {
    const double limit = small_init ? 3e-3 : std::sqrt(6.0 / in);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : w_) w = u(rng);
    if (small_init)
      for (double& b : b_) b = u(rng);
  }

  Matrix forward(const Matrix& x) override {
    x_ = x;
    Matrix y(x.rows, out_);
    for (int n = 0; n < x.rows; ++n)
      for (int o = 0; o < out_; ++o) {
        double s = b_[o];
        const double* wrow = w_.data() + static_cast<std::size_t>(o) * in_;
        for (int i = 0; i < in_; ++i) s += wrow[i] * x(n, i);
        y(n, o) = s;
      }
    return y;
  }

  Matrix backward(const Matrix& gy) override {
    Matrix gx(gy.rows, in_);
    for (int n = 0; n < gy.rows; ++n)
      for (int o = 0; o < out_; ++o) {
        const double g = gy(n, o);
        gb_[o] += g;
        double* gwrow = gw_.data() + static_cast<std::size_t>(o) * in_;
        const double* wrow = w_.data() + static_cast<std::size_t>(o) * in_;
        for (int i = 0; i < in_; ++i) {
          gwrow[i] += g * x_(n, i);
          gx(n, i) += g * wrow[i];
        }
      }
    return gx;
  }

  void collect(std::vector<TensorRef>& out, const std::string& prefix) override {
    out.push_back({prefix + ".W", &w_, &gw_});
    out.push_back({prefix + ".b", &b_, &gb_});
  }
  int output_dim(int) const override { return out_; }

 private:
  int in_, out_;
  std::vector<double> w_, b_, gw_, gb_;
  Matrix x_;
};

class ActivationLayer : public Layer {
 public:
  explicit ActivationLayer(Activation act) : act_(act) {}

  Matrix forward(const Matrix& x) override {
    y_ = x;
    for (double& v : y_.a)
      v = act_ == Activation::kReLU ? (v > 0.0 ? v : 0.0) : std::tanh(v);
    return y_;
  }

  Matrix backward(const Matrix& gy) override {
    Matrix gx = gy;
    for (std::size_t i = 0; i < gx.a.size(); ++i) {
      if (act_ == Activation::kReLU)
        gx.a[i] = y_.a[i] > 0.0 ? gy.a[i] : 0.0;
      else
        gx.a[i] = gy.a[i] * (1.0 - y_.a[i] * y_.a[i]);
    }
    return gx;
  }
  int output_dim(int input_dim) const override { return input_dim; }

 private:
  Activation act_;
  Matrix y_;
};

// Valid-padding 2D convolution over CHW-flattened rows.
class Conv2DLayer : public Layer {
 public:
  Conv2DLayer(int in_c, int in_h, int in_w, const ConvLayerSpec& spec,
              std::mt19937_64& rng)
      : in_c_(in_c), in_h_(in_h), in_w_(in_w), out_c_(spec.out_channels),
        k_(spec.kernel), s_(spec.stride) {
    out_h_ = (in_h_ - k_) / s_ + 1;
    out_w_ = (in_w_ - k_) / s_ + 1;
    if (out_h_ < 1 || out_w_ < 1)
      throw std::invalid_argument("conv layer output collapses to zero size");
    const int fan_in = in_c_ * k_ * k_;
    w_.resize(static_cast<std::size_t>(out_c_) * fan_in);
    b_.assign(out_c_, 0.0);
    gw_.assign(w_.size(), 0.0);
    gb_.assign(out_c_, 0.0);
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-limit, limit);
    for (double& w : w_) w = u(rng);
  }

  int out_h() const { return out_h_; }
  int out_w() const { return out_w_; }
  int out_c() const { return out_c_; }

  Matrix forward(const Matrix& x) override {
    x_ = x;
    Matrix y(x.rows, out_c_ * out_h_ * out_w_);
    for (int n = 0; n < x.rows; ++n)
      for (int oc = 0; oc < out_c_; ++oc)
        for (int oy = 0; oy < out_h_; ++oy)
          for (int ox = 0; ox < out_w_; ++ox) {
            double sum = b_[oc];
            for (int ic = 0; ic < in_c_; ++ic)
              for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx)
                  sum += w(oc, ic, ky, kx) *
                         x(n, idx_in(ic, oy * s_ + ky, ox * s_ + kx));
            y(n, idx_out(oc, oy, ox)) = sum;
          }
    return y;
  }

  Matrix backward(const Matrix& gy) override {
    Matrix gx(gy.rows, in_c_ * in_h_ * in_w_);
    for (int n = 0; n < gy.rows; ++n)
      for (int oc = 0; oc < out_c_; ++oc)
        for (int oy = 0; oy < out_h_; ++oy)
          for (int ox = 0; ox < out_w_; ++ox) {
            const double g = gy(n, idx_out(oc, oy, ox));
            gb_[oc] += g;
            for (int ic = 0; ic < in_c_; ++ic)
              for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx) {
                  gw(oc, ic, ky, kx) +=
                      g * x_(n, idx_in(ic, oy * s_ + ky, ox * s_ + kx));
                  gx(n, idx_in(ic, oy * s_ + ky, ox * s_ + kx)) +=
                      g * w(oc, ic, ky, kx);
                }
          }
    return gx;
  }

  void collect(std::vector<TensorRef>& out, const std::string& prefix) override {
    out.push_back({prefix + ".W", &w_, &gw_});
    out.push_back({prefix + ".b", &b_, &gb_});
  }
  int output_dim(int) const override { return out_c_ * out_h_ * out_w_; }

 private:
  int idx_in(int c, int y, int x) const { return (c * in_h_ + y) * in_w_ + x; }
  int idx_out(int c, int y, int x) const { return (c * out_h_ + y) * out_w_ + x; }
  double& w(int oc, int ic, int ky, int kx) {
    return w_[((static_cast<std::size_t>(oc) * in_c_ + ic) * k_ + ky) * k_ + kx];
  }
  double& gw(int oc, int ic, int ky, int kx) {
    return gw_[((static_cast<std::size_t>(oc) * in_c_ + ic) * k_ + ky) * k_ + kx];
  }

  int in_c_, in_h_, in_w_, out_c_, k_, s_;
  int out_h_, out_w_;
  std::vector<double> w_, b_, gw_, gb_;
  Matrix x_;
};

// y = mid + half * tanh(z); keeps outputs strictly inside [low, high].
class TanhScaleLayer : public Layer {
 public:
  TanhScaleLayer(std::vector<double> low, std::vector<double> high)
      : low_(std::move(low)), high_(std::move(high)) {}

  Matrix forward(const Matrix& x) override {
    t_ = x;
    Matrix y(x.rows, x.cols);
    for (int n = 0; n < x.rows; ++n)
      for (int c = 0; c < x.cols; ++c) {
        const double t = std::tanh(x(n, c));
        t_(n, c) = t;
        y(n, c) = mid(c) + half(c) * t;
      }
    return y;
  }

  Matrix backward(const Matrix& gy) override {
    Matrix gx(gy.rows, gy.cols);
    for (int n = 0; n < gy.rows; ++n)
      for (int c = 0; c < gy.cols; ++c)
        gx(n, c) = gy(n, c) * half(c) * (1.0 - t_(n, c) * t_(n, c));
    return gx;
  }
  int output_dim(int input_dim) const override { return input_dim; }

 private:
  double mid(int c) const { return 0.5 * (low_[c] + high_[c]); }
  double half(int c) const { return 0.5 * (high_[c] - low_[c]); }
  std::vector<double> low_, high_;
  Matrix t_;
};

Matrix hconcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows, a.cols + b.cols);
  for (int n = 0; n < a.rows; ++n) {
    for (int c = 0; c < a.cols; ++c) out(n, c) = a(n, c);
    for (int c = 0; c < b.cols; ++c) out(n, a.cols + c) = b(n, c);
  }
  return out;
}

}  // namespace

Network::Network(const NetworkSpec& spec) : spec_(spec) { build(); }

Network::Network(const Network& other) : spec_(other.spec_) {
  build();
  // Deep-copy parameter values.
  Network& src = const_cast<Network&>(other);
  auto mine = parameters();
  auto theirs = src.parameters();
  for (std::size_t i = 0; i < mine.size(); ++i)
    *mine[i].value = *theirs[i].value;
}

void Network::build() {
  std::mt19937_64 rng(spec_.init_seed);
  int trunk_in = 0;
  if (spec_.arch == NetworkSpec::Arch::kDense) {
    trunk_in = spec_.input_dim;
  } else {
    int c = spec_.img_channels, h = spec_.img_height, w = spec_.img_width;
    for (const auto& cs : spec_.conv) {
      auto conv = std::make_unique<Conv2DLayer>(c, h, w, cs, rng);
      c = conv->out_c();
      h = conv->out_h();
      w = conv->out_w();
      image_layers_.push_back(std::move(conv));
      image_layers_.push_back(std::make_unique<ActivationLayer>(spec_.activation));
    }
    image_flat_dim_ = c * h * w;
    int sdim = spec_.state_dim;
    for (int width : spec_.state_branch) {
      state_layers_.push_back(
          std::make_unique<DenseLayer>(sdim, width, rng, false));
      state_layers_.push_back(std::make_unique<ActivationLayer>(spec_.activation));
      sdim = width;
    }
    state_out_dim_ = sdim;
    trunk_in = image_flat_dim_ + state_out_dim_;
  }
  int dim = trunk_in;
  for (int width : spec_.hidden) {
    trunk_.push_back(std::make_unique<DenseLayer>(dim, width, rng, false));
    trunk_.push_back(std::make_unique<ActivationLayer>(spec_.activation));
    dim = width;
  }
  trunk_.push_back(std::make_unique<DenseLayer>(dim, spec_.head_width(), rng,
                                                spec_.small_final_init));
  if (spec_.head == NetworkSpec::Head::kTanhScaled) {
    if (static_cast<int>(spec_.out_low.size()) != spec_.output_dim ||
        static_cast<int>(spec_.out_high.size()) != spec_.output_dim)
      throw std::invalid_argument("tanh-scaled head needs limits per output");
    trunk_.push_back(
        std::make_unique<TanhScaleLayer>(spec_.out_low, spec_.out_high));
  }
}

Matrix Network::forward(const Matrix& x) {
  if (spec_.arch != NetworkSpec::Arch::kDense)
    throw std::logic_error("multi-input network needs (image, state) inputs");
  if (x.cols != spec_.input_dim)
    throw std::invalid_argument("input width does not match network spec");
  Matrix cur = x;
  for (auto& layer : trunk_) cur = layer->forward(cur);
  return cur;
}

Matrix Network::forward(const Matrix& image, const Matrix& state) {
  if (spec_.arch != NetworkSpec::Arch::kMultiInput)
    throw std::logic_error("dense network takes a single input");
  if (image.cols != spec_.img_channels * spec_.img_height * spec_.img_width)
    throw std::invalid_argument("image width does not match network spec");
  if (state.cols != spec_.state_dim)
    throw std::invalid_argument("state width does not match network spec");
  Matrix img = image;
  for (auto& layer : image_layers_) img = layer->forward(img);
  Matrix st = state;
  for (auto& layer : state_layers_) st = layer->forward(st);
  Matrix cur = hconcat(img, st);
  for (auto& layer : trunk_) cur = layer->forward(cur);
  return cur;
}

Matrix Network::backward(const Matrix& gout) {
  Matrix g = gout;
  for (auto it = trunk_.rbegin(); it != trunk_.rend(); ++it)
    g = (*it)->backward(g);
  if (spec_.arch == NetworkSpec::Arch::kDense) return g;
  // Split the fusion gradient back into the two branches.
  Matrix g_img(g.rows, image_flat_dim_);
  Matrix g_state(g.rows, state_out_dim_);
  for (int n = 0; n < g.rows; ++n) {
    for (int c = 0; c < image_flat_dim_; ++c) g_img(n, c) = g(n, c);
    for (int c = 0; c < state_out_dim_; ++c)
      g_state(n, c) = g(n, image_flat_dim_ + c);
  }
  for (auto it = image_layers_.rbegin(); it != image_layers_.rend(); ++it)
    g_img = (*it)->backward(g_img);
  for (auto it = state_layers_.rbegin(); it != state_layers_.rend(); ++it)
    g_state = (*it)->backward(g_state);
  return g_state;
}

void Network::zero_grad() {
  for (auto& t : parameters())
    std::fill(t.grad->begin(), t.grad->end(), 0.0);
}

std::vector<TensorRef> Network::parameters() {
  std::vector<TensorRef> out;
  int i = 0;
  for (auto& l : image_layers_) l->collect(out, "img" + std::to_string(i++));
  i = 0;
  for (auto& l : state_layers_) l->collect(out, "state" + std::to_string(i++));
  i = 0;
  for (auto& l : trunk_) l->collect(out, "trunk" + std::to_string(i++));
  return out;
}

std::size_t Network::parameter_count() {
  std::size_t n = 0;
  for (auto& t : parameters()) n += t.value->size();
  return n;
}

namespace {

json spec_to_json(const NetworkSpec& s) {
  json j;
  j["arch"] = s.arch == NetworkSpec::Arch::kDense ? "dense" : "multi_input";
  j["input_dim"] = s.input_dim;
  j["img_width"] = s.img_width;
  j["img_height"] = s.img_height;
  j["img_channels"] = s.img_channels;
  j["conv"] = json::array();
  for (const auto& c : s.conv)
    j["conv"].push_back({{"out_channels", c.out_channels},
                         {"kernel", c.kernel},
                         {"stride", c.stride}});
  j["state_dim"] = s.state_dim;
  j["state_branch"] = s.state_branch;
  j["hidden"] = s.hidden;
  j["output_dim"] = s.output_dim;
  j["head"] = s.head == NetworkSpec::Head::kLinear      ? "linear"
              : s.head == NetworkSpec::Head::kTanhScaled ? "tanh_scaled"
                                                         : "gaussian";
  j["out_low"] = s.out_low;
  j["out_high"] = s.out_high;
  j["activation"] = s.activation == Activation::kReLU ? "relu" : "tanh";
  j["small_final_init"] = s.small_final_init;
  j["init_seed"] = s.init_seed;
  return j;
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec s;
  s.arch = j.at("arch") == "dense" ? NetworkSpec::Arch::kDense
                                   : NetworkSpec::Arch::kMultiInput;
  s.input_dim = j.at("input_dim");
  s.img_width = j.at("img_width");
  s.img_height = j.at("img_height");
  s.img_channels = j.at("img_channels");
  for (const auto& c : j.at("conv"))
    s.conv.push_back({c.at("out_channels"), c.at("kernel"), c.at("stride")});
  s.state_dim = j.at("state_dim");
  s.state_branch = j.at("state_branch").get<std::vector<int>>();
  s.hidden = j.at("hidden").get<std::vector<int>>();
  s.output_dim = j.at("output_dim");
  const std::string head = j.at("head");
  s.head = head == "linear"        ? NetworkSpec::Head::kLinear
           : head == "tanh_scaled" ? NetworkSpec::Head::kTanhScaled
                                   : NetworkSpec::Head::kGaussian;
  s.out_low = j.at("out_low").get<std::vector<double>>();
  s.out_high = j.at("out_high").get<std::vector<double>>();
  s.activation =
      j.at("activation") == "relu" ? Activation::kReLU : Activation::kTanh;
  s.small_final_init = j.at("small_final_init");
  s.init_seed = j.at("init_seed");
  return s;
}

}  // namespace

nlohmann::json Network::to_json() {
  json j;
  j["spec"] = spec_to_json(spec_);
  json tensors = json::object();
  for (auto& t : parameters()) tensors[t.name] = *t.value;
  j["tensors"] = std::move(tensors);
  return j;
}

void Network::load_json(const nlohmann::json& j) {
  spec_ = spec_from_json(j.at("spec"));
  image_layers_.clear();
  state_layers_.clear();
  trunk_.clear();
  build();
  const json& tensors = j.at("tensors");
  for (auto& t : parameters()) {
    const auto values = tensors.at(t.name).get<std::vector<double>>();
    if (values.size() != t.value->size())
      throw std::runtime_error("checkpoint tensor shape mismatch: " + t.name);
    *t.value = values;
  }
}

void Adam::step(Network& net) {
  auto params = net.parameters();
  if (m_.empty()) {
    for (auto& p : params) {
      m_.emplace_back(p.value->size(), 0.0);
      v_.emplace_back(p.value->size(), 0.0);
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& value = *params[k].value;
    auto& grad = *params[k].grad;
    for (std::size_t i = 0; i < value.size(); ++i) {
      m_[k][i] = beta1_ * m_[k][i] + (1.0 - beta1_) * grad[i];
      v_[k][i] = beta2_ * v_[k][i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double mhat = m_[k][i] / bc1;
      const double vhat = v_[k][i] / bc2;
      value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

nlohmann::json Adam::to_json() const {
  json j;
  j["lr"] = lr_;
  j["beta1"] = beta1_;
  j["beta2"] = beta2_;
  j["eps"] = eps_;
  j["t"] = t_;
  j["m"] = m_;
  j["v"] = v_;
  return j;
}

void Adam::load_json(const nlohmann::json& j) {
  lr_ = j.at("lr");
  beta1_ = j.at("beta1");
  beta2_ = j.at("beta2");
  eps_ = j.at("eps");
  t_ = j.at("t");
  m_ = j.at("m").get<std::vector<std::vector<double>>>();
  v_ = j.at("v").get<std::vector<std::vector<double>>>();
}

void soft_update(Network& target, Network& online, double tau) {
  auto t = target.parameters();
  auto o = online.parameters();
  for (std::size_t k = 0; k < t.size(); ++k) {
    auto& tv = *t[k].value;
    const auto& ov = *o[k].value;
    for (std::size_t i = 0; i < tv.size(); ++i)
      tv[i] = (1.0 - tau) * tv[i] + tau * ov[i];
  }
}

void copy_parameters(Network& dst, Network& src) {
  auto d = dst.parameters();
  auto s = src.parameters();
  for (std::size_t k = 0; k < d.size(); ++k) *d[k].value = *s[k].value;
}

}  // namespace navgym::nn
