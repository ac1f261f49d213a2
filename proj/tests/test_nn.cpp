#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "navgym/nn.hpp"
#include "oracles.hpp"

using namespace navgym::nn;

namespace {

Matrix row(std::initializer_list<double> vals) {
  Matrix m(1, static_cast<int>(vals.size()));
  int c = 0;
  for (double v : vals) m(0, c++) = v;
  return m;
}

// Straight-line re-evaluation of a dense ReLU network from its raw
// parameter vectors, independent of the layer machinery.
std::vector<double> eval_dense_by_hand(Network& net,
                                       const std::vector<double>& x) {
  const NetworkSpec& spec = net.spec();
  std::vector<TensorRef> params = net.parameters();
  std::vector<double> h = x;
  std::size_t p = 0;
  std::vector<int> widths;
  int in = spec.input_dim;
  for (int w : spec.hidden) widths.push_back(w);
  widths.push_back(spec.head_width());
  for (std::size_t layer = 0; layer < widths.size(); ++layer) {
    const int out = widths[layer];
    const std::vector<double>& W = *params[p++].value;
    const std::vector<double>& b = *params[p++].value;
    std::vector<double> y(out, 0.0);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      // weight rows are per output unit: W[o * in + i]
      for (int i = 0; i < in; ++i) s += W[static_cast<std::size_t>(o) * in + i] * h[i];
      y[o] = s;
    }
    const bool last = layer + 1 == widths.size();
    if (!last)
      for (double& v : y) v = std::max(v, 0.0);
    h = std::move(y);
    in = out;
  }
  if (spec.head == NetworkSpec::Head::kTanhScaled) {
    for (int o = 0; o < spec.output_dim; ++o) {
      const double mid = 0.5 * (spec.out_low[o] + spec.out_high[o]);
      const double half = 0.5 * (spec.out_high[o] - spec.out_low[o]);
      h[o] = mid + half * std::tanh(h[o]);
    }
  }
  return h;
}

}  // namespace

TEST_CASE("dense forward matches an independent evaluator") {
  NetworkSpec spec;
  spec.input_dim = 5;
  spec.hidden = {7, 4};
  spec.output_dim = 3;
  spec.init_seed = 11;
  Network net(spec);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = u(rng);
    Matrix in(1, 5);
    for (int i = 0; i < 5; ++i) in(0, i) = x[i];
    const Matrix out = net.forward(in);
    const std::vector<double> want = eval_dense_by_hand(net, x);
    REQUIRE(out.cols == 3);
    for (int i = 0; i < 3; ++i)
      CHECK(out(0, i) == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("tanh-scaled head stays within the limits") {
  NetworkSpec spec;
  spec.input_dim = 4;
  spec.hidden = {8};
  spec.output_dim = 2;
  spec.head = NetworkSpec::Head::kTanhScaled;
  spec.out_low = {0.0, -1.0};
  spec.out_high = {0.5, 1.0};
  spec.init_seed = 3;
  Network net(spec);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Matrix out = net.forward(row({u(rng), u(rng), u(rng), u(rng)}));
    CHECK(out(0, 0) >= 0.0);
    CHECK(out(0, 0) <= 0.5);
    CHECK(out(0, 1) >= -1.0);
    CHECK(out(0, 1) <= 1.0);
  }
  // verify against the independent evaluator too
  const std::vector<double> x{0.3, -0.7, 1.1, 0.2};
  Matrix in(1, 4);
  for (int i = 0; i < 4; ++i) in(0, i) = x[i];
  const Matrix out = net.forward(in);
  const auto want = eval_dense_by_hand(net, x);
  CHECK(out(0, 0) == doctest::Approx(want[0]).epsilon(1e-12));
  CHECK(out(0, 1) == doctest::Approx(want[1]).epsilon(1e-12));
}

TEST_CASE("small_final_init bounds the output layer weights") {
  NetworkSpec spec;
  spec.input_dim = 6;
  spec.hidden = {16};
  spec.output_dim = 2;
  spec.small_final_init = true;
  spec.init_seed = 9;
  Network net(spec);
  const auto params = net.parameters();
  // last W and b belong to the output layer
  const auto& W = *params[params.size() - 2].value;
  const auto& b = *params[params.size() - 1].value;
  for (double v : W) CHECK(std::abs(v) <= 3e-3);
  for (double v : b) CHECK(std::abs(v) <= 3e-3);
}

TEST_CASE("dense backprop matches central finite differences") {
  NetworkSpec spec;
  spec.input_dim = 4;
  spec.hidden = {6, 5};
  spec.output_dim = 2;
  spec.activation = Activation::kTanh;  // smooth, so fd converges cleanly
  spec.init_seed = 17;
  Network net(spec);
  Matrix x(3, 4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x.a) v = u(rng);
  Matrix target(3, 2);
  for (double& v : target.a) v = u(rng);

  auto loss = [&]() {
    Matrix out = net.forward(x);
    double s = 0.0;
    for (std::size_t i = 0; i < out.a.size(); ++i) {
      const double d = out.a[i] - target.a[i];
      s += 0.5 * d * d;
    }
    return s / out.rows;
  };

  net.zero_grad();
  Matrix out = net.forward(x);
  Matrix gy(3, 2);
  for (std::size_t i = 0; i < out.a.size(); ++i)
    gy.a[i] = (out.a[i] - target.a[i]) / out.rows;
  net.backward(gy);

  const auto fd = oracles::finite_difference_gradients(net, loss);
  const auto params = net.parameters();
  REQUIRE(fd.size() == params.size());
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < fd[t].size(); ++i) {
      CHECK(std::abs((*params[t].grad)[i] - fd[t][i]) < 1e-6);
    }
  }
}

TEST_CASE("multi-input conv backprop matches finite differences") {
  NetworkSpec spec;
  spec.arch = NetworkSpec::Arch::kMultiInput;
  spec.img_width = 8;
  spec.img_height = 6;
  spec.conv = {{2, 3, 2}};
  spec.state_dim = 3;
  spec.state_branch = {4};
  spec.hidden = {5};
  spec.output_dim = 2;
  spec.activation = Activation::kTanh;
  spec.init_seed = 23;
  Network net(spec);
  Matrix img(2, 48);
  Matrix st(2, 3);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : img.a) v = u(rng);
  for (double& v : st.a) v = u(rng);
  Matrix target(2, 2);
  for (double& v : target.a) v = u(rng);

  auto loss = [&]() {
    Matrix out = net.forward(img, st);
    double s = 0.0;
    for (std::size_t i = 0; i < out.a.size(); ++i) {
      const double d = out.a[i] - target.a[i];
      s += 0.5 * d * d;
    }
    return s / out.rows;
  };

  net.zero_grad();
  Matrix out = net.forward(img, st);
  Matrix gy(2, 2);
  for (std::size_t i = 0; i < out.a.size(); ++i)
    gy.a[i] = (out.a[i] - target.a[i]) / out.rows;
  net.backward(gy);

  const auto fd = oracles::finite_difference_gradients(net, loss);
  const auto params = net.parameters();
  REQUIRE(fd.size() == params.size());
  for (std::size_t t = 0; t < params.size(); ++t)
    for (std::size_t i = 0; i < fd[t].size(); ++i)
      CHECK(std::abs((*params[t].grad)[i] - fd[t][i]) < 1e-6);
}

TEST_CASE("conv output dimensions follow valid-padding arithmetic") {
  NetworkSpec spec;
  spec.arch = NetworkSpec::Arch::kMultiInput;
  spec.img_width = 16;
  spec.img_height = 12;
  spec.conv = {{4, 5, 3}, {8, 3, 2}};
  spec.state_dim = 2;
  spec.state_branch = {4};
  spec.hidden = {6};
  spec.output_dim = 1;
  spec.init_seed = 1;
  Network net(spec);
  Matrix img(1, 16 * 12);
  Matrix st(1, 2);
  const Matrix out = net.forward(img, st);
  CHECK(out.cols == 1);  // just shape sanity; sizes checked internally
}

TEST_CASE("Adam single-parameter hand computation") {
  // One 1x1 linear layer without bias contributions considered: use
  // input_dim 1, hidden {}, output 1. Parameters are W (1 value) and b.
  NetworkSpec spec;
  spec.input_dim = 1;
  spec.output_dim = 1;
  spec.init_seed = 4;
  Network net(spec);
  auto params = net.parameters();
  (*params[0].value)[0] = 0.5;
  (*params[1].value)[0] = 0.0;

  Adam opt(0.1);
  // loss = 0.5 * (W*1 + b)^2 with x=1, so dW = (W+b), db = (W+b)
  net.zero_grad();
  Matrix x(1, 1);
  x(0, 0) = 1.0;
  Matrix y = net.forward(x);
  Matrix gy(1, 1);
  gy(0, 0) = y(0, 0);
  net.backward(gy);
  const double g = (*params[0].grad)[0];
  CHECK(g == doctest::Approx(0.5));
  opt.step(net);
  // first Adam step moves by lr * g_hat / (sqrt(v_hat) + eps) with
  // m_hat = g, v_hat = g^2 -> step ~= lr * sign(g)
  const double expect = 0.5 - 0.1 * g / (std::abs(g) + 1e-8);
  CHECK((*params[0].value)[0] == doctest::Approx(expect).epsilon(1e-9));
  CHECK(opt.step_count() == 1);
}

TEST_CASE("soft_update interpolates parameters") {
  NetworkSpec spec;
  spec.input_dim = 3;
  spec.hidden = {4};
  spec.output_dim = 2;
  spec.init_seed = 31;
  Network online(spec);
  spec.init_seed = 32;
  Network target(spec);
  auto po = online.parameters();
  auto pt = target.parameters();
  std::vector<std::vector<double>> before;
  for (auto& t : pt) before.push_back(*t.value);
  const double tau = 0.25;
  soft_update(target, online, tau);
  for (std::size_t t = 0; t < pt.size(); ++t)
    for (std::size_t i = 0; i < pt[t].value->size(); ++i)
      CHECK((*pt[t].value)[i] ==
            doctest::Approx((1 - tau) * before[t][i] + tau * (*po[t].value)[i])
                .epsilon(1e-12));

  copy_parameters(target, online);
  for (std::size_t t = 0; t < pt.size(); ++t)
    CHECK(*pt[t].value == *po[t].value);
}

TEST_CASE("network serialization round-trips bitwise") {
  NetworkSpec spec;
  spec.arch = NetworkSpec::Arch::kMultiInput;
  spec.img_width = 8;
  spec.img_height = 6;
  spec.conv = {{2, 3, 2}};
  spec.state_dim = 3;
  spec.state_branch = {4};
  spec.hidden = {5};
  spec.output_dim = 2;
  spec.head = NetworkSpec::Head::kGaussian;
  spec.init_seed = 41;
  Network net(spec);

  const nlohmann::json j = net.to_json();
  const std::string text = j.dump();
  Network restored(spec);
  restored.load_json(nlohmann::json::parse(text));

  auto pa = net.parameters();
  auto pb = restored.parameters();
  REQUIRE(pa.size() == pb.size());
  for (std::size_t t = 0; t < pa.size(); ++t) {
    CHECK(pa[t].name == pb[t].name);
    CHECK(*pa[t].value == *pb[t].value);  // exact, not approximate
  }

  Matrix img(1, 48), st(1, 3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : img.a) v = u(rng);
  for (double& v : st.a) v = u(rng);
  const Matrix ya = net.forward(img, st);
  const Matrix yb = restored.forward(img, st);
  CHECK(ya.a == yb.a);
}

TEST_CASE("Adam state serialization round-trips") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden = {3};
  spec.output_dim = 1;
  spec.init_seed = 51;
  Network net(spec);
  Adam opt(0.01);
  Matrix x(1, 2);
  x(0, 0) = 0.5;
  x(0, 1) = -0.3;
  for (int i = 0; i < 3; ++i) {
    net.zero_grad();
    Matrix y = net.forward(x);
    Matrix gy(1, 1);
    gy(0, 0) = y(0, 0);
    net.backward(gy);
    opt.step(net);
  }
  Adam restored(0.01);
  restored.load_json(opt.to_json());
  CHECK(restored.step_count() == opt.step_count());

  // both optimizers apply an identical next step
  Network twin(net);
  net.zero_grad();
  twin.zero_grad();
  Matrix y1 = net.forward(x);
  Matrix g1(1, 1);
  g1(0, 0) = y1(0, 0);
  net.backward(g1);
  Matrix y2 = twin.forward(x);
  Matrix g2(1, 1);
  g2(0, 0) = y2(0, 0);
  twin.backward(g2);
  opt.step(net);
  restored.step(twin);
  auto pa = net.parameters();
  auto pb = twin.parameters();
  for (std::size_t t = 0; t < pa.size(); ++t) CHECK(*pa[t].value == *pb[t].value);
}

TEST_CASE("identical seeds build identical networks") {
  NetworkSpec spec;
  spec.input_dim = 4;
  spec.hidden = {8};
  spec.output_dim = 2;
  spec.init_seed = 77;
  Network a(spec), b(spec);
  auto pa = a.parameters();
  auto pb = b.parameters();
  for (std::size_t t = 0; t < pa.size(); ++t) CHECK(*pa[t].value == *pb[t].value);
  spec.init_seed = 78;
  Network c(spec);
  auto pc = c.parameters();
  CHECK(*pa[0].value != *pc[0].value);
}
