#include <benchmark/benchmark.h>

#include <random>

#include "navgym/env.hpp"
#include "navgym/nn.hpp"
#include "navgym/sensors.hpp"
#include "navgym/world.hpp"

using namespace navgym;

namespace {

World cluttered_world() {
  World w;
  w.bounds = {{-6, -5}, {6, 5}};
  w.obstacles = {
      {SegmentShape{{0, -5}, {0, -0.8}}, 2.0},
      {SegmentShape{{0, 0.8}, {0, 5}}, 2.0},
      {CircleShape{{-3.5, 2.5}, 0.4}, 0.9},
      {RectShape{{{-4.5, -3.5}, {-3.5, -2.5}}}, 0.7},
      {CircleShape{{3.0, -2.0}, 0.5}, 1.2},
      {RectShape{{{2.0, 2.0}, {3.2, 3.0}}}, 0.8},
  };
  w.spawn_regions.push_back({"all", {{-5, -4}, {5, 4}}});
  w.goal_regions.push_back({"all", {{-5, -4}, {5, 4}}});
  return w;
}

void BM_Raycast(benchmark::State& state) {
  const World w = cluttered_world();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ua(-M_PI, M_PI);
  for (auto _ : state)
    benchmark::DoNotOptimize(raycast(w, {-2, 0}, ua(rng), 10.0));
}
BENCHMARK(BM_Raycast);

void BM_LidarScan(benchmark::State& state) {
  const World w = cluttered_world();
  LidarSpec spec;
  spec.n_ranges = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(scan_lidar(w, {-2, 0, 0.3}, spec, rng));
}
BENCHMARK(BM_LidarScan)->Arg(36)->Arg(360);

void BM_DepthRender(benchmark::State& state) {
  const World w = cluttered_world();
  DepthSpec spec;
  std::mt19937_64 rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(render_depth(w, {-2, 0, 0.3}, spec, rng));
}
BENCHMARK(BM_DepthRender);

void BM_CollisionCheck(benchmark::State& state) {
  const World w = cluttered_world();
  Footprint f;
  f.shape = Footprint::Shape::kRectangle;
  f.length = 0.5;
  f.width = 0.3;
  f.collision_tolerance = 0.05;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-5, 5), uy(-4, 4), ut(-M_PI, M_PI);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        check_collision(w, {ux(rng), uy(rng), ut(rng)}, f));
}
BENCHMARK(BM_CollisionCheck);

void BM_EnvStep(benchmark::State& state) {
  PlatformSpec platform;
  SensorConfig sensors;
  sensors.lidar.n_ranges = 36;
  EpisodeConfig ep;
  ep.stages = {{"all", "all"}};
  NavEnv env(cluttered_world(), platform, sensors, ep, RewardSpec{});
  int episode = 0;
  env.reset(episode++);
  for (auto _ : state) {
    if (env.episode_done()) env.reset(episode++);
    benchmark::DoNotOptimize(env.step({0.3, 0, 0.1}));
  }
}
BENCHMARK(BM_EnvStep);

void BM_NetworkForwardBackward(benchmark::State& state) {
  nn::NetworkSpec spec;
  spec.input_dim = 40;
  spec.hidden = {256, 128};
  spec.output_dim = 2;
  spec.init_seed = 1;
  nn::Network net(spec);
  nn::Matrix x(64, 40);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double& v : x.a) v = u(rng);
  nn::Matrix gy(64, 2);
  for (double& v : gy.a) v = u(rng);
  for (auto _ : state) {
    net.zero_grad();
    benchmark::DoNotOptimize(net.forward(x));
    benchmark::DoNotOptimize(net.backward(gy));
  }
}
BENCHMARK(BM_NetworkForwardBackward);

}  // namespace

BENCHMARK_MAIN();
