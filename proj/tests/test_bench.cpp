#include <doctest.h>

#include <cstdio>
#include <random>

#include "navgym/bench.hpp"
#include "navgym/trainer.hpp"
#include "oracles.hpp"

using namespace navgym;
using namespace navgym::bench;

namespace {

World empty_room() {
  World w;
  w.bounds = {{-5, -5}, {5, 5}};
  w.spawn_regions.push_back({"all", {{-4, -4}, {4, 4}}});
  w.goal_regions.push_back({"all", {{-4, -4}, {4, 4}}});
  return w;
}

// Straight run along +x: start (0,0), goal (7,0), speed 0.5, dt 0.1.
EpisodeTrace straight_trace(int n_moves, double v, double dt) {
  EpisodeTrace tr;
  tr.dt = dt;
  tr.start = {0, 0};
  tr.goal = {7, 0};
  tr.outcome = Outcome::kTimeout;
  tr.steps.push_back({0.0, {0, 0, 0}, {}, 1.0});
  for (int i = 1; i <= n_moves; ++i)
    tr.steps.push_back({i * dt, {i * v * dt, 0, 0}, {v, 0, 0}, 1.0});
  return tr;
}

}  // namespace

TEST_CASE("path length and dist/path on a fixture") {
  const World w = empty_room();
  // 5 m traveled straight, then 2 m back: path 7, displacement toward a
  // goal 5 m out -> straight/path = 5/7
  EpisodeTrace tr;
  tr.dt = 1.0;
  tr.start = {0, 0};
  tr.goal = {5, 0};
  tr.outcome = Outcome::kGoalReached;
  tr.steps.push_back({0, {0, 0, 0}, {}, 1.0});
  tr.steps.push_back({1, {5, 0, 0}, {5, 0, 0}, 1.0});
  tr.steps.push_back({2, {3, 0, 0}, {2, 0, 0}, 1.0});
  const MetricsRow m = compute_metrics(tr, w);
  CHECK(m.path_length == doctest::Approx(7.0));
  CHECK(m.dist_path_ratio == doctest::Approx(5.0 / 7.0));
  CHECK(m.success);
  CHECK(m.time_s == doctest::Approx(2.0));
}

TEST_CASE("dist/path is clamped to 1 and degenerate traces flagged") {
  const World w = empty_room();
  // single step shorter than the straight-line distance
  EpisodeTrace tr;
  tr.dt = 1.0;
  tr.start = {0, 0};
  tr.goal = {5, 0};
  tr.steps.push_back({0, {0, 0, 0}, {}, 1.0});
  tr.steps.push_back({1, {1, 0, 0}, {1, 0, 0}, 1.0});
  CHECK(compute_metrics(tr, w).dist_path_ratio == doctest::Approx(1.0));

  EpisodeTrace single;
  single.start = {0, 0};
  single.goal = {5, 0};
  single.steps.push_back({0, {0, 0, 0}, {}, 1.0});
  const MetricsRow m = compute_metrics(single, w);
  CHECK(m.degenerate);
  CHECK(m.dist_path_ratio == doctest::Approx(1.0));
}

TEST_CASE("velocity statistics exclude the initial rest record") {
  const World w = empty_room();
  const EpisodeTrace tr = straight_trace(10, 0.5, 0.1);
  const MetricsRow m = compute_metrics(tr, w);
  CHECK(m.v_mean == doctest::Approx(0.5));
  CHECK(m.omega_std == doctest::Approx(0.0));
}

TEST_CASE("acceleration example: rest to 0.5 m/s in one 0.1 s step") {
  const World w = empty_room();
  const EpisodeTrace tr = straight_trace(3, 0.5, 0.1);
  const MetricsRow m = compute_metrics(tr, w);
  CHECK(m.max_linear_acceleration == doctest::Approx(5.0));
  CHECK(m.max_yaw_acceleration == doctest::Approx(0.0));
}

TEST_CASE("yaw acceleration from an omega jump") {
  const World w = empty_room();
  EpisodeTrace tr;
  tr.dt = 0.1;
  tr.start = {0, 0};
  tr.goal = {1, 0};
  tr.steps.push_back({0.0, {0, 0, 0}, {}, 1.0});
  tr.steps.push_back({0.1, {0, 0, 0.05}, {0, 0, 0.5}, 1.0});
  tr.steps.push_back({0.2, {0, 0, 0.03}, {0, 0, -0.2}, 1.0});
  const MetricsRow m = compute_metrics(tr, w);
  // |0.5 - 0| / 0.1 = 5.0 then |-0.2 - 0.5| / 0.1 = 7.0
  CHECK(m.max_yaw_acceleration == doctest::Approx(7.0));
}

TEST_CASE("cumulative heading is the mean absolute heading change") {
  const World w = empty_room();
  EpisodeTrace tr;
  tr.dt = 0.1;
  tr.start = {0, 0};
  tr.goal = {1, 0};
  tr.steps.push_back({0.0, {0, 0, 0.0}, {}, 1.0});
  tr.steps.push_back({0.1, {0, 0, 0.2}, {0, 0, 2}, 1.0});
  tr.steps.push_back({0.2, {0, 0, 0.1}, {0, 0, -1}, 1.0});
  // wraparound transition: from near pi to near -pi is a small change
  tr.steps.push_back({0.3, {0, 0, M_PI - 0.05}, {0, 0, 1}, 1.0});
  tr.steps.push_back({0.4, {0, 0, -M_PI + 0.05}, {0, 0, 1}, 1.0});
  const MetricsRow m = compute_metrics(tr, w);
  const double expect = (0.2 + 0.1 + (M_PI - 0.15) + 0.1) / 4.0;
  CHECK(m.cumulative_heading == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("obstacle distances come from the world geometry") {
  World w = empty_room();
  w.obstacles.push_back({CircleShape{{3, 0}, 1.0}, 1.0});
  const EpisodeTrace tr = straight_trace(2, 0.5, 0.1);  // stays near origin
  const MetricsRow m = compute_metrics(tr, w);
  // poses at x = 0, 0.05, 0.1; circle boundary at x = 2
  CHECK(m.min_obstacle_distance == doctest::Approx(1.9));
  CHECK(m.mean_obstacle_distance == doctest::Approx((2.0 + 1.95 + 1.9) / 3.0));
}

TEST_CASE("metrics match an analytic circular arc trace to 1e-9") {
  const World w = empty_room();
  // constant twist v = 0.4, omega = 0.5 for 20 steps of dt = 0.1
  const double v = 0.4, omega = 0.5, dt = 0.1;
  const int n = 20;
  EpisodeTrace tr;
  tr.dt = dt;
  tr.start = {0, 0};
  tr.outcome = Outcome::kTimeout;
  const double R = v / omega;
  auto pose_at = [&](int i) {
    const double th = omega * i * dt;
    return Pose2D{R * std::sin(th), R * (1.0 - std::cos(th)), th};
  };
  tr.goal = pose_at(n).position();
  tr.steps.push_back({0.0, pose_at(0), {}, 1.0});
  for (int i = 1; i <= n; ++i)
    tr.steps.push_back({i * dt, pose_at(i), {v, 0, omega}, 1.0});
  const MetricsRow m = compute_metrics(tr, w);
  // chord length per step of a constant-curvature arc
  const double chord = 2.0 * R * std::sin(omega * dt / 2.0);
  CHECK(std::abs(m.path_length - n * chord) < 1e-9);
  CHECK(std::abs(m.cumulative_heading - omega * dt) < 1e-9);
  CHECK(std::abs(m.v_mean - v) < 1e-9);
  CHECK(std::abs(m.omega_std - 0.0) < 1e-9);
  CHECK(std::abs(m.max_linear_acceleration - v / dt) < 1e-9);
  CHECK(std::abs(m.max_yaw_acceleration - omega / dt) < 1e-9);
  // straight-line displacement is the full-arc chord
  const double straight = 2.0 * R * std::sin(omega * n * dt / 2.0);
  CHECK(std::abs(m.dist_path_ratio - straight / (n * chord)) < 1e-9);
}

TEST_CASE("aggregate_report averages per label and counts successes") {
  MetricsRow a;
  a.success = true;
  a.time_s = 2.0;
  a.path_length = 4.0;
  MetricsRow b;
  b.success = false;
  b.time_s = 4.0;
  b.path_length = 6.0;
  MetricsRow c;
  c.success = true;
  c.time_s = 1.0;
  c.path_length = 1.0;
  const auto rows = aggregate_report({{"td3", a}, {"td3", b}, {"ddpg", c}});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "ddpg");  // sorted
  CHECK(rows[1].label == "td3");
  CHECK(rows[1].successes == 1);
  CHECK(rows[1].episodes == 2);
  CHECK(rows[1].means.time_s == doctest::Approx(3.0));
  CHECK(rows[1].means.path_length == doctest::Approx(5.0));
}

TEST_CASE("report formats expose all 11 metric columns") {
  MetricsRow m;
  m.success = true;
  m.time_s = 1.5;
  const auto rows = aggregate_report({{"td3", m}});
  const std::string csv = report_csv(rows);
  for (const char* col :
       {"success", "time [s]", "cum. heading [rad]", "path [m]",
        "dist/path [m/m]", "v_mean [m/s]", "omega_std [rad/s]",
        "max linear acceleration [m/s^2]", "max yaw acceleration [rad/s^2]",
        "min obstacle distance [m]", "mean obstacle distance [m]"}) {
    CHECK(csv.find(col) != std::string::npos);
  }
  CHECK(csv.find("1/1") != std::string::npos);
  const std::string table = report_table(rows);
  CHECK(table.find("td3") != std::string::npos);
  CHECK(table.find("max yaw acceleration") != std::string::npos);
}

TEST_CASE("trace CSV round-trip") {
  EpisodeTrace tr = straight_trace(5, 0.5, 0.1);
  tr.outcome = Outcome::kGoalReached;
  const std::string path = "test_trace_roundtrip.csv";
  write_trace_csv(tr, path);
  const EpisodeTrace back = read_trace_csv(path);
  std::remove(path.c_str());
  REQUIRE(back.steps.size() == tr.steps.size());
  CHECK(back.outcome == tr.outcome);
  CHECK(back.dt == tr.dt);
  CHECK(back.start.x == tr.start.x);
  CHECK(back.goal.x == tr.goal.x);
  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    CHECK(back.steps[i].pose.x == tr.steps[i].pose.x);
    CHECK(back.steps[i].velocity.v_x == tr.steps[i].velocity.v_x);
    CHECK(back.steps[i].min_range == tr.steps[i].min_range);
  }
  CHECK_THROWS_AS(read_trace_csv("no_such_trace.csv"), BenchError);
}

TEST_CASE("run_evaluation produces one trace per couple and rejects bad starts") {
  PlatformSpec platform;
  SensorConfig sensors;
  sensors.lidar.n_ranges = 12;
  EpisodeConfig ep;
  ep.max_steps = 20;
  ep.stages = {{"all", "all"}};
  NavEnv env(empty_room(), platform, sensors, ep, RewardSpec{});

  drl::AgentConfig acfg;
  acfg.hidden = {8};
  acfg.init_seed = 3;
  const drl::ObsLayout layout = drl::layout_for_env(env);
  const auto [low, high] = drl::action_limits_for_env(env);
  drl::Agent agent(acfg, layout, low, high);

  BenchmarkSpec spec;
  spec.couples = {{{0, 0, 0}, {2, 0}}, {{-2, -2, 0.5}, {2, 2}}};
  const auto traces = run_evaluation(env, agent, spec);
  CHECK(traces.size() == 2);
  for (const auto& tr : traces) {
    CHECK(tr.steps.size() >= 2);
    CHECK(tr.steps[0].t == 0.0);
    CHECK(tr.outcome != Outcome::kRunning);
  }

  BenchmarkSpec bad;
  bad.couples = {{{5.5, 0, 0}, {0, 0}}};  // outside the bounds walls
  CHECK_THROWS_AS(run_evaluation(env, agent, bad), BenchError);
}

TEST_CASE("evaluation traces are deterministic") {
  PlatformSpec platform;
  SensorConfig sensors;
  sensors.lidar.n_ranges = 12;
  EpisodeConfig ep;
  ep.max_steps = 15;
  ep.stages = {{"all", "all"}};
  NavEnv env(empty_room(), platform, sensors, ep, RewardSpec{});
  drl::AgentConfig acfg;
  acfg.hidden = {8};
  acfg.init_seed = 5;
  const auto [low, high] = drl::action_limits_for_env(env);
  drl::Agent agent(acfg, drl::layout_for_env(env), low, high);
  BenchmarkSpec spec;
  spec.couples = {{{0, 0, 0}, {3, 1}}};
  const auto a = run_evaluation(env, agent, spec);
  const auto b = run_evaluation(env, agent, spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a[0].steps.size(); ++i) {
    CHECK(a[0].steps[i].pose.x == b[0].steps[i].pose.x);
    CHECK(a[0].steps[i].pose.theta == b[0].steps[i].pose.theta);
  }
}
