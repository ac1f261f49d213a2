#pragma once

#include <string>
#include <vector>

#include "navgym/agents.hpp"
#include "navgym/env.hpp"

namespace navgym::bench {

// One per-step record of an evaluation episode.
struct TraceStep {
  double t = 0.0;  // seconds since episode start
  Pose2D pose;
  VelocityCommand velocity;
  double min_range = 0.0;  // closest sensor reading at this step
};

// Full traveled path of one evaluation episode.
struct EpisodeTrace {
  std::vector<TraceStep> steps;  // step 0 is the initial pose at t=0
  double dt = 0.1;
  Outcome outcome = Outcome::kTimeout;
  Vec2 start;
  Vec2 goal;
};

// The 11 report columns, in table order.
struct MetricsRow {
  bool success = false;
  double time_s = 0.0;
  double cumulative_heading = 0.0;  // mean |heading change| per step, rad
  double path_length = 0.0;
  double dist_path_ratio = 1.0;
  double v_mean = 0.0;
  double omega_std = 0.0;
  double max_linear_acceleration = 0.0;
  double max_yaw_acceleration = 0.0;
  double min_obstacle_distance = 0.0;
  double mean_obstacle_distance = 0.0;
  bool degenerate = false;  // single-point trace
};

struct StartGoalCouple {
  Pose2D start;
  Vec2 goal;
};

struct BenchmarkSpec {
  std::vector<StartGoalCouple> couples;
  int episodes_per_couple = 1;
  std::string checkpoint_path;
  std::string agent_label = "agent";
};

class BenchError : public std::runtime_error {
 public:
  explicit BenchError(const std::string& m) : std::runtime_error(m) {}
};

// Rolls out the agent in eval mode (no exploration) once per episode;
// one trace per episode.
std::vector<EpisodeTrace> run_evaluation(NavEnv& env, drl::Agent& agent,
                                         const BenchmarkSpec& spec);

MetricsRow compute_metrics(const EpisodeTrace& trace, const World& world);

struct ReportRow {
  std::string label;
  int successes = 0;
  int episodes = 0;
  MetricsRow means;
};

// Per-label means of every numeric metric; success reported as "k/n".
std::vector<ReportRow> aggregate_report(
    const std::vector<std::pair<std::string, MetricsRow>>& rows);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_table(const std::vector<ReportRow>& rows);

// Trace persistence: one CSV per episode so metrics can be re-derived
// offline.
void write_trace_csv(const EpisodeTrace& trace, const std::string& path);
EpisodeTrace read_trace_csv(const std::string& path);

}  // namespace navgym::bench
