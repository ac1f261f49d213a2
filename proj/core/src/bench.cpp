#include "navgym/bench.hpp"

#include "navgym/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace navgym::bench {

std::vector<EpisodeTrace> run_evaluation(NavEnv& env, drl::Agent& agent,
                                         const BenchmarkSpec& spec) {
  std::vector<EpisodeTrace> traces;
  std::mt19937_64 unused_rng(0);  // eval mode never draws from it
  for (const StartGoalCouple& couple : spec.couples) {
    if (check_collision(env.world(), couple.start, env.platform().footprint))
      throw BenchError("start pose is in collision");
    for (int ep = 0; ep < spec.episodes_per_couple; ++ep) {
      Observation obs = env.reset_to(couple.start, couple.goal);
      EpisodeTrace trace;
      trace.dt = env.episode_config().dt;
      trace.start = couple.start.position();
      trace.goal = couple.goal;
      trace.steps.push_back(
          {0.0, env.robot_state().pose, VelocityCommand{}, env.min_lidar_range()});
      while (true) {
        const std::vector<double> action = agent.select_action(
            obs.flat(), drl::ActionMode::kEval, 0.0, unused_rng);
        const StepResult result =
            env.step(drl::command_from_action(env, action));
        trace.steps.push_back({env.steps_taken() * trace.dt,
                               env.robot_state().pose,
                               env.robot_state().velocity,
                               env.min_lidar_range()});
        obs = result.observation;
        if (result.done) {
          trace.outcome = result.outcome;
          break;
        }
      }
      traces.push_back(std::move(trace));
    }
  }
  return traces;
}

MetricsRow compute_metrics(const EpisodeTrace& trace, const World& world) {
  if (trace.steps.empty()) throw BenchError("empty trace");
  MetricsRow row;
  row.success = trace.outcome == Outcome::kGoalReached;
  row.time_s = trace.steps.back().t;

  const std::size_t n = trace.steps.size();
  double path = 0.0, heading_sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    path += (trace.steps[i + 1].pose.position() -
             trace.steps[i].pose.position()).norm();
    heading_sum += std::abs(
        wrap_angle(trace.steps[i + 1].pose.theta - trace.steps[i].pose.theta));
  }
  row.path_length = path;
  row.cumulative_heading = n > 1 ? heading_sum / (n - 1) : 0.0;

  const double straight = (trace.goal - trace.start).norm();
  if (path <= 0.0 || n == 1) {
    row.dist_path_ratio = 1.0;
    row.degenerate = true;
  } else {
    row.dist_path_ratio = std::min(straight / path, 1.0);
  }

  // Realized velocities: one sample per transition (records 1..n-1).
  double v_sum = 0.0, w_sum = 0.0, w_sq = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const auto& vel = trace.steps[i].velocity;
    v_sum += std::hypot(vel.v_x, vel.v_y);
    w_sum += vel.omega;
    w_sq += vel.omega * vel.omega;
  }
  const double samples = static_cast<double>(n - 1);
  if (n > 1) {
    row.v_mean = v_sum / samples;
    const double w_mean = w_sum / samples;
    row.omega_std = std::sqrt(std::max(w_sq / samples - w_mean * w_mean, 0.0));
  }

  // Accelerations are finite differences of consecutive velocity
  // records, including the initial rest record.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto& a = trace.steps[i].velocity;
    const auto& b = trace.steps[i + 1].velocity;
    const double dv =
        std::hypot(b.v_x, b.v_y) - std::hypot(a.v_x, a.v_y);
    const double dw = b.omega - a.omega;
    row.max_linear_acceleration =
        std::max(row.max_linear_acceleration, std::abs(dv) / trace.dt);
    row.max_yaw_acceleration =
        std::max(row.max_yaw_acceleration, std::abs(dw) / trace.dt);
  }

  double d_min = std::numeric_limits<double>::infinity(), d_sum = 0.0;
  for (const TraceStep& s : trace.steps) {
    const double d = distance_to_nearest_obstacle(world, s.pose.position());
    d_min = std::min(d_min, d);
    d_sum += d;
  }
  row.min_obstacle_distance = d_min;
  row.mean_obstacle_distance = d_sum / static_cast<double>(n);
  return row;
}

std::vector<ReportRow> aggregate_report(
    const std::vector<std::pair<std::string, MetricsRow>>& rows) {
  std::vector<ReportRow> out;
  auto find = [&](const std::string& label) -> ReportRow& {
    for (auto& r : out)
      if (r.label == label) return r;
    out.push_back({label, 0, 0, MetricsRow{}});
    return out.back();
  };
  for (const auto& [label, m] : rows) {
    ReportRow& r = find(label);
    r.episodes += 1;
    if (m.success) r.successes += 1;
    r.means.time_s += m.time_s;
    r.means.cumulative_heading += m.cumulative_heading;
    r.means.path_length += m.path_length;
    r.means.dist_path_ratio += m.dist_path_ratio;
    r.means.v_mean += m.v_mean;
    r.means.omega_std += m.omega_std;
    r.means.max_linear_acceleration += m.max_linear_acceleration;
    r.means.max_yaw_acceleration += m.max_yaw_acceleration;
    r.means.min_obstacle_distance += m.min_obstacle_distance;
    r.means.mean_obstacle_distance += m.mean_obstacle_distance;
  }
  for (auto& r : out) {
    const double n = static_cast<double>(r.episodes);
    r.means.time_s /= n;
    r.means.cumulative_heading /= n;
    r.means.path_length /= n;
    r.means.dist_path_ratio /= n;
    r.means.v_mean /= n;
    r.means.omega_std /= n;
    r.means.max_linear_acceleration /= n;
    r.means.max_yaw_acceleration /= n;
    r.means.min_obstacle_distance /= n;
    r.means.mean_obstacle_distance /= n;
  }
  std::sort(out.begin(), out.end(),
            [](const ReportRow& a, const ReportRow& b) { return a.label < b.label; });
  return out;
}

namespace {

const char* kColumns[] = {
    "success",
    "time [s]",
    "cum. heading [rad]",
    "path [m]",
    "dist/path [m/m]",
    "v_mean [m/s]",
    "omega_std [rad/s]",
    "max linear acceleration [m/s^2]",
    "max yaw acceleration [rad/s^2]",
    "min obstacle distance [m]",
    "mean obstacle distance [m]",
};

std::vector<std::string> row_cells(const ReportRow& r) {
  auto num = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << v;
    return ss.str();
  };
  return {std::to_string(r.successes) + "/" + std::to_string(r.episodes),
          num(r.means.time_s),
          num(r.means.cumulative_heading),
          num(r.means.path_length),
          num(r.means.dist_path_ratio),
          num(r.means.v_mean),
          num(r.means.omega_std),
          num(r.means.max_linear_acceleration),
          num(r.means.max_yaw_acceleration),
          num(r.means.min_obstacle_distance),
          num(r.means.mean_obstacle_distance)};
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "agent";
  for (const char* c : kColumns) out << ',' << c;
  out << '\n';
  for (const ReportRow& r : rows) {
    out << r.label;
    for (const std::string& cell : row_cells(r)) out << ',' << cell;
    out << '\n';
  }
  return out.str();
}

std::string report_table(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header{"agent"};
  for (const char* c : kColumns) header.push_back(c);
  table.push_back(header);
  for (const ReportRow& r : rows) {
    std::vector<std::string> cells{r.label};
    for (auto& c : row_cells(r)) cells.push_back(c);
    table.push_back(std::move(cells));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : table)
    for (std::size_t c = 0; c < row.size(); ++c)
      widths[c] = std::max(widths[c], row[c].size());
  std::ostringstream out;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << std::left << std::setw(static_cast<int>(widths[c]) + 2) << row[c];
    out << '\n';
  }
  return out.str();
}

void write_trace_csv(const EpisodeTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BenchError("cannot write trace: " + path);
  out.precision(17);
  out << "# outcome=" << outcome_name(trace.outcome) << '\n';
  out << "# dt=" << trace.dt << '\n';
  out << "# start=" << trace.start.x << ',' << trace.start.y << '\n';
  out << "# goal=" << trace.goal.x << ',' << trace.goal.y << '\n';
  out << "t,x,y,theta,v_x,v_y,omega,min_range\n";
  for (const TraceStep& s : trace.steps)
    out << s.t << ',' << s.pose.x << ',' << s.pose.y << ',' << s.pose.theta
        << ',' << s.velocity.v_x << ',' << s.velocity.v_y << ','
        << s.velocity.omega << ',' << s.min_range << '\n';
}

EpisodeTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BenchError("cannot open trace: " + path);
  EpisodeTrace trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "outcome") {
        for (Outcome o : {Outcome::kGoalReached, Outcome::kCollision,
                          Outcome::kTimeout, Outcome::kRunning})
          if (value == outcome_name(o)) trace.outcome = o;
      } else if (key == "dt") {
        trace.dt = std::stod(value);
      } else if (key == "start" || key == "goal") {
        const auto comma = value.find(',');
        const Vec2 v{std::stod(value.substr(0, comma)),
                     std::stod(value.substr(comma + 1))};
        (key == "start" ? trace.start : trace.goal) = v;
      }
      continue;
    }
    if (line.rfind("t,", 0) == 0) continue;  // header
    std::istringstream ss(line);
    TraceStep s;
    char comma;
    ss >> s.t >> comma >> s.pose.x >> comma >> s.pose.y >> comma >>
        s.pose.theta >> comma >> s.velocity.v_x >> comma >> s.velocity.v_y >>
        comma >> s.velocity.omega >> comma >> s.min_range;
    if (!ss.fail()) trace.steps.push_back(s);
  }
  if (trace.steps.empty()) throw BenchError("trace has no rows: " + path);
  return trace;
}

}  // namespace navgym::bench
