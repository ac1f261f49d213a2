// Command-line front end: train agents, evaluate checkpoints, validate
// world files, and recompute metric reports from stored traces.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "navgym/bench.hpp"
#include "navgym/config.hpp"
#include "navgym/trainer.hpp"
#include "navgym/world.hpp"

namespace fs = std::filesystem;
using namespace navgym;

namespace {

int run_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  ExperimentConfig cfg = load_experiment(config_path);
  if (seed) {
    cfg.training.seed = *seed;
    cfg.training.agent.init_seed = *seed;
    cfg.episode.seed = *seed;
  }
  cfg.training.out_dir = out_dir;
  NavEnv env = cfg.make_env();
  drl::Trainer trainer(env, cfg.training);
  trainer.run();
  std::cout << "training complete: " << trainer.log().size() << " episodes, "
            << trainer.env_steps() << " environment steps\n";
  if (!out_dir.empty())
    std::cout << "log: " << out_dir << "/training_log.csv\n"
              << "checkpoint: " << out_dir << "/checkpoint.json\n";
  return 0;
}

int run_test(const std::string& config_path, const std::string& checkpoint,
             const std::string& report_path, const std::string& traces_dir) {
  ExperimentConfig cfg = load_experiment(config_path);
  NavEnv env = cfg.make_env();
  auto agent = drl::load_agent_checkpoint(checkpoint, env);
  bench::BenchmarkSpec spec = cfg.test;
  if (spec.couples.empty())
    throw ConfigError("test.couples: at least one start-goal couple required");
  spec.checkpoint_path = checkpoint;

  const auto traces = bench::run_evaluation(env, *agent, spec);
  std::vector<std::pair<std::string, bench::MetricsRow>> rows;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    rows.emplace_back(spec.agent_label,
                      bench::compute_metrics(traces[i], cfg.world));
    if (!traces_dir.empty()) {
      fs::create_directories(traces_dir);
      bench::write_trace_csv(
          traces[i], traces_dir + "/trace_" + std::to_string(i) + ".csv");
    }
  }
  const auto report = bench::aggregate_report(rows);
  std::cout << bench::report_table(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw bench::BenchError("cannot write report: " + report_path);
    out << bench::report_csv(report);
    std::cout << "report: " << report_path << '\n';
  }
  return 0;
}

int run_validate(const std::string& world_path) {
  const World w = load_world(world_path);
  std::cout << "ok: " << w.obstacles.size() << " obstacles, "
            << w.spawn_regions.size() << " spawn region(s), "
            << w.goal_regions.size() << " goal region(s)\n";
  return 0;
}

int run_report(const std::string& traces_dir, const std::string& world_path,
               const std::string& label, const std::string& report_path) {
  const World w = load_world(world_path);
  std::vector<std::pair<std::string, bench::MetricsRow>> rows;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(traces_dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const bench::EpisodeTrace trace = bench::read_trace_csv(f.string());
    rows.emplace_back(label, bench::compute_metrics(trace, w));
  }
  if (rows.empty()) throw bench::BenchError("no trace CSVs in " + traces_dir);
  const auto report = bench::aggregate_report(rows);
  std::cout << bench::report_table(report);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    out << bench::report_csv(report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"headless robot-navigation DRL gym and benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "runs/latest", checkpoint, report_path;
  std::string world_path, traces_dir, label = "agent";
  std::optional<std::uint64_t> seed;

  auto* train = app.add_subcommand("train", "train an agent from a parameters file");
  train->add_option("--config", config_path, "parameters YAML file")->required();
  train->add_option("--seed", seed, "override the training seed");
  train->add_option("--out", out_dir, "output directory for logs and checkpoints");

  auto* test = app.add_subcommand("test", "evaluate a checkpoint and report metrics");
  test->add_option("--config", config_path, "parameters YAML file")->required();
  test->add_option("--checkpoint", checkpoint, "agent checkpoint file")->required();
  test->add_option("--report", report_path, "write the report CSV here");
  test->add_option("--traces", traces_dir, "write per-episode trace CSVs here");

  auto* validate = app.add_subcommand("validate-world", "check a world file");
  validate->add_option("file", world_path, "world YAML file")->required();

  auto* report = app.add_subcommand("report", "recompute metrics from stored traces");
  report->add_option("--traces", traces_dir, "directory of trace CSVs")->required();
  report->add_option("--world", world_path, "world YAML file")->required();
  report->add_option("--label", label, "agent label for the report");
  report->add_option("--out", report_path, "write the report CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(config_path, seed, out_dir);
    if (*test) return run_test(config_path, checkpoint, report_path, traces_dir);
    if (*validate) return run_validate(world_path);
    if (*report) return run_report(traces_dir, world_path, label, report_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
