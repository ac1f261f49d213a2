#pragma once

#include <string>

#include "navgym/bench.hpp"
#include "navgym/env.hpp"
#include "navgym/trainer.hpp"

namespace navgym {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Everything one experiment needs: simulation settings (world, robot,
// sensors, episode, reward) plus training details and the evaluation
// couples. Parsed from a single YAML parameters file.
struct ExperimentConfig {
  std::string world_path;  // relative paths resolve against the config file
  World world;
  PlatformSpec platform;
  SensorConfig sensors;
  EpisodeConfig episode;
  RewardSpec reward;
  drl::TrainerConfig training;
  bench::BenchmarkSpec test;

  NavEnv make_env() const;
};

ExperimentConfig load_experiment(const std::string& path);
ExperimentConfig parse_experiment(const std::string& yaml_text,
                                  const std::string& base_dir);

}  // namespace navgym
