#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "profil/env.hpp"

namespace modchain {

// Flat dotted-key configuration describing one full run. Every field has a
// working default; a config file only lists overrides.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  // Narrower than the full task domain: short chains against large moduli keep
  // accidental forced-answer matches rare, so step labels mostly reflect
  // padding rather than luck. The full domain stays available via overrides.
  EnvConfig env{2, 4, 9, 13, 24};

  struct Policy {
    int hidden = 16;
    double temperature = 1.0;
  } policy;

  struct Bc {
    int epochs = 200;
    double lr = 0.05;
    int demo_count = 2000;
    double theater_p = 0.5;
  } bc;

  struct ProbeCfg {
    int heads = 8;
    int head_dim = 8;
    double lr = 0.01;
    int epochs = 200;
    double holdout_frac = 0.2;
    int rollouts = 800;  // labeled rollouts sampled for probe training
  } probe;

  struct Grpo {
    int steps = 200;
    int group_size = 8;
    int tasks_per_step = 16;
    double lr = 0.05;
    std::string condition = "profil";  // baseline | length_penalty | profil
    std::string tau_mode = "fixed";    // fixed | adaptive
    double tau_fixed = 0.2;
    double lambda = 0.01;
    std::string group_stats_mode = "all";  // all | unfiltered
  } grpo;

  struct Eval {
    int task_count = 500;
    double delta_faithful = 0.1;
    double theta_probe = 0.5;
    std::vector<double> thresholds_sweep = {0.05, 0.1, 0.2, 0.5};
  } eval;

  int train_task_count = 1000;
};

// key=value lines, '#' comments, blank lines ignored. Unknown or malformed
// keys raise an error naming the key.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate_config(const ExperimentConfig& cfg);

std::string config_to_text(const ExperimentConfig& cfg);

}  // namespace modchain
