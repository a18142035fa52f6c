#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "profil/config.hpp"
#include "profil/policy.hpp"
#include "profil/probe.hpp"
#include "profil/rollout_io.hpp"
#include "profil/trainer.hpp"

namespace modchain {

inline constexpr std::array<const char*, 3> kConditions = {"baseline", "length_penalty",
                                                           "profil"};

// Stage-by-stage pipeline over one artifact directory. Each stage loads its
// persisted artifact when present and rebuilds it otherwise, so any
// subcommand resumes from whatever an earlier invocation left behind. All
// randomness is derived from config.seed by purpose string, never from call
// order, and the task/rollout streams carry no condition tag: the three
// training conditions see identical task sequences and sampling streams,
// which pairs their comparisons.
class Experiment {
 public:
  Experiment(ExperimentConfig cfg, std::filesystem::path dir);

  void run_pretrain();    // demos.jsonl, policy_base.txt
  void run_train_probe(); // probe_rollouts.jsonl, probe.txt, probe_reference_scores.txt
  void run_grpo(const std::string& condition);  // policy_<c>.txt, checkpoints/, train_log_<c>.csv
  void run_eval(const std::string& condition);  // eval_<c>.jsonl, eval_greedy_<c>.jsonl
  void run_audit();       // audit.csv
  void run_sweep_theta(); // theta_sweep.csv
  void run_steer();       // steer.csv, student_probe.csv
  void run_report();      // metrics.csv, deciles.csv, terciles.csv
  void run_all();

  const std::vector<Task>& train_tasks();
  const std::vector<Task>& eval_tasks();
  const PolicyParams& base_policy();
  const Probe& frozen_probe();
  double probe_held_out_auroc();
  const PolicyParams& trained_policy(const std::string& condition);
  const std::vector<CachedRollout>& probe_rollouts();
  const std::vector<CachedRollout>& eval_sampled(const std::string& condition);
  const std::vector<CachedRollout>& eval_greedy(const std::string& condition);

  std::filesystem::path artifact(const std::string& name) const { return dir_ / name; }
  const ExperimentConfig& config() const { return cfg_; }

 private:
  RngStream stream(const std::string& purpose) const;
  TrainerConfig trainer_config(const std::string& condition) const;
  std::vector<CachedRollout> sample_cache(const PolicyParams& policy,
                                          const std::vector<Task>& tasks, int count,
                                          double temperature, const std::string& purpose,
                                          const std::string& condition, int checkpoint,
                                          bool record_activations);
  void attach_probe_scores(std::vector<CachedRollout>& cache);
  std::vector<LabeledTaskRollout> labeled_from_cache(const std::vector<CachedRollout>& cache);

  ExperimentConfig cfg_;
  std::filesystem::path dir_;

  std::optional<std::vector<Task>> train_tasks_, eval_tasks_;
  std::optional<PolicyParams> base_;
  std::optional<Probe> probe_;
  double probe_auroc_ = 0.0;
  std::map<std::string, PolicyParams> trained_;
  std::optional<std::vector<CachedRollout>> probe_rollouts_;
  std::map<std::string, std::vector<CachedRollout>> eval_sampled_, eval_greedy_;
};

// Full pipeline into `dir`; the one-call entry point behind the CLI.
void run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir);

}  // namespace modchain
