#pragma once

#include <optional>
#include <string>
#include <vector>

#include "profil/policy.hpp"
#include "profil/probe.hpp"
#include "profil/rng.hpp"
#include "profil/types.hpp"

namespace modchain {

// One task's group of rollout statistics within a training step.
struct GroupBatch {
  std::vector<double> rewards;           // r, length K
  std::vector<double> filtered_rewards;  // r~, zeroed where filtered
  std::vector<int> keep_mask;            // 1 where the rollout survives
  std::vector<double> p_bars;            // mean probe score per rollout
  std::vector<double> advantages;
  double mu = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
};

struct TauSchedule {
  enum class Mode { Fixed, Adaptive } mode = Mode::Fixed;
  double tau_fixed = 0.5;
  double tau_min = 0.20;
  double tau_max = 0.50;
  double r_lo = 0.10;
  double r_hi = 0.40;
  double ema_decay = 0.9;
  double r_bar = 0.0;
};

enum class RewardMode { Plain, LengthPenalty };
enum class GroupStatsMode { All, Unfiltered };

struct TrainerConfig {
  int group_size = 8;
  double lr = 0.05;
  int steps = 200;
  RewardMode reward_mode = RewardMode::Plain;
  double lambda = 0.01;
  bool filter_enabled = false;
  GroupStatsMode group_stats_mode = GroupStatsMode::All;
  double temperature = 1.0;
  int max_len = 24;
};

// keep_mask[k] = p_bars[k] < tau (the filter fires at equality); r~ = r*mask.
std::pair<std::vector<double>, std::vector<int>> apply_probe_filter(
    const std::vector<double>& r, const std::vector<double>& p_bars, double tau);

struct Advantages {
  std::vector<double> a;
  double mu = 0.0;
  double sigma = 0.0;
};

// Z-scored filtered rewards, re-masked so filtered rollouts carry exactly
// zero advantage. Mode All takes mu/sigma over every entry of r~ (zeros
// included); Unfiltered uses kept entries only. sigma below 1e-8 zeroes the
// whole group.
Advantages group_advantages(const std::vector<double>& filtered_rewards,
                            const std::vector<int>& keep_mask, GroupStatsMode mode);

double length_penalty_reward(double r, int chain_steps, double lambda);

// tau_min + (tau_max - tau_min) * clip((r_bar - r_lo)/(r_hi - r_lo), 0, 1).
double adaptive_tau(const TauSchedule& schedule);

TauSchedule update_ema(TauSchedule schedule, double batch_mean_reward);

struct StepStats {
  double mean_reward = 0.0;  // batch mean, before filtering
  double filter_rate = 0.0;
  double tau = 0.0;
  double mean_p_bar = 0.0;
  double accuracy = 0.0;
  std::vector<GroupBatch> groups;
};

// One update: per task, K sampled rollouts; verifier rewards, optional
// length penalty, optional probe filter; group-relative advantages; ascent
// on the mean advantage-weighted log-prob surrogate, averaged over the
// rollouts the filter kept. Filtered rollouts never touch the gradient.
PolicyParams grpo_step(const PolicyParams& params, const FrozenBase& base,
                       const Probe* probe, const std::vector<Task>& tasks_batch,
                       const TrainerConfig& cfg, TauSchedule& schedule, RngStream rng,
                       StepStats* stats_out = nullptr);

// AUROC of per-step frozen-probe scores against oracle labels over the
// whole set. Activations are recomputed through the frozen base, so the
// rollouts themselves need not carry any. Single-class input has no defined
// value.
std::optional<double> audit_frozen_probe(const Probe& probe, const FrozenBase& base,
                                         const std::vector<LabeledTaskRollout>& labeled,
                                         int max_len);

}  // namespace modchain
