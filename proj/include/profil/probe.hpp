#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "profil/labeling.hpp"
#include "profil/policy.hpp"
#include "profil/rng.hpp"
#include "profil/types.hpp"

namespace modchain {

// Gated multi-head attention scorer over one step's two activation vectors.
// Each layer contributes one token: its standardized activation under a
// learned gain/offset, projected by per-layer key/value matrices shared
// across heads. Heads differ only in query and gate.
struct Probe {
  int H = 8;
  int d_h = 8;
  Eigen::VectorXd gain1, offset1;  // d
  Eigen::VectorXd gain2, offset2;  // d
  Eigen::MatrixXd K1, V1;          // d x d_h
  Eigen::MatrixXd K2, V2;          // d x d_h
  Eigen::MatrixXd Q;               // d_h x H, one query per column
  Eigen::VectorXd gamma;           // H gate pre-activations
  Eigen::VectorXd w_o;             // d_h
  double b_o = 0.0;
};

bool probe_equal(const Probe& a, const Probe& b);

struct ProbeScores {
  std::vector<double> per_step;
  double mean = 0.0;
};

// Score in (0,1) for one step.
double probe_forward(const Probe& probe, const StepActivations& acts);

// Per-step scores and their mean, from the rollout's stored frozen-base
// activations.
ProbeScores mean_performativity(const Probe& probe, const Rollout& rollout);

// Same, recomputing activations through the frozen base.
ProbeScores mean_performativity(const Probe& probe, const FrozenBase& base, const Task& task,
                                const Rollout& rollout, int max_len);

struct LabeledRollout {
  Rollout rollout;
  CommitmentLabel label;
};

struct ProbeHyper {
  double lr = 0.01;
  int epochs = 200;
  int heads = 8;
  int head_dim = 8;
  double holdout_frac = 0.2;
};

struct ProbeTrainResult {
  Probe probe;
  double held_out_auroc = 0.0;
};

struct ProbeBce {
  double loss = 0.0;
  Probe grad;
};

// Mean binary cross-entropy of per-step scores against {0,1} labels, with
// its exact parameter gradient. This is the objective train_probe descends.
ProbeBce probe_bce(const Probe& probe, const std::vector<StepActivations>& steps,
                   const std::vector<int>& labels);

// Full-batch Adam on per-step binary cross-entropy against the commitment
// labels; rollout-level holdout split; returns the epoch snapshot with the
// highest held-out AUROC. Rollouts must carry activations.
ProbeTrainResult train_probe(const std::vector<LabeledRollout>& labeled,
                             const ProbeHyper& hyper, RngStream rng);

// A rollout paired with its task and oracle step labels; the unit consumed
// by the audit and by student-probe training, where activations are
// recomputed rather than read from the rollout.
struct LabeledTaskRollout {
  Task task;
  Rollout rollout;
  CommitmentLabel label;
};

struct StudentAgreement {
  double pearson_of_means = 0.0;
  double held_out_auroc = 0.0;
};

// Trains an identically-shaped probe on activations recomputed under the
// trained policy, then reports how its per-rollout mean scores track the
// frozen probe's.
std::pair<Probe, StudentAgreement> train_student_probe(
    const PolicyParams& policy, const std::vector<LabeledTaskRollout>& labeled,
    const Probe& frozen_probe, const ProbeHyper& hyper, int max_len, RngStream rng);

struct SteeringVector {
  int layer = 1;  // 1 or 2
  Eigen::VectorXd v;
  double coefficient = 0.0;
};

// Difference of class-mean activations at `layer`: performative minus
// faithful, over the given labeled rollouts' stored activations.
SteeringVector contrast_vector(const std::vector<LabeledRollout>& labeled, int layer);

struct CaaRow {
  double coefficient = 0.0;
  double mean_perf_ratio = 0.0;
  double accuracy = 0.0;
};

struct CaaConfig {
  int layer = 1;
  std::vector<double> coefficients;
  double temperature = 1.0;
  int max_len = 24;
};

// For each coefficient c, evaluates the policy with its hidden layer shifted
// by -c*v and reports oracle perf-ratio and accuracy. Every coefficient
// replays the same rng, so rows are paired.
std::vector<CaaRow> caa_sweep(const PolicyParams& policy, const FrozenBase& base,
                              const std::vector<LabeledRollout>& baseline_labeled,
                              const CaaConfig& cfg, const std::vector<Task>& eval_tasks,
                              RngStream rng);

}  // namespace modchain
