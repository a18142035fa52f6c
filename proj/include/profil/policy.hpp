#pragma once

#include <Eigen/Dense>
#include <vector>

#include "profil/env.hpp"
#include "profil/rng.hpp"
#include "profil/types.hpp"

namespace modchain {

// Two-hidden-layer softmax policy over {ADD, ELAB, STOP}.
// a1 = tanh(W1'f + b1), a2 = tanh(W2'a1 + b2), logits = W3'a2 + b3.
struct PolicyParams {
  Eigen::MatrixXd W1;  // F x d
  Eigen::VectorXd b1;  // d
  Eigen::MatrixXd W2;  // d x d
  Eigen::VectorXd b2;  // d
  Eigen::MatrixXd W3;  // d x 3
  Eigen::VectorXd b3;  // 3
};

bool params_equal(const PolicyParams& a, const PolicyParams& b);
PolicyParams zero_like(const PolicyParams& p);
// dst += scale * g, elementwise over every field.
void axpy(PolicyParams& dst, const PolicyParams& g, double scale);

// Snapshot whose activations stay fixed while the live policy trains.
struct FrozenBase {
  PolicyParams params;
};

// Additive offset applied to one post-tanh hidden layer before the next
// layer reads it. Used by activation steering; layer is 1 or 2.
struct LayerShift {
  int layer = 1;
  Eigen::VectorXd delta;
};

inline constexpr int kFeatureDim = 6;

// [incorporated/n, steps_elapsed/L, one-hot(last in {ADD, ELAB, none}), 1].
Eigen::VectorXd step_features(const Task& task, const EnvState& s, int max_len);

struct ForwardResult {
  Eigen::Vector3d logits;
  StepActivations acts;
};

ForwardResult policy_forward(const PolicyParams& p, const Eigen::VectorXd& feat,
                             const LayerShift* shift = nullptr);

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits);

// Weights uniform in +-1/sqrt(fan_in), biases zero.
PolicyParams init_policy(RngStream rng, int feat_dim = kFeatureDim, int hidden = 16);

FrozenBase freeze_base(const PolicyParams& p);

// Samples until Stop or max_len actions. temperature 0 takes the argmax and
// records log-prob 0 per action. Activations are read from `base`, never
// from the live params; steering, if any, applies to the live params only.
Rollout sample_rollout(const PolicyParams& params, const Task& task, double temperature,
                       int max_len, RngStream rng, const FrozenBase& base,
                       bool record_activations = true, const LayerShift* shift = nullptr);

// Hidden activations of `net` at each reasoning step's decision state, for
// a replayed action sequence (terminal Stop, if present, excluded).
std::vector<StepActivations> recompute_activations(const PolicyParams& net, const Task& task,
                                                   const std::vector<Action>& actions,
                                                   int max_len);

// grad_out += weight * d/dtheta sum_t log pi(a_t|s_t), analytic, with logits
// scaled by 1/temperature. Every recorded action counts, terminal Stop
// included.
void accumulate_logprob_grad(const PolicyParams& params, const Task& task,
                             const Rollout& rollout, double weight, double temperature,
                             int max_len, PolicyParams& grad_out);

// Mean cross-entropy of demo actions under the policy.
double bc_loss(const PolicyParams& params, const std::vector<Rollout>& demos,
               const TaskMap& tasks, int max_len);

// Full-batch gradient descent on bc_loss; fixed lr, deterministic.
PolicyParams behavior_clone(PolicyParams params, const std::vector<Rollout>& demos,
                            const TaskMap& tasks, int epochs, double lr, int max_len);

}  // namespace modchain
