#include "profil/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace modchain {

namespace {

void fill_uniform(Eigen::MatrixXd& w, RngStream& rng, double bound) {
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
}

// Log-softmax of logits/temperature, numerically stabilized.
Eigen::Vector3d log_softmax3(const Eigen::Vector3d& logits, double temperature) {
  const Eigen::Vector3d scaled = logits / temperature;
  const double m = scaled.maxCoeff();
  const double lse = m + std::log((scaled.array() - m).exp().sum());
  return scaled.array() - lse;
}

int argmax3(const Eigen::Vector3d& v) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Backprop of d_logits through the network at one decision state.
void backprop_step(const PolicyParams& p, const Eigen::VectorXd& feat,
                   const StepActivations& acts, const Eigen::Vector3d& d_logits,
                   PolicyParams& grad) {
  grad.W3 += acts.a2 * d_logits.transpose();
  grad.b3 += d_logits;
  const Eigen::VectorXd da2 = p.W3 * d_logits;
  const Eigen::VectorXd dz2 =
      (1.0 - acts.a2.array().square()).matrix().cwiseProduct(da2);
  grad.W2 += acts.a1 * dz2.transpose();
  grad.b2 += dz2;
  const Eigen::VectorXd da1 = p.W2 * dz2;
  const Eigen::VectorXd dz1 =
      (1.0 - acts.a1.array().square()).matrix().cwiseProduct(da1);
  grad.W1 += feat * dz1.transpose();
  grad.b1 += dz1;
}

}  // namespace

bool params_equal(const PolicyParams& a, const PolicyParams& b) {
  const auto eq_m = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
  };
  const auto eq_v = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.size() == y.size() && (x.array() == y.array()).all();
  };
  return eq_m(a.W1, b.W1) && eq_v(a.b1, b.b1) && eq_m(a.W2, b.W2) && eq_v(a.b2, b.b2) &&
         eq_m(a.W3, b.W3) && eq_v(a.b3, b.b3);
}

PolicyParams zero_like(const PolicyParams& p) {
  PolicyParams z;
  z.W1 = Eigen::MatrixXd::Zero(p.W1.rows(), p.W1.cols());
  z.b1 = Eigen::VectorXd::Zero(p.b1.size());
  z.W2 = Eigen::MatrixXd::Zero(p.W2.rows(), p.W2.cols());
  z.b2 = Eigen::VectorXd::Zero(p.b2.size());
  z.W3 = Eigen::MatrixXd::Zero(p.W3.rows(), p.W3.cols());
  z.b3 = Eigen::VectorXd::Zero(p.b3.size());
  return z;
}

void axpy(PolicyParams& dst, const PolicyParams& g, double scale) {
  dst.W1 += scale * g.W1;
  dst.b1 += scale * g.b1;
  dst.W2 += scale * g.W2;
  dst.b2 += scale * g.b2;
  dst.W3 += scale * g.W3;
  dst.b3 += scale * g.b3;
}

Eigen::VectorXd step_features(const Task& task, const EnvState& s, int max_len) {
  Eigen::VectorXd f(kFeatureDim);
  f[0] = static_cast<double>(s.incorporated) / task.size();
  f[1] = static_cast<double>(s.steps_elapsed) / max_len;
  f[2] = s.last_action == Action::Add ? 1.0 : 0.0;
  f[3] = s.last_action == Action::Elab ? 1.0 : 0.0;
  f[4] = (!s.last_action || *s.last_action == Action::Stop) ? 1.0 : 0.0;
  f[5] = 1.0;
  return f;
}

ForwardResult policy_forward(const PolicyParams& p, const Eigen::VectorXd& feat,
                             const LayerShift* shift) {
  if (feat.size() != p.W1.rows())
    throw std::invalid_argument("policy_forward: feature dim mismatch");
  ForwardResult out;
  out.acts.a1 = (p.W1.transpose() * feat + p.b1).array().tanh();
  if (shift && shift->layer == 1) out.acts.a1 += shift->delta;
  out.acts.a2 = (p.W2.transpose() * out.acts.a1 + p.b2).array().tanh();
  if (shift && shift->layer == 2) out.acts.a2 += shift->delta;
  out.logits = p.W3.transpose() * out.acts.a2 + p.b3;
  if (!out.logits.allFinite()) throw std::runtime_error("policy_forward: non-finite logits");
  return out;
}

Eigen::Vector3d softmax3(const Eigen::Vector3d& logits) {
  const double m = logits.maxCoeff();
  Eigen::Vector3d e = (logits.array() - m).exp();
  return e / e.sum();
}

PolicyParams init_policy(RngStream rng, int feat_dim, int hidden) {
  if (feat_dim < 1 || hidden < 1)
    throw std::invalid_argument("init_policy: dims must be positive");
  PolicyParams p;
  p.W1.resize(feat_dim, hidden);
  p.W2.resize(hidden, hidden);
  p.W3.resize(hidden, 3);
  fill_uniform(p.W1, rng, 1.0 / std::sqrt(feat_dim));
  fill_uniform(p.W2, rng, 1.0 / std::sqrt(hidden));
  fill_uniform(p.W3, rng, 1.0 / std::sqrt(hidden));
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.b2 = Eigen::VectorXd::Zero(hidden);
  p.b3 = Eigen::VectorXd::Zero(3);
  return p;
}

FrozenBase freeze_base(const PolicyParams& p) { return FrozenBase{p}; }

Rollout sample_rollout(const PolicyParams& params, const Task& task, double temperature,
                       int max_len, RngStream rng, const FrozenBase& base,
                       bool record_activations, const LayerShift* shift) {
  if (temperature < 0.0) throw std::invalid_argument("sample_rollout: temperature < 0");
  if (max_len < 1) throw std::invalid_argument("sample_rollout: max_len < 1");
  Rollout out;
  out.task_id = task.id;
  out.seed = rng.stream_id();
  if (record_activations) out.activations.emplace();

  EnvState s = initial_state();
  while (static_cast<int>(out.actions.size()) < max_len) {
    const Eigen::VectorXd feat = step_features(task, s, max_len);
    const ForwardResult fwd = policy_forward(params, feat, shift);
    Action a;
    double logprob;
    if (temperature == 0.0) {
      a = static_cast<Action>(argmax3(fwd.logits));
      logprob = 0.0;
    } else {
      const Eigen::Vector3d logp = log_softmax3(fwd.logits, temperature);
      const Eigen::Vector3d probs = logp.array().exp();
      const double u = rng.next_double();
      int idx = 2;
      double cum = 0.0;
      for (int i = 0; i < 3; ++i) {
        cum += probs[i];
        if (u < cum) {
          idx = i;
          break;
        }
      }
      a = static_cast<Action>(idx);
      logprob = logp[idx];
    }
    out.actions.push_back(a);
    out.step_logprobs.push_back(logprob);
    s = transition(task, s, a);
    if (a == Action::Stop) break;
    out.forced_answers.push_back(forced_answer(task, s));
    if (record_activations)
      out.activations->push_back(policy_forward(base.params, feat).acts);
  }

  if (s.done) {
    out.answer = forced_answer(task, s);
    out.correct = verify(task, *out.answer);
  }
  return out;
}

std::vector<StepActivations> recompute_activations(const PolicyParams& net, const Task& task,
                                                   const std::vector<Action>& actions,
                                                   int max_len) {
  std::vector<StepActivations> acts;
  EnvState s = initial_state();
  for (Action a : actions) {
    if (a == Action::Stop) break;
    acts.push_back(policy_forward(net, step_features(task, s, max_len)).acts);
    s = transition(task, s, a);
  }
  return acts;
}

void accumulate_logprob_grad(const PolicyParams& params, const Task& task,
                             const Rollout& rollout, double weight, double temperature,
                             int max_len, PolicyParams& grad_out) {
  if (weight == 0.0) return;
  if (temperature <= 0.0)
    throw std::invalid_argument("accumulate_logprob_grad: temperature must be > 0");
  EnvState s = initial_state();
  for (Action a : rollout.actions) {
    const Eigen::VectorXd feat = step_features(task, s, max_len);
    const ForwardResult fwd = policy_forward(params, feat);
    Eigen::Vector3d d_logits = -softmax3(fwd.logits / temperature);
    d_logits[static_cast<int>(a)] += 1.0;
    d_logits *= weight / temperature;
    backprop_step(params, feat, fwd.acts, d_logits, grad_out);
    s = transition(task, s, a);
    if (a == Action::Stop) break;
  }
}

double bc_loss(const PolicyParams& params, const std::vector<Rollout>& demos,
               const TaskMap& tasks, int max_len) {
  if (demos.empty()) throw std::invalid_argument("bc_loss: empty demos");
  double total = 0.0;
  std::size_t steps = 0;
  for (const Rollout& demo : demos) {
    const Task& task = tasks.at(demo.task_id);
    EnvState s = initial_state();
    for (Action a : demo.actions) {
      const ForwardResult fwd = policy_forward(params, step_features(task, s, max_len));
      total -= log_softmax3(fwd.logits, 1.0)[static_cast<int>(a)];
      ++steps;
      s = transition(task, s, a);
      if (a == Action::Stop) break;
    }
  }
  return total / static_cast<double>(steps);
}

PolicyParams behavior_clone(PolicyParams params, const std::vector<Rollout>& demos,
                            const TaskMap& tasks, int epochs, double lr, int max_len) {
  if (demos.empty()) throw std::invalid_argument("behavior_clone: empty demos");
  if (lr <= 0.0) throw std::invalid_argument("behavior_clone: lr must be > 0");
  std::size_t total_steps = 0;
  for (const Rollout& demo : demos) total_steps += demo.actions.size();
  const double w = 1.0 / static_cast<double>(total_steps);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    PolicyParams grad = zero_like(params);
    for (const Rollout& demo : demos)
      accumulate_logprob_grad(params, tasks.at(demo.task_id), demo, w, 1.0, max_len, grad);
    // Ascent on mean log-likelihood == descent on the cross-entropy loss.
    axpy(params, grad, lr);
  }
  return params;
}

}  // namespace modchain
