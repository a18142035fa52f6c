#include "profil/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "profil/stats.hpp"

namespace modchain {

namespace {

constexpr double kNormEps = 1e-5;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Mean 0, variance 1 across the vector's entries. Constant w.r.t. probe
// parameters, so no gradient flows through it.
Eigen::VectorXd standardize(const Eigen::VectorXd& a) {
  const double mu = a.mean();
  const double var = (a.array() - mu).square().mean();
  return (a.array() - mu) / std::sqrt(var + kNormEps);
}

struct Trace {
  Eigen::VectorXd xhat1, xhat2;
  Eigen::VectorXd u1, u2;
  Eigen::VectorXd k1, k2, v1, v2;
  Eigen::MatrixXd alpha;  // 2 x H
  Eigen::MatrixXd heads;  // d_h x H
  Eigen::VectorXd z;
  double logit = 0.0;
  double score = 0.0;
};

Trace forward_trace(const Probe& p, const StepActivations& acts) {
  if (acts.a1.size() != p.gain1.size() || acts.a2.size() != p.gain2.size())
    throw std::invalid_argument("probe_forward: activation dim mismatch");
  Trace t;
  t.xhat1 = standardize(acts.a1);
  t.xhat2 = standardize(acts.a2);
  t.u1 = t.xhat1.cwiseProduct(p.gain1) + p.offset1;
  t.u2 = t.xhat2.cwiseProduct(p.gain2) + p.offset2;
  t.k1 = p.K1.transpose() * t.u1;
  t.k2 = p.K2.transpose() * t.u2;
  t.v1 = p.V1.transpose() * t.u1;
  t.v2 = p.V2.transpose() * t.u2;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(p.d_h));
  t.alpha.resize(2, p.H);
  t.heads.resize(p.d_h, p.H);
  t.z = Eigen::VectorXd::Zero(p.d_h);
  for (int h = 0; h < p.H; ++h) {
    const double s1 = p.Q.col(h).dot(t.k1) * inv_sqrt;
    const double s2 = p.Q.col(h).dot(t.k2) * inv_sqrt;
    const double m = std::max(s1, s2);
    const double e1 = std::exp(s1 - m);
    const double e2 = std::exp(s2 - m);
    t.alpha(0, h) = e1 / (e1 + e2);
    t.alpha(1, h) = e2 / (e1 + e2);
    t.heads.col(h) = t.alpha(0, h) * t.v1 + t.alpha(1, h) * t.v2;
    t.z += sigmoid(p.gamma[h]) * t.heads.col(h);
  }
  t.logit = p.w_o.dot(t.z) + p.b_o;
  t.score = sigmoid(t.logit);
  return t;
}

Probe zero_probe_like(const Probe& p) {
  Probe z;
  z.H = p.H;
  z.d_h = p.d_h;
  z.gain1 = Eigen::VectorXd::Zero(p.gain1.size());
  z.offset1 = Eigen::VectorXd::Zero(p.offset1.size());
  z.gain2 = Eigen::VectorXd::Zero(p.gain2.size());
  z.offset2 = Eigen::VectorXd::Zero(p.offset2.size());
  z.K1 = Eigen::MatrixXd::Zero(p.K1.rows(), p.K1.cols());
  z.V1 = Eigen::MatrixXd::Zero(p.V1.rows(), p.V1.cols());
  z.K2 = Eigen::MatrixXd::Zero(p.K2.rows(), p.K2.cols());
  z.V2 = Eigen::MatrixXd::Zero(p.V2.rows(), p.V2.cols());
  z.Q = Eigen::MatrixXd::Zero(p.Q.rows(), p.Q.cols());
  z.gamma = Eigen::VectorXd::Zero(p.gamma.size());
  z.w_o = Eigen::VectorXd::Zero(p.w_o.size());
  z.b_o = 0.0;
  return z;
}

// Accumulates d(loss)/d(params) for one step given d(loss)/d(logit).
void backprop_trace(const Probe& p, const Trace& t, double dlogit, Probe& grad) {
  grad.b_o += dlogit;
  grad.w_o += dlogit * t.z;
  const Eigen::VectorXd dz = dlogit * p.w_o;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(p.d_h));
  Eigen::VectorXd dk1 = Eigen::VectorXd::Zero(p.d_h);
  Eigen::VectorXd dk2 = Eigen::VectorXd::Zero(p.d_h);
  Eigen::VectorXd dv1 = Eigen::VectorXd::Zero(p.d_h);
  Eigen::VectorXd dv2 = Eigen::VectorXd::Zero(p.d_h);
  for (int h = 0; h < p.H; ++h) {
    const double g = sigmoid(p.gamma[h]);
    grad.gamma[h] += dz.dot(t.heads.col(h)) * g * (1.0 - g);
    const Eigen::VectorXd dhead = g * dz;
    const double dalpha1 = dhead.dot(t.v1);
    const double dalpha2 = dhead.dot(t.v2);
    dv1 += t.alpha(0, h) * dhead;
    dv2 += t.alpha(1, h) * dhead;
    const double mix = t.alpha(0, h) * dalpha1 + t.alpha(1, h) * dalpha2;
    const double ds1 = t.alpha(0, h) * (dalpha1 - mix);
    const double ds2 = t.alpha(1, h) * (dalpha2 - mix);
    grad.Q.col(h) += (ds1 * t.k1 + ds2 * t.k2) * inv_sqrt;
    dk1 += ds1 * inv_sqrt * p.Q.col(h);
    dk2 += ds2 * inv_sqrt * p.Q.col(h);
  }
  grad.K1 += t.u1 * dk1.transpose();
  grad.K2 += t.u2 * dk2.transpose();
  grad.V1 += t.u1 * dv1.transpose();
  grad.V2 += t.u2 * dv2.transpose();
  const Eigen::VectorXd du1 = p.K1 * dk1 + p.V1 * dv1;
  const Eigen::VectorXd du2 = p.K2 * dk2 + p.V2 * dv2;
  grad.gain1 += t.xhat1.cwiseProduct(du1);
  grad.offset1 += du1;
  grad.gain2 += t.xhat2.cwiseProduct(du2);
  grad.offset2 += du2;
}

Probe init_probe(RngStream& rng, int d, int heads, int head_dim) {
  Probe p;
  p.H = heads;
  p.d_h = head_dim;
  p.gain1 = Eigen::VectorXd::Ones(d);
  p.offset1 = Eigen::VectorXd::Zero(d);
  p.gain2 = Eigen::VectorXd::Ones(d);
  p.offset2 = Eigen::VectorXd::Zero(d);
  const auto fill = [&](Eigen::MatrixXd& w, int rows, int cols, double bound) {
    w.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
  };
  const double bd = 1.0 / std::sqrt(static_cast<double>(d));
  const double bh = 1.0 / std::sqrt(static_cast<double>(head_dim));
  fill(p.K1, d, head_dim, bd);
  fill(p.V1, d, head_dim, bd);
  fill(p.K2, d, head_dim, bd);
  fill(p.V2, d, head_dim, bd);
  fill(p.Q, head_dim, heads, bh);
  p.gamma = Eigen::VectorXd::Zero(heads);
  p.w_o.resize(head_dim);
  for (int i = 0; i < head_dim; ++i) p.w_o[i] = rng.uniform(-bh, bh);
  p.b_o = 0.0;
  return p;
}

void adam_step(Probe& p, const Probe& g, Probe& m, Probe& v, int t, double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  const auto upd = [&](auto& pp, const auto& gg, auto& mm, auto& vv) {
    mm = beta1 * mm + (1.0 - beta1) * gg;
    vv = (beta2 * vv.array() + (1.0 - beta2) * gg.array().square()).matrix();
    pp.array() -= lr * (mm.array() / bc1) / ((vv.array() / bc2).sqrt() + eps);
  };
  upd(p.gain1, g.gain1, m.gain1, v.gain1);
  upd(p.offset1, g.offset1, m.offset1, v.offset1);
  upd(p.gain2, g.gain2, m.gain2, v.gain2);
  upd(p.offset2, g.offset2, m.offset2, v.offset2);
  upd(p.K1, g.K1, m.K1, v.K1);
  upd(p.V1, g.V1, m.V1, v.V1);
  upd(p.K2, g.K2, m.K2, v.K2);
  upd(p.V2, g.V2, m.V2, v.V2);
  upd(p.Q, g.Q, m.Q, v.Q);
  upd(p.gamma, g.gamma, m.gamma, v.gamma);
  upd(p.w_o, g.w_o, m.w_o, v.w_o);
  m.b_o = beta1 * m.b_o + (1.0 - beta1) * g.b_o;
  v.b_o = beta2 * v.b_o + (1.0 - beta2) * g.b_o * g.b_o;
  p.b_o -= lr * (m.b_o / bc1) / (std::sqrt(v.b_o / bc2) + eps);
}

struct StepExample {
  const StepActivations* acts;
  int label;
};

std::vector<StepExample> flatten_steps(const std::vector<LabeledRollout>& labeled,
                                       const std::vector<int>& indices) {
  std::vector<StepExample> out;
  for (int i : indices) {
    const Rollout& r = labeled[i].rollout;
    const CommitmentLabel& lab = labeled[i].label;
    if (!r.activations)
      throw std::invalid_argument("train_probe: rollout lacks activations");
    const int T = r.num_steps();
    if (static_cast<int>(r.activations->size()) != T ||
        static_cast<int>(lab.step_labels.size()) != T)
      throw std::invalid_argument("train_probe: step count mismatch");
    for (int t = 0; t < T; ++t)
      out.push_back({&(*r.activations)[t], lab.step_labels[t]});
  }
  return out;
}

bool both_classes(const std::vector<StepExample>& xs) {
  bool pos = false, neg = false;
  for (const StepExample& e : xs) (e.label ? pos : neg) = true;
  return pos && neg;
}

double holdout_auroc(const Probe& p, const std::vector<StepExample>& holdout) {
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(holdout.size());
  labels.reserve(holdout.size());
  for (const StepExample& e : holdout) {
    scores.push_back(probe_forward(p, *e.acts));
    labels.push_back(e.label);
  }
  return auroc(scores, labels);
}

}  // namespace

bool probe_equal(const Probe& a, const Probe& b) {
  const auto eq = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
  };
  return a.H == b.H && a.d_h == b.d_h && eq(a.gain1, b.gain1) && eq(a.offset1, b.offset1) &&
         eq(a.gain2, b.gain2) && eq(a.offset2, b.offset2) && eq(a.K1, b.K1) &&
         eq(a.V1, b.V1) && eq(a.K2, b.K2) && eq(a.V2, b.V2) && eq(a.Q, b.Q) &&
         eq(a.gamma, b.gamma) && eq(a.w_o, b.w_o) && a.b_o == b.b_o;
}

double probe_forward(const Probe& probe, const StepActivations& acts) {
  return forward_trace(probe, acts).score;
}

ProbeScores mean_performativity(const Probe& probe, const Rollout& rollout) {
  if (!rollout.activations)
    throw std::invalid_argument("mean_performativity: rollout lacks activations");
  if (rollout.activations->empty())
    throw std::invalid_argument("mean_performativity: empty chain");
  ProbeScores out;
  out.per_step.reserve(rollout.activations->size());
  for (const StepActivations& a : *rollout.activations)
    out.per_step.push_back(probe_forward(probe, a));
  out.mean = mean(out.per_step);
  return out;
}

ProbeScores mean_performativity(const Probe& probe, const FrozenBase& base, const Task& task,
                                const Rollout& rollout, int max_len) {
  Rollout copy = rollout;
  copy.activations = recompute_activations(base.params, task, rollout.actions, max_len);
  return mean_performativity(probe, copy);
}

ProbeBce probe_bce(const Probe& probe, const std::vector<StepActivations>& steps,
                   const std::vector<int>& labels) {
  if (steps.size() != labels.size() || steps.empty())
    throw std::invalid_argument("probe_bce: need matching non-empty steps and labels");
  ProbeBce out;
  out.grad = zero_probe_like(probe);
  const double inv_n = 1.0 / static_cast<double>(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("probe_bce: labels must be 0 or 1");
    const Trace t = forward_trace(probe, steps[i]);
    const double y = labels[i];
    // Clamped log keeps the loss finite for saturated scores; the gradient
    // through the logit needs no clamp.
    constexpr double tiny = 1e-300;
    out.loss -= inv_n * (y * std::log(std::max(t.score, tiny)) +
                         (1.0 - y) * std::log(std::max(1.0 - t.score, tiny)));
    backprop_trace(probe, t, (t.score - y) * inv_n, out.grad);
  }
  return out;
}

ProbeTrainResult train_probe(const std::vector<LabeledRollout>& labeled,
                             const ProbeHyper& hyper, RngStream rng) {
  const int n = static_cast<int>(labeled.size());
  if (n < 2) throw std::invalid_argument("train_probe: need at least 2 rollouts");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  const int n_hold = std::clamp(static_cast<int>(std::llround(hyper.holdout_frac * n)), 1,
                                n - 1);
  const std::vector<int> hold_idx(perm.begin(), perm.begin() + n_hold);
  const std::vector<int> train_idx(perm.begin() + n_hold, perm.end());
  const std::vector<StepExample> train = flatten_steps(labeled, train_idx);
  const std::vector<StepExample> hold = flatten_steps(labeled, hold_idx);
  if (train.empty() || !both_classes(train))
    throw std::invalid_argument("train_probe: training split needs both classes");
  if (hold.empty() || !both_classes(hold))
    throw std::invalid_argument("train_probe: holdout split needs both classes");

  const int d = static_cast<int>(train.front().acts->a1.size());
  Probe probe = init_probe(rng, d, hyper.heads, hyper.head_dim);
  Probe m = zero_probe_like(probe);
  Probe v = zero_probe_like(probe);

  ProbeTrainResult best{probe, holdout_auroc(probe, hold)};
  const double inv_n = 1.0 / static_cast<double>(train.size());
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    Probe grad = zero_probe_like(probe);
    for (const StepExample& e : train) {
      const Trace t = forward_trace(probe, *e.acts);
      backprop_trace(probe, t, (t.score - e.label) * inv_n, grad);
    }
    adam_step(probe, grad, m, v, epoch, hyper.lr);
    const double a = holdout_auroc(probe, hold);
    if (a > best.held_out_auroc) {
      best.probe = probe;
      best.held_out_auroc = a;
    }
  }
  return best;
}

std::pair<Probe, StudentAgreement> train_student_probe(
    const PolicyParams& policy, const std::vector<LabeledTaskRollout>& labeled,
    const Probe& frozen_probe, const ProbeHyper& hyper, int max_len, RngStream rng) {
  std::vector<LabeledRollout> on_policy;
  on_policy.reserve(labeled.size());
  for (const LabeledTaskRollout& ex : labeled) {
    LabeledRollout lr;
    lr.rollout = ex.rollout;
    lr.rollout.activations =
        recompute_activations(policy, ex.task, ex.rollout.actions, max_len);
    lr.label = ex.label;
    on_policy.push_back(std::move(lr));
  }
  const ProbeTrainResult trained = train_probe(on_policy, hyper, rng);

  std::vector<double> student_means;
  std::vector<double> frozen_means;
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (!labeled[i].rollout.activations || labeled[i].rollout.activations->empty())
      continue;
    student_means.push_back(mean_performativity(trained.probe, on_policy[i].rollout).mean);
    frozen_means.push_back(mean_performativity(frozen_probe, labeled[i].rollout).mean);
  }
  StudentAgreement agreement;
  agreement.pearson_of_means = pearson(student_means, frozen_means);
  agreement.held_out_auroc = trained.held_out_auroc;
  return {trained.probe, agreement};
}

SteeringVector contrast_vector(const std::vector<LabeledRollout>& labeled, int layer) {
  if (layer != 1 && layer != 2)
    throw std::invalid_argument("contrast_vector: layer must be 1 or 2");
  Eigen::VectorXd sum_pos, sum_neg;
  long n_pos = 0, n_neg = 0;
  for (const LabeledRollout& lr : labeled) {
    if (!lr.rollout.activations)
      throw std::invalid_argument("contrast_vector: rollout lacks activations");
    const int T = lr.rollout.num_steps();
    for (int t = 0; t < T; ++t) {
      const Eigen::VectorXd& a =
          layer == 1 ? (*lr.rollout.activations)[t].a1 : (*lr.rollout.activations)[t].a2;
      Eigen::VectorXd& sum = lr.label.step_labels[t] ? sum_pos : sum_neg;
      if (sum.size() == 0) sum = Eigen::VectorXd::Zero(a.size());
      sum += a;
      ++(lr.label.step_labels[t] ? n_pos : n_neg);
    }
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("contrast_vector: need both step classes");
  SteeringVector sv;
  sv.layer = layer;
  sv.v = sum_pos / static_cast<double>(n_pos) - sum_neg / static_cast<double>(n_neg);
  return sv;
}

std::vector<CaaRow> caa_sweep(const PolicyParams& policy, const FrozenBase& base,
                              const std::vector<LabeledRollout>& baseline_labeled,
                              const CaaConfig& cfg, const std::vector<Task>& eval_tasks,
                              RngStream rng) {
  if (eval_tasks.empty()) throw std::invalid_argument("caa_sweep: no eval tasks");
  const SteeringVector sv = contrast_vector(baseline_labeled, cfg.layer);
  std::vector<CaaRow> rows;
  rows.reserve(cfg.coefficients.size());
  for (double c : cfg.coefficients) {
    LayerShift shift{cfg.layer, -c * sv.v};
    const LayerShift* shift_ptr = c == 0.0 ? nullptr : &shift;
    double perf_sum = 0.0;
    int correct = 0;
    for (std::size_t j = 0; j < eval_tasks.size(); ++j) {
      const Rollout r = sample_rollout(policy, eval_tasks[j], cfg.temperature, cfg.max_len,
                                       rng.child(j), base, false, shift_ptr);
      perf_sum += commitment_point(eval_tasks[j], r).perf_ratio;
      correct += r.correct;
    }
    CaaRow row;
    row.coefficient = c;
    row.mean_perf_ratio = perf_sum / static_cast<double>(eval_tasks.size());
    row.accuracy = static_cast<double>(correct) / static_cast<double>(eval_tasks.size());
    rows.push_back(row);
  }
  return rows;
}

}  // namespace modchain
