// End-to-end acceptance gate. Runs the full default pipeline into an
// artifact directory, then checks fourteen numbered behaviors: exact formula
// anchors, gradient oracles, probe quality, the headline theater-removal
// result, baseline orderings, audits, and statistical coverage. One verdict
// line per criterion; the exit code is the number of failures.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "profil/config.hpp"
#include "profil/env.hpp"
#include "profil/experiment.hpp"
#include "profil/labeling.hpp"
#include "profil/policy.hpp"
#include "profil/probe.hpp"
#include "profil/rng.hpp"
#include "profil/rollout_io.hpp"
#include "profil/stats.hpp"
#include "profil/trainer.hpp"
#include "profil/types.hpp"

using namespace modchain;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int n, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++g_failures;
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", n, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

// ---- shared numeric helpers -------------------------------------------------

std::vector<double*> policy_coords(PolicyParams& p) {
  std::vector<double*> out;
  const auto mat = [&out](Eigen::MatrixXd& m) {
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r) out.push_back(&m(r, c));
  };
  const auto vec = [&out](Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) out.push_back(&v[i]);
  };
  mat(p.W1);
  vec(p.b1);
  mat(p.W2);
  vec(p.b2);
  mat(p.W3);
  vec(p.b3);
  return out;
}

std::vector<double*> probe_coords(Probe& p) {
  std::vector<double*> out;
  const auto vec = [&out](Eigen::VectorXd& v) {
    for (int i = 0; i < v.size(); ++i) out.push_back(&v[i]);
  };
  const auto mat = [&out](Eigen::MatrixXd& m) {
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r) out.push_back(&m(r, c));
  };
  vec(p.gain1);
  vec(p.offset1);
  vec(p.gain2);
  vec(p.offset2);
  mat(p.K1);
  mat(p.V1);
  mat(p.K2);
  mat(p.V2);
  mat(p.Q);
  vec(p.gamma);
  vec(p.w_o);
  out.push_back(&p.b_o);
  return out;
}

double replay_logprob(const PolicyParams& p, const Task& task,
                      const std::vector<Action>& actions, double temperature, int max_len) {
  EnvState s = initial_state();
  double total = 0.0;
  for (Action a : actions) {
    const Eigen::VectorXd feat = step_features(task, s, max_len);
    const Eigen::Vector3d logits = policy_forward(p, feat).logits / temperature;
    const double mx = logits.maxCoeff();
    total += logits[static_cast<int>(a)] - mx - std::log((logits.array() - mx).exp().sum());
    s = transition(task, s, a);
  }
  return total;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Hand-rolled random probe; every block non-trivial.
Probe toy_probe(int d, int H, int dh, RngStream pr) {
  Probe probe;
  probe.H = H;
  probe.d_h = dh;
  probe.gain1.resize(d);
  probe.gain2.resize(d);
  probe.offset1.resize(d);
  probe.offset2.resize(d);
  for (int i = 0; i < d; ++i) {
    probe.gain1[i] = pr.uniform(0.5, 1.5);
    probe.gain2[i] = pr.uniform(0.5, 1.5);
    probe.offset1[i] = pr.uniform(-0.3, 0.3);
    probe.offset2[i] = pr.uniform(-0.3, 0.3);
  }
  const auto fill = [&pr](Eigen::MatrixXd& m, int rr, int cc) {
    m.resize(rr, cc);
    for (int i = 0; i < rr; ++i)
      for (int j = 0; j < cc; ++j) m(i, j) = pr.uniform(-0.6, 0.6);
  };
  fill(probe.K1, d, dh);
  fill(probe.V1, d, dh);
  fill(probe.K2, d, dh);
  fill(probe.V2, d, dh);
  fill(probe.Q, dh, H);
  probe.gamma.resize(H);
  for (int i = 0; i < H; ++i) probe.gamma[i] = pr.uniform(-0.5, 0.5);
  probe.w_o.resize(dh);
  for (int i = 0; i < dh; ++i) probe.w_o[i] = pr.uniform(-1.0, 1.0);
  probe.b_o = pr.uniform(-0.5, 0.5);
  return probe;
}

struct PerRollout {
  std::vector<double> perf;     // oracle perf-ratio per rollout
  std::vector<int> chain_len;   // steps excluding the terminal stop
  int correct = 0;
  int count = 0;
};

PerRollout summarize(const std::vector<CachedRollout>& cache) {
  PerRollout out;
  for (const CachedRollout& c : cache) {
    out.perf.push_back(commitment_point(c.task, c.rollout).perf_ratio);
    out.chain_len.push_back(c.rollout.num_steps());
    out.correct += c.rollout.correct ? 1 : 0;
    ++out.count;
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double mean_of(const std::vector<int>& v) {
  double s = 0.0;
  for (int x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::vector<LabeledTaskRollout> label_cache(const std::vector<CachedRollout>& cache) {
  std::vector<LabeledTaskRollout> out;
  for (const CachedRollout& c : cache) {
    if (c.rollout.num_steps() == 0) continue;
    out.push_back({c.task, c.rollout, commitment_point(c.task, c.rollout)});
  }
  return out;
}

// ---- criteria 1-5, 10, 12, 13: direct library checks ------------------------

void criterion_1() {
  const double v = perf_ratio(11, 5);
  verdict(1, round3(v) == 0.600, "performativity ratio of an 11-step chain committed at 5",
          "got " + fmt(v, 6));
}

void criterion_2() {
  const Interval ci = wilson_ci(389, 500, 0.95);
  const bool pass = round3(ci.lo) == 0.740 && round3(ci.hi) == 0.812;
  verdict(2, pass, "Wilson interval for 389/500 at 95%",
          "[" + fmt(ci.lo) + ", " + fmt(ci.hi) + "] vs [0.740, 0.812] at 3 decimals");
}

void criterion_3() {
  TauSchedule s;
  s.mode = TauSchedule::Mode::Adaptive;
  s.r_bar = 0.11;
  const double t11 = adaptive_tau(s);
  s.r_bar = 0.18;
  const double t18 = adaptive_tau(s);
  s.r_bar = 0.0;
  const double lo = adaptive_tau(s);
  s.r_bar = 1.0;
  const double hi = adaptive_tau(s);
  const bool pass = std::abs(t11 - 0.21) <= 1e-12 && std::abs(t18 - 0.28) <= 1e-12 &&
                    std::abs(lo - s.tau_min) <= 1e-12 && std::abs(hi - s.tau_max) <= 1e-12;
  verdict(3, pass, "adaptive filter threshold anchors and clipping",
          "r=0.11 -> " + fmt(t11) + ", r=0.18 -> " + fmt(t18) + ", ends " + fmt(lo) + "/" +
              fmt(hi));
}

void criterion_4() {
  // (a) Filtered rollouts leave the update bit-identical to an update
  // assembled without them. Reconstruct one training step two ways.
  bool a_pass = true;
  {
    RngStream rng = derive_stream(401, "acc4");
    EnvConfig env;
    env.n_min = 2;
    env.n_max = 4;
    env.m_min = 9;
    env.m_max = 13;
    std::vector<Task> tasks = gen_tasks(env, rng, 4, "a4");
    PolicyParams p = init_policy(rng.child(1), kFeatureDim, 8);
    const FrozenBase base = freeze_base(p);
    Probe probe = toy_probe(8, 2, 3, rng.child(2));
    TrainerConfig cfg;
    cfg.group_size = 4;
    cfg.filter_enabled = true;
    cfg.max_len = env.max_len;
    const RngStream step_rng = derive_stream(402, "acc4step");

    // Median p_bar as tau guarantees rollouts on both sides of the filter.
    std::vector<double> pbars;
    for (std::size_t i = 0; i < tasks.size(); ++i)
      for (std::size_t k = 0; k < 4; ++k) {
        Rollout r = sample_rollout(p, tasks[i], 1.0, cfg.max_len, step_rng.child(i * 4 + k),
                                   base, true);
        if (r.num_steps() > 0) pbars.push_back(mean_performativity(probe, r).mean);
      }
    std::sort(pbars.begin(), pbars.end());
    TauSchedule sched;
    sched.tau_fixed = pbars[pbars.size() / 2];
    StepStats st;
    TauSchedule s1 = sched;
    const PolicyParams stepped = grpo_step(p, base, &probe, tasks, cfg, s1, step_rng, &st);

    PolicyParams grad = zero_like(p);
    int kept_total = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      std::vector<Rollout> rolls;
      std::vector<double> rewards, pb;
      for (std::size_t k = 0; k < 4; ++k) {
        Rollout r = sample_rollout(p, tasks[i], 1.0, cfg.max_len, step_rng.child(i * 4 + k),
                                   base, true);
        rewards.push_back(r.correct ? 1.0 : 0.0);
        pb.push_back(r.num_steps() > 0 ? mean_performativity(probe, r).mean : 0.0);
        rolls.push_back(std::move(r));
      }
      auto [fr, mask] = apply_probe_filter(rewards, pb, sched.tau_fixed);
      for (int kept : mask) kept_total += kept;
      const Advantages adv = group_advantages(fr, mask, cfg.group_stats_mode);
      // Filtered rollouts are left out entirely; equality with the real step
      // shows they contributed exactly nothing there.
      for (std::size_t k = 0; k < 4; ++k)
        if (adv.a[k] != 0.0)
          accumulate_logprob_grad(p, tasks[i], rolls[k], adv.a[k], cfg.temperature,
                                  cfg.max_len, grad);
    }
    PolicyParams rebuilt = p;
    if (kept_total > 0) axpy(rebuilt, grad, cfg.lr / kept_total);
    a_pass = params_equal(rebuilt, stepped) && st.filter_rate > 0.0 && st.filter_rate < 1.0;
  }

  // (b) Worked z-score example over a group of four with one filtered.
  const Advantages adv =
      group_advantages({0.0, 1.0, 0.0, 0.0}, {0, 1, 1, 1}, GroupStatsMode::All);
  const bool b_pass = std::abs(adv.a[0] - 0.0) <= 1e-3 && std::abs(adv.a[1] - 1.732) <= 1e-3 &&
                      std::abs(adv.a[2] + 0.577) <= 1e-3 && std::abs(adv.a[3] + 0.577) <= 1e-3;

  // (c) The filter fires at score == threshold.
  const auto [fr, mask] = apply_probe_filter({1.0, 1.0}, {0.3, 0.2999}, 0.3);
  const bool c_pass = mask[0] == 0 && mask[1] == 1;

  verdict(4, a_pass && b_pass && c_pass,
          "update semantics: filtered rollouts bit-zero, worked z-scores, boundary filter",
          std::string("bit-zero=") + (a_pass ? "yes" : "no") + ", advantages=[" +
              fmt(adv.a[0], 3) + "," + fmt(adv.a[1], 3) + "," + fmt(adv.a[2], 3) + "," +
              fmt(adv.a[3], 3) + "], boundary=" + (c_pass ? "fires" : "misses"));
}

void criterion_5() {
  constexpr double h = 1e-5;
  constexpr double tol = 1e-4;
  double worst_bc = 0.0, worst_sur = 0.0, worst_bce = 0.0;

  for (int inst = 0; inst < 20; ++inst) {
    RngStream rng = derive_stream(500 + inst, "acc5");
    EnvConfig env;

    // Imitation loss gradient: recover it from one full-batch descent epoch
    // at unit learning rate, then compare against central differences.
    {
      std::vector<Task> tasks = gen_tasks(env, rng, 3, "bc");
      TaskMap tmap;
      for (const Task& t : tasks) tmap[t.id] = t;
      DemoConfig dc;
      dc.count = 6;
      dc.theater_p = 0.5;
      std::vector<Rollout> demos = make_demos(tasks, dc, env, rng.child(1));
      PolicyParams p = init_policy(rng.child(2), kFeatureDim, 5);
      // One unit-rate descent epoch exposes the gradient: g = p - stepped.
      const PolicyParams stepped = behavior_clone(p, demos, tmap, 1, 1.0, env.max_len);
      PolicyParams analytic = p;
      {
        std::vector<double*> ac = policy_coords(analytic);
        PolicyParams sp = stepped;
        std::vector<double*> sc = policy_coords(sp);
        for (std::size_t i = 0; i < ac.size(); ++i) *ac[i] -= *sc[i];
      }
      std::vector<double*> gc = policy_coords(analytic);
      for (std::size_t c = inst % 4; c < gc.size(); c += 4) {
        PolicyParams plus = p, minus = p;
        *policy_coords(plus)[c] += h;
        *policy_coords(minus)[c] -= h;
        const double fd = (bc_loss(plus, demos, tmap, env.max_len) -
                           bc_loss(minus, demos, tmap, env.max_len)) /
                          (2.0 * h);
        const double an = *gc[c];
        if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;
        worst_bc = std::max(worst_bc, rel_err(fd, an));
      }
    }

    // Advantage-weighted trajectory log-prob gradient.
    {
      const Task task = gen_task(env, rng, "sur");
      PolicyParams p = init_policy(rng.child(3), kFeatureDim, 5);
      const FrozenBase base = freeze_base(p);
      const Rollout r = sample_rollout(p, task, 1.0, env.max_len, rng.child(4), base, false);
      if (r.actions.empty()) continue;
      const double w = inst % 2 ? -0.577 : 1.25;
      const double temp = inst % 3 ? 1.0 : 0.7;
      PolicyParams grad = zero_like(p);
      accumulate_logprob_grad(p, task, r, w, temp, env.max_len, grad);
      std::vector<double*> gc = policy_coords(grad);
      for (std::size_t c = inst % 4; c < gc.size(); c += 4) {
        PolicyParams plus = p, minus = p;
        *policy_coords(plus)[c] += h;
        *policy_coords(minus)[c] -= h;
        const double fd = w *
                          (replay_logprob(plus, task, r.actions, temp, env.max_len) -
                           replay_logprob(minus, task, r.actions, temp, env.max_len)) /
                          (2.0 * h);
        const double an = *gc[c];
        if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;
        worst_sur = std::max(worst_sur, rel_err(fd, an));
      }
    }

    // Probe cross-entropy gradient.
    {
      Probe probe = toy_probe(6, 2, 3, rng.child(5));
      std::vector<StepActivations> steps;
      std::vector<int> labels;
      RngStream ar = rng.child(6);
      for (int t = 0; t < 6; ++t) {
        StepActivations a;
        a.a1.resize(6);
        a.a2.resize(6);
        for (int i = 0; i < 6; ++i) {
          a.a1[i] = ar.uniform(-1.0, 1.0);
          a.a2[i] = ar.uniform(-1.0, 1.0);
        }
        steps.push_back(std::move(a));
        labels.push_back(t % 2);
      }
      ProbeBce out = probe_bce(probe, steps, labels);
      std::vector<double*> gc = probe_coords(out.grad);
      for (std::size_t c = inst % 4; c < gc.size(); c += 4) {
        Probe plus = probe, minus = probe;
        *probe_coords(plus)[c] += h;
        *probe_coords(minus)[c] -= h;
        const double fd =
            (probe_bce(plus, steps, labels).loss - probe_bce(minus, steps, labels).loss) /
            (2.0 * h);
        const double an = *gc[c];
        if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;
        worst_bce = std::max(worst_bce, rel_err(fd, an));
      }
    }
  }

  const bool pass = worst_bc <= tol && worst_sur <= tol && worst_bce <= tol;
  verdict(5, pass, "finite-difference gradient oracles for all three objectives",
          "max rel err: imitation " + fmt(worst_bc, 7) + ", surrogate " + fmt(worst_sur, 7) +
              ", probe " + fmt(worst_bce, 7) + " vs 1e-4");
}

void criterion_10() {
  RngStream rng = derive_stream(1000, "acc10");
  EnvConfig env;  // full task domain
  PolicyParams p = init_policy(rng.child(0), kFeatureDim, 8);
  const FrozenBase base = freeze_base(p);
  int qualifying = 0, violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Task t = gen_task(env, rng, "q");
    const Rollout r = sample_rollout(p, t, 1.0, env.max_len, rng.child(20000 + i), base,
                                     false);
    if (r.num_steps() == 0) continue;
    // Independent scan for the first correct forced answer.
    int first_correct = 0;  // 1-based; 0 = none
    bool wrong_before = false;
    for (int s = 0; s < r.num_steps(); ++s) {
      if (r.forced_answers[s] == t.answer) {
        first_correct = s + 1;
        break;
      }
      wrong_before = true;
    }
    if (first_correct == 0 || !wrong_before) continue;
    ++qualifying;
    const CommitmentLabel lab = commitment_point(t, r);
    if (!lab.commitment_index || *lab.commitment_index != first_correct) ++violations;
    for (int s = 0; s + 1 < first_correct; ++s)
      if (lab.step_labels[s] != 0) ++violations;
  }
  verdict(10, qualifying > 0 && violations == 0,
          "commitment sits at the first correct forced answer, never earlier",
          std::to_string(qualifying) + " qualifying chains of 10000, " +
              std::to_string(violations) + " violations");
}

void criterion_12() {
  RngStream rng = derive_stream(1200, "acc12");
  bool all_equal = true;
  for (int inst = 0; inst < 50; ++inst) {
    RngStream r = rng.child(inst);
    const int n = r.uniform_int(4, 50);
    std::vector<double> scores;
    std::vector<int> labels;
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      scores.push_back(r.uniform_int(0, 7) / 7.0);  // coarse grid forces ties
      const int y = r.bernoulli(0.5) ? 1 : 0;
      labels.push_back(y);
      (y ? pos : neg) = true;
    }
    if (!pos) labels[0] = 1;
    if (!neg) labels[n - 1] = 0;
    double num = 0.0;
    long pairs = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (labels[i] != 1 || labels[j] != 0) continue;
        ++pairs;
        if (scores[i] > scores[j])
          num += 1.0;
        else if (scores[i] == scores[j])
          num += 0.5;
      }
    const double brute = num / static_cast<double>(pairs);
    if (auroc(scores, labels) != brute) all_equal = false;
  }
  verdict(12, all_equal, "rank-based AUROC equals all-pairs counting exactly",
          "50 tied instances, n <= 50");
}

void criterion_13() {
  int covered = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RngStream rng = derive_stream(1300 + trial, "acc13");
    std::vector<double> data;
    data.reserve(200);
    for (int i = 0; i < 200; ++i) data.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    const Interval ci = bootstrap_ci(data, 5000, 0.95, rng.child(999));
    if (ci.lo <= 0.5 && 0.5 <= ci.hi) ++covered;
  }
  verdict(13, covered >= 90, "bootstrap interval covers the true mean",
          std::to_string(covered) + "/100 trials vs >= 90");
}

// ---- criteria 6-9, 11, 14: the full default run -----------------------------

void criterion_6(Experiment& exp) {
  long total_steps = 0;
  for (const CachedRollout& c : exp.probe_rollouts()) total_steps += c.rollout.num_steps();
  const double auroc_held = exp.probe_held_out_auroc();
  const bool pass =
      total_steps >= 2000 && exp.config().probe.epochs <= 200 && auroc_held >= 0.90;
  verdict(6, pass, "held-out step scoring quality of the trained probe",
          "AUROC " + fmt(auroc_held) + " vs >= 0.90 on " + std::to_string(total_steps) +
              " labeled steps, " + std::to_string(exp.config().probe.epochs) + " epochs");
}

void criterion_7(Experiment& exp, const PerRollout& base_s, const PerRollout& pf_s) {
  const PerRollout base_g = summarize(exp.eval_greedy("baseline"));
  const PerRollout pf_g = summarize(exp.eval_greedy("profil"));
  const double perf_base = mean_of(base_s.perf);
  const double perf_pf = mean_of(pf_s.perf);
  const Interval acc_ci = wilson_ci(base_g.correct, base_g.count, 0.95);
  const double acc_pf = static_cast<double>(pf_g.correct) / pf_g.count;
  // "Within the interval" reads one-sided here: landing above the upper
  // bound means improved accuracy, which the comparison is meant to allow.
  const bool halved = perf_pf <= 0.5 * perf_base;
  const bool acc_ok = acc_pf >= acc_ci.lo;
  verdict(7, halved && acc_ok,
          "filtered training at least halves theater while preserving accuracy",
          "perf " + fmt(perf_pf) + " vs 0.5 x " + fmt(perf_base) + " = " +
              fmt(0.5 * perf_base) + "; greedy acc " + fmt(acc_pf) + " vs baseline CI [" +
              fmt(acc_ci.lo) + ", " + fmt(acc_ci.hi) + "]");
}

void criterion_8(const PerRollout& base_s, const PerRollout& lp_s, const PerRollout& pf_s) {
  const double perf_lp = mean_of(lp_s.perf);
  const double perf_pf = mean_of(pf_s.perf);
  const double len_base = mean_of(base_s.chain_len);
  const double len_lp = mean_of(lp_s.chain_len);
  const bool order = perf_pf < perf_lp;
  const bool compress = len_lp < len_base;
  verdict(8, order && compress,
          "filtered training beats the length penalty on theater; the penalty compresses",
          "perf " + fmt(perf_pf) + (order ? " < " : " >= ") + fmt(perf_lp) + "; chain len " +
              fmt(len_lp, 2) + (compress ? " < " : " >= ") + fmt(len_base, 2));
}

void criterion_9(Experiment& exp) {
  const FrozenBase base = freeze_base(exp.base_policy());
  const Probe& probe = exp.frozen_probe();
  const std::vector<LabeledTaskRollout> labeled = label_cache(exp.eval_sampled("profil"));
  const std::optional<double> audit =
      audit_frozen_probe(probe, base, labeled, exp.config().env.max_len);

  // Recompute the probe's per-step scores on the fixed pre-training cache
  // and compare byte-for-byte against the snapshot taken at training time.
  std::ostringstream now;
  const std::vector<CachedRollout>& ref = exp.probe_rollouts();
  for (std::size_t i = 0; i < ref.size(); ++i) {
    now << i;
    if (ref[i].rollout.num_steps() > 0) {
      const ProbeScores s = mean_performativity(probe, ref[i].rollout);
      for (double v : s.per_step) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        now << ' ' << buf;
      }
    }
    now << '\n';
  }
  std::ifstream ref_in(exp.artifact("probe_reference_scores.txt"));
  std::stringstream ref_text;
  ref_text << ref_in.rdbuf();
  const bool frozen_ok = ref_in.good() && ref_text.str() == now.str();

  const bool pass = audit && *audit >= 0.90 && frozen_ok;
  verdict(9, pass, "frozen-probe audit after filtered training",
          "post-training AUROC " + (audit ? fmt(*audit) : std::string("n/a")) +
              " vs >= 0.90; scores on the fixed cache " +
              (frozen_ok ? "bit-identical" : "CHANGED"));
}

void criterion_11(Experiment& exp) {
  const auto flat_scores = [](const std::vector<CachedRollout>& cache) {
    std::vector<double> out;
    for (const CachedRollout& c : cache)
      if (c.probe_scores)
        out.insert(out.end(), c.probe_scores->begin(), c.probe_scores->end());
    return out;
  };
  const std::vector<double> sb = flat_scores(exp.eval_sampled("baseline"));
  const std::vector<double> sp = flat_scores(exp.eval_sampled("profil"));
  bool monotone = true, ordered = true;
  std::string detail;
  double prev_b = 2.0, prev_p = 2.0;
  for (double theta : exp.config().eval.thresholds_sweep) {
    const double rb = probe_perf_ratio(sb, theta);
    const double rp = probe_perf_ratio(sp, theta);
    if (rb > prev_b + 1e-12 || rp > prev_p + 1e-12) monotone = false;
    if (!(rp < rb)) ordered = false;
    prev_b = rb;
    prev_p = rp;
    if (!detail.empty()) detail += "; ";
    detail += "t=" + fmt(theta, 2) + ": " + fmt(rp, 3) + " vs " + fmt(rb, 3);
  }
  verdict(11, monotone && ordered,
          "probe-score theater fraction: non-increasing in the threshold, filtered < "
          "baseline at every threshold",
          detail);
}

void criterion_14(const PerRollout& base_s, const PerRollout& pf_s) {
  const std::array<int, 10> db = decile_histogram(base_s.perf);
  const std::array<int, 10> dp = decile_histogram(pf_s.perf);
  int top_b = 0, top_p = 0;
  for (int i = 5; i < 10; ++i) {
    top_b += db[i];
    top_p += dp[i];
  }
  verdict(14, top_p < top_b, "top-half decile mass shrinks under filtered training",
          "deciles 6-10: filtered " + std::to_string(top_p) + " vs baseline " +
              std::to_string(top_b) + " of " + std::to_string(base_s.count));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "acceptance_artifacts";
  std::printf("artifact directory: %s\n", dir.c_str());

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();

  ExperimentConfig cfg;  // the documented default run
  Experiment exp(cfg, dir);
  exp.run_all();
  const PerRollout base_s = summarize(exp.eval_sampled("baseline"));
  const PerRollout lp_s = summarize(exp.eval_sampled("length_penalty"));
  const PerRollout pf_s = summarize(exp.eval_sampled("profil"));

  criterion_6(exp);
  criterion_7(exp, base_s, pf_s);
  criterion_8(base_s, lp_s, pf_s);
  criterion_9(exp);
  criterion_10();
  criterion_11(exp);
  criterion_12();
  criterion_13();
  criterion_14(base_s, pf_s);

  std::printf("%d of 14 criteria passed\n", 14 - g_failures);
  return g_failures;
}
