#include "profil/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "profil/checkpoint.hpp"
#include "profil/env.hpp"
#include "profil/labeling.hpp"
#include "profil/report.hpp"
#include "profil/stats.hpp"

namespace modchain {

namespace {

namespace fs = std::filesystem;

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

// Deterministic despite the thread pool: every index writes only its own
// slot and draws only from its own derived stream.
template <class Fn>
void parallel_for(int n, Fn fn) {
  const int workers =
      std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 8);
  if (n < 32 || workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool known_condition(const std::string& c) {
  return std::find(kConditions.begin(), kConditions.end(), c) != kConditions.end();
}

std::string checkpoint_name(const std::string& condition, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_step_%06d.txt", condition.c_str(), step);
  return std::string("checkpoints/") + buf;
}

struct StepCounts {
  int steps = 0, pos = 0, neg = 0;
};

StepCounts count_steps(const std::vector<LabeledTaskRollout>& labeled) {
  StepCounts c;
  for (const auto& lr : labeled)
    for (int y : lr.label.step_labels) {
      ++c.steps;
      (y ? c.pos : c.neg)++;
    }
  return c;
}

}  // namespace

Experiment::Experiment(ExperimentConfig cfg, std::filesystem::path dir)
    : cfg_(std::move(cfg)), dir_(std::move(dir)) {
  validate_config(cfg_);
  fs::create_directories(dir_ / "checkpoints");
  if (!fs::exists(artifact("config.txt")))
    write_text_atomic(artifact("config.txt"), config_to_text(cfg_));
}

RngStream Experiment::stream(const std::string& purpose) const {
  return derive_stream(cfg_.seed, purpose);
}

const std::vector<Task>& Experiment::train_tasks() {
  if (!train_tasks_) {
    RngStream r = stream("tasks_train");
    train_tasks_ = gen_tasks(cfg_.env, r, cfg_.train_task_count, "train");
  }
  return *train_tasks_;
}

const std::vector<Task>& Experiment::eval_tasks() {
  if (!eval_tasks_) {
    RngStream r = stream("tasks_eval");
    eval_tasks_ = gen_tasks(cfg_.env, r, cfg_.eval.task_count, "eval");
  }
  return *eval_tasks_;
}

void Experiment::run_pretrain() {
  if (base_) return;
  const fs::path path = artifact("policy_base.txt");
  if (fs::exists(path)) {
    base_ = load_policy(path.string());
    return;
  }
  const fs::path demo_path = artifact("demos.jsonl");
  std::vector<CachedRollout> demo_cache;
  if (fs::exists(demo_path)) {
    demo_cache = read_rollouts(demo_path.string());
  } else {
    const std::vector<Task>& tasks = train_tasks();
    const TaskMap by_id = make_task_map(tasks);
    DemoConfig dc;
    dc.count = cfg_.bc.demo_count;
    dc.theater_p = cfg_.bc.theater_p;
    std::vector<Rollout> demos = make_demos(tasks, dc, cfg_.env, stream("demos"));
    demo_cache.reserve(demos.size());
    for (Rollout& d : demos) {
      CachedRollout c;
      c.task = by_id.at(d.task_id);
      c.rollout = std::move(d);
      demo_cache.push_back(std::move(c));
    }
    write_rollouts(demo_path.string(), demo_cache, /*store_activations=*/false);
  }
  std::vector<Rollout> demos;
  TaskMap tmap;
  demos.reserve(demo_cache.size());
  for (const CachedRollout& c : demo_cache) {
    demos.push_back(c.rollout);
    tmap.emplace(c.task.id, c.task);
  }
  PolicyParams params = init_policy(stream("policy_init"), kFeatureDim, cfg_.policy.hidden);
  params = behavior_clone(std::move(params), demos, tmap, cfg_.bc.epochs, cfg_.bc.lr,
                          cfg_.env.max_len);
  save_policy(path.string(), params);
  base_ = std::move(params);
}

const PolicyParams& Experiment::base_policy() {
  run_pretrain();
  return *base_;
}

std::vector<CachedRollout> Experiment::sample_cache(
    const PolicyParams& policy, const std::vector<Task>& tasks, int count,
    double temperature, const std::string& purpose, const std::string& condition,
    int checkpoint, bool record_activations) {
  const FrozenBase frozen = freeze_base(base_policy());
  const RngStream root = stream(purpose);
  std::vector<CachedRollout> out(count);
  parallel_for(count, [&](int i) {
    const Task& task = tasks[i % tasks.size()];
    Rollout r = sample_rollout(policy, task, temperature, cfg_.env.max_len, root.child(i),
                               frozen, record_activations);
    r.condition = condition;
    r.checkpoint = checkpoint;
    out[i].task = task;
    out[i].rollout = std::move(r);
  });
  return out;
}

void Experiment::attach_probe_scores(std::vector<CachedRollout>& cache) {
  const Probe& probe = frozen_probe();
  const FrozenBase frozen = freeze_base(base_policy());
  parallel_for(static_cast<int>(cache.size()), [&](int i) {
    CachedRollout& c = cache[i];
    if (c.rollout.num_steps() == 0) {
      c.probe_scores = std::vector<double>{};
      return;
    }
    c.probe_scores = mean_performativity(probe, frozen, c.task, c.rollout, cfg_.env.max_len)
                         .per_step;
  });
}

const std::vector<CachedRollout>& Experiment::probe_rollouts() {
  if (probe_rollouts_) return *probe_rollouts_;
  const fs::path path = artifact("probe_rollouts.jsonl");
  if (fs::exists(path)) {
    probe_rollouts_ = read_rollouts(path.string());
    return *probe_rollouts_;
  }
  std::vector<CachedRollout> cache =
      sample_cache(base_policy(), train_tasks(), cfg_.probe.rollouts, cfg_.policy.temperature,
                   "probe_rollouts", "base", 0, /*record_activations=*/true);
  write_rollouts(path.string(), cache, /*store_activations=*/true);
  probe_rollouts_ = std::move(cache);
  return *probe_rollouts_;
}

void Experiment::run_train_probe() {
  if (probe_) return;
  const fs::path path = artifact("probe.txt");
  if (fs::exists(path)) {
    probe_ = load_probe(path.string(), &probe_auroc_);
    return;
  }
  const std::vector<CachedRollout>& cache = probe_rollouts();
  std::vector<LabeledRollout> labeled;
  labeled.reserve(cache.size());
  for (const CachedRollout& c : cache)
    labeled.push_back({c.rollout, commitment_point(c.task, c.rollout)});
  ProbeHyper hyper;
  hyper.lr = cfg_.probe.lr;
  hyper.epochs = cfg_.probe.epochs;
  hyper.heads = cfg_.probe.heads;
  hyper.head_dim = cfg_.probe.head_dim;
  hyper.holdout_frac = cfg_.probe.holdout_frac;
  ProbeTrainResult res = train_probe(labeled, hyper, stream("probe_train"));
  probe_ = std::move(res.probe);
  probe_auroc_ = res.held_out_auroc;
  save_probe(path.string(), *probe_, probe_auroc_);

  // Reference scores for the later frozen-ness check: the probe's per-step
  // output on this fixed pre-training cache, at full precision.
  std::ostringstream ref;
  for (std::size_t i = 0; i < cache.size(); ++i) {
    ref << i;
    if (cache[i].rollout.num_steps() > 0) {
      const ProbeScores s = mean_performativity(*probe_, cache[i].rollout);
      for (double v : s.per_step) ref << ' ' << fmt17(v);
    }
    ref << '\n';
  }
  write_text_atomic(artifact("probe_reference_scores.txt"), ref.str());
}

const Probe& Experiment::frozen_probe() {
  run_train_probe();
  return *probe_;
}

double Experiment::probe_held_out_auroc() {
  run_train_probe();
  return probe_auroc_;
}

TrainerConfig Experiment::trainer_config(const std::string& condition) const {
  TrainerConfig t;
  t.group_size = cfg_.grpo.group_size;
  t.lr = cfg_.grpo.lr;
  t.steps = cfg_.grpo.steps;
  t.reward_mode =
      condition == "length_penalty" ? RewardMode::LengthPenalty : RewardMode::Plain;
  t.lambda = cfg_.grpo.lambda;
  t.filter_enabled = condition == "profil";
  t.group_stats_mode =
      cfg_.grpo.group_stats_mode == "unfiltered" ? GroupStatsMode::Unfiltered
                                                 : GroupStatsMode::All;
  t.temperature = cfg_.policy.temperature;
  t.max_len = cfg_.env.max_len;
  return t;
}

void Experiment::run_grpo(const std::string& condition) {
  if (!known_condition(condition))
    throw std::runtime_error("unknown condition '" + condition + "'");
  if (trained_.count(condition)) return;
  const fs::path path = artifact("policy_" + condition + ".txt");
  if (fs::exists(path)) {
    trained_.emplace(condition, load_policy(path.string()));
    return;
  }
  const PolicyParams& b = base_policy();
  const Probe* probe = condition == "profil" ? &frozen_probe() : nullptr;
  const FrozenBase frozen = freeze_base(b);
  const TrainerConfig tc = trainer_config(condition);
  TauSchedule sched;
  sched.mode = cfg_.grpo.tau_mode == "adaptive" ? TauSchedule::Mode::Adaptive
                                                : TauSchedule::Mode::Fixed;
  sched.tau_fixed = cfg_.grpo.tau_fixed;

  const std::vector<Task>& pool = train_tasks();
  const RngStream task_stream = stream("grpo_tasks");
  const RngStream roll_stream = stream("grpo_roll");
  PolicyParams params = b;
  std::ostringstream log;
  log << "step,mean_reward,filter_rate,tau,mean_p_bar\n";
  for (int s = 1; s <= tc.steps; ++s) {
    RngStream ts = task_stream.child(s);
    std::vector<Task> batch;
    batch.reserve(cfg_.grpo.tasks_per_step);
    for (int i = 0; i < cfg_.grpo.tasks_per_step; ++i)
      batch.push_back(pool[ts.uniform_int(0, static_cast<int>(pool.size()) - 1)]);
    StepStats st;
    params = grpo_step(params, frozen, probe, batch, tc, sched, roll_stream.child(s), &st);
    log << s << ',' << fmt6(st.mean_reward) << ',' << fmt6(st.filter_rate) << ','
        << fmt6(st.tau) << ',' << fmt6(st.mean_p_bar) << '\n';
    if (s % 20 == 0)
      save_policy(artifact(checkpoint_name(condition, s)).string(), params);
  }
  write_text_atomic(artifact("train_log_" + condition + ".csv"), log.str());
  save_policy(path.string(), params);
  trained_.emplace(condition, std::move(params));
}

const PolicyParams& Experiment::trained_policy(const std::string& condition) {
  run_grpo(condition);
  return trained_.at(condition);
}

void Experiment::run_eval(const std::string& condition) {
  if (!known_condition(condition))
    throw std::runtime_error("unknown condition '" + condition + "'");
  if (eval_sampled_.count(condition) && eval_greedy_.count(condition)) return;
  const fs::path sampled_path = artifact("eval_" + condition + ".jsonl");
  const fs::path greedy_path = artifact("eval_greedy_" + condition + ".jsonl");
  if (fs::exists(sampled_path) && fs::exists(greedy_path)) {
    eval_sampled_[condition] = read_rollouts(sampled_path.string());
    eval_greedy_[condition] = read_rollouts(greedy_path.string());
    return;
  }
  const PolicyParams& policy = trained_policy(condition);
  std::vector<CachedRollout> sampled =
      sample_cache(policy, eval_tasks(), cfg_.eval.task_count, cfg_.policy.temperature,
                   "eval_sampled", condition, cfg_.grpo.steps, false);
  attach_probe_scores(sampled);
  write_rollouts(sampled_path.string(), sampled, false);
  std::vector<CachedRollout> greedy =
      sample_cache(policy, eval_tasks(), cfg_.eval.task_count, 0.0, "eval_greedy",
                   condition, cfg_.grpo.steps, false);
  attach_probe_scores(greedy);
  write_rollouts(greedy_path.string(), greedy, false);
  eval_sampled_[condition] = std::move(sampled);
  eval_greedy_[condition] = std::move(greedy);
}

const std::vector<CachedRollout>& Experiment::eval_sampled(const std::string& condition) {
  run_eval(condition);
  return eval_sampled_.at(condition);
}

const std::vector<CachedRollout>& Experiment::eval_greedy(const std::string& condition) {
  run_eval(condition);
  return eval_greedy_.at(condition);
}

std::vector<LabeledTaskRollout> Experiment::labeled_from_cache(
    const std::vector<CachedRollout>& cache) {
  std::vector<LabeledTaskRollout> out;
  out.reserve(cache.size());
  for (const CachedRollout& c : cache)
    out.push_back({c.task, c.rollout, commitment_point(c.task, c.rollout)});
  return out;
}

void Experiment::run_audit() {
  const Probe& probe = frozen_probe();
  const FrozenBase frozen = freeze_base(base_policy());
  run_grpo("profil");  // checkpoints must exist on disk

  std::ostringstream csv;
  csv << "set,condition,checkpoint,auroc,n_steps,n_pos,n_neg,bit_identical\n";
  const auto row = [&](const std::string& set, const std::string& cond, int ckpt,
                       std::optional<double> a, const StepCounts& c,
                       std::optional<int> bit) {
    csv << set << ',' << cond << ',' << ckpt << ',';
    if (a) csv << fmt6(*a);
    csv << ',' << c.steps << ',' << c.pos << ',' << c.neg << ',';
    if (bit) csv << *bit;
    csv << '\n';
  };

  // Frozen-probe score trajectory: rollouts drawn from each checkpoint's
  // policy, all scored by the one probe.
  const int audit_n = std::min(200, cfg_.eval.task_count);
  for (int s = 0; s <= cfg_.grpo.steps; s += 20) {
    PolicyParams at_step =
        s == 0 ? base_policy()
               : load_policy(artifact(checkpoint_name("profil", s)).string());
    std::vector<CachedRollout> cache =
        sample_cache(at_step, eval_tasks(), audit_n, cfg_.policy.temperature,
                     "audit_roll:" + std::to_string(s), "profil", s, false);
    std::vector<LabeledTaskRollout> labeled = labeled_from_cache(cache);
    row("checkpoint", "profil", s,
        audit_frozen_probe(probe, frozen, labeled, cfg_.env.max_len),
        count_steps(labeled), std::nullopt);
  }

  // Post-training eval caches, per condition and pooled.
  std::vector<LabeledTaskRollout> pooled;
  for (const char* cond : kConditions) {
    std::vector<LabeledTaskRollout> labeled = labeled_from_cache(eval_sampled(cond));
    row("post_training", cond, cfg_.grpo.steps,
        audit_frozen_probe(probe, frozen, labeled, cfg_.env.max_len),
        count_steps(labeled), std::nullopt);
    pooled.insert(pooled.end(), labeled.begin(), labeled.end());
  }
  row("post_training", "pooled", cfg_.grpo.steps,
      audit_frozen_probe(probe, frozen, pooled, cfg_.env.max_len), count_steps(pooled),
      std::nullopt);

  // Frozen-ness: the probe's scores on the fixed pre-training cache must be
  // byte-for-byte what they were when the probe was trained.
  const std::vector<CachedRollout>& ref_cache = probe_rollouts();
  std::ostringstream now;
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < ref_cache.size(); ++i) {
    now << i;
    if (ref_cache[i].rollout.num_steps() > 0) {
      const ProbeScores s = mean_performativity(probe, ref_cache[i].rollout);
      const CommitmentLabel lab = commitment_point(ref_cache[i].task, ref_cache[i].rollout);
      for (std::size_t t = 0; t < s.per_step.size(); ++t) {
        now << ' ' << fmt17(s.per_step[t]);
        scores.push_back(s.per_step[t]);
        labels.push_back(lab.step_labels[t]);
      }
    }
    now << '\n';
  }
  std::ifstream ref_in(artifact("probe_reference_scores.txt"));
  std::stringstream ref;
  ref << ref_in.rdbuf();
  const int bit = ref_in && ref.str() == now.str() ? 1 : 0;
  StepCounts rc;
  for (int y : labels) {
    ++rc.steps;
    (y ? rc.pos : rc.neg)++;
  }
  const bool both = rc.pos > 0 && rc.neg > 0;
  row("invariance", "base", 0,
      both ? std::optional<double>(auroc(scores, labels)) : std::nullopt, rc, bit);

  write_text_atomic(artifact("audit.csv"), csv.str());
}

void Experiment::run_sweep_theta() {
  std::ostringstream csv;
  csv << "condition";
  for (double theta : cfg_.eval.thresholds_sweep) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",theta_%.2f", theta);
    csv << buf;
  }
  csv << '\n';
  for (const char* cond : kConditions) {
    std::vector<double> steps;
    for (const CachedRollout& c : eval_sampled(cond))
      if (c.probe_scores)
        steps.insert(steps.end(), c.probe_scores->begin(), c.probe_scores->end());
    csv << cond;
    for (double theta : cfg_.eval.thresholds_sweep)
      csv << ',' << fmt6(probe_perf_ratio(steps, theta));
    csv << '\n';
  }
  write_text_atomic(artifact("theta_sweep.csv"), csv.str());
}

void Experiment::run_steer() {
  const std::vector<CachedRollout>& cache = probe_rollouts();
  std::vector<LabeledRollout> labeled;
  std::vector<LabeledTaskRollout> labeled_tasks;
  for (const CachedRollout& c : cache) {
    CommitmentLabel lab = commitment_point(c.task, c.rollout);
    labeled.push_back({c.rollout, lab});
    labeled_tasks.push_back({c.task, c.rollout, std::move(lab)});
  }

  ProbeHyper hyper;
  hyper.lr = cfg_.probe.lr;
  hyper.epochs = cfg_.probe.epochs;
  hyper.heads = cfg_.probe.heads;
  hyper.head_dim = cfg_.probe.head_dim;
  hyper.holdout_frac = cfg_.probe.holdout_frac;
  const auto [student, agreement] =
      train_student_probe(trained_policy("profil"), labeled_tasks, frozen_probe(), hyper,
                          cfg_.env.max_len, stream("student_probe"));
  (void)student;
  std::ostringstream sp;
  sp << "pearson_of_means,student_held_out_auroc\n"
     << fmt6(agreement.pearson_of_means) << ',' << fmt6(agreement.held_out_auroc) << '\n';
  write_text_atomic(artifact("student_probe.csv"), sp.str());

  CaaConfig caa;
  caa.layer = 1;
  caa.coefficients = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  caa.temperature = cfg_.policy.temperature;
  caa.max_len = cfg_.env.max_len;
  const std::vector<CaaRow> rows =
      caa_sweep(trained_policy("baseline"), freeze_base(base_policy()), labeled, caa,
                eval_tasks(), stream("steer"));
  std::ostringstream csv;
  csv << "coefficient,mean_perf_ratio,accuracy\n";
  for (const CaaRow& r : rows)
    csv << fmt6(r.coefficient) << ',' << fmt6(r.mean_perf_ratio) << ','
        << fmt6(r.accuracy) << '\n';
  write_text_atomic(artifact("steer.csv"), csv.str());
}

void Experiment::run_report() {
  std::vector<MetricRow> rows;
  std::ostringstream deciles, terciles;
  deciles << "condition,d01,d02,d03,d04,d05,d06,d07,d08,d09,d10\n";
  terciles << "condition,low_third,mid_third,high_third\n";

  for (const char* cond : kConditions) {
    const std::vector<CachedRollout>& samp = eval_sampled(cond);
    const std::vector<CachedRollout>& greedy = eval_greedy(cond);
    const int n = static_cast<int>(samp.size());

    std::vector<double> perf, lens, step_scores;
    std::vector<int> correct;
    std::vector<CommitmentLabel> labels;
    labels.reserve(n);
    for (const CachedRollout& c : samp) {
      labels.push_back(commitment_point(c.task, c.rollout));
      perf.push_back(labels.back().perf_ratio);
      lens.push_back(static_cast<double>(c.rollout.num_steps()));
      correct.push_back(c.rollout.correct ? 1 : 0);
      if (c.probe_scores)
        step_scores.insert(step_scores.end(), c.probe_scores->begin(),
                           c.probe_scores->end());
    }

    const auto rate_row = [&](const std::string& name, int hits, int total) {
      MetricRow r{cond, name, total ? static_cast<double>(hits) / total : 0.0,
                  std::nullopt, total};
      if (total) r.ci = wilson_ci(hits, total);
      rows.push_back(std::move(r));
    };
    const auto mean_row = [&](const std::string& name, const std::vector<double>& xs,
                              const std::string& boot_purpose) {
      MetricRow r{cond, name, mean(xs), std::nullopt, static_cast<int>(xs.size())};
      if (!xs.empty())
        r.ci = bootstrap_ci(xs, 5000, 0.95, stream("bootstrap:" + boot_purpose));
      rows.push_back(std::move(r));
    };

    mean_row("perf_ratio", perf, std::string("perf_ratio:") + cond);
    int faithful = 0;
    for (double p : perf)
      if (p <= cfg_.eval.delta_faithful) ++faithful;
    rate_row("faithful_fraction", faithful, n);
    int greedy_correct = 0;
    for (const CachedRollout& c : greedy)
      if (c.rollout.correct) ++greedy_correct;
    rate_row("accuracy", greedy_correct, static_cast<int>(greedy.size()));
    int sampled_correct = 0;
    for (int y : correct) sampled_correct += y;
    rate_row("accuracy_sampled", sampled_correct, n);
    mean_row("chain_length", lens, std::string("chain_length:") + cond);
    int hot_steps = 0;
    for (double s : step_scores)
      if (s >= cfg_.eval.theta_probe) ++hot_steps;
    rate_row("probe_perf_ratio", hot_steps, static_cast<int>(step_scores.size()));

    std::vector<std::pair<const Rollout*, const CommitmentLabel*>> pairs;
    pairs.reserve(n);
    for (int i = 0; i < n; ++i) pairs.emplace_back(&samp[i].rollout, &labels[i]);
    const MarkerFractions mf = marker_fraction(pairs);
    int high = 0, low = 0;
    for (double p : perf) {
      if (p > 0.5) ++high;
      if (p < 0.1) ++low;
    }
    if (mf.high_theater)
      rows.push_back({cond, "marker_high_theater", *mf.high_theater, std::nullopt, high});
    if (mf.faithful)
      rows.push_back({cond, "marker_faithful", *mf.faithful, std::nullopt, low});

    std::vector<Rollout> plain;
    plain.reserve(n);
    for (const CachedRollout& c : samp) plain.push_back(c.rollout);
    rate_row("single_block_fraction", single_block_resolutions(plain), n);

    std::vector<double> correct_d(correct.begin(), correct.end());
    if (const auto sp = spearman(perf, correct_d)) {
      rows.push_back({cond, "spearman_perf_correct", sp->rho, std::nullopt, n});
      rows.push_back({cond, "spearman_p", sp->p, std::nullopt, n});
    }

    const std::array<int, 10> hist = decile_histogram(perf);
    deciles << cond;
    for (int h : hist) deciles << ',' << h;
    deciles << '\n';
    const std::array<double, 3> terc = tercile_report(perf, correct);
    terciles << cond << ',' << fmt6(terc[0]) << ',' << fmt6(terc[1]) << ','
             << fmt6(terc[2]) << '\n';
  }

  rows.push_back({"base", "probe_held_out_auroc", probe_held_out_auroc(), std::nullopt,
                  static_cast<int>(probe_rollouts().size())});
  emit_report(rows, artifact("metrics.csv").string());
  write_text_atomic(artifact("deciles.csv"), deciles.str());
  write_text_atomic(artifact("terciles.csv"), terciles.str());
}

void Experiment::run_all() {
  run_pretrain();
  run_train_probe();
  for (const char* cond : kConditions) run_grpo(cond);
  for (const char* cond : kConditions) run_eval(cond);
  run_audit();
  run_sweep_theta();
  run_steer();
  run_report();
}

void run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  Experiment(cfg, dir).run_all();
}

}  // namespace modchain
