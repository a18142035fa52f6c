#include "profil/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "profil/stats.hpp"

namespace modchain {

std::pair<std::vector<double>, std::vector<int>> apply_probe_filter(
    const std::vector<double>& r, const std::vector<double>& p_bars, double tau) {
  if (r.size() != p_bars.size())
    throw std::invalid_argument("apply_probe_filter: size mismatch");
  std::vector<double> filtered(r.size());
  std::vector<int> mask(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) {
    mask[k] = p_bars[k] < tau ? 1 : 0;
    filtered[k] = r[k] * mask[k];
  }
  return {std::move(filtered), std::move(mask)};
}

Advantages group_advantages(const std::vector<double>& filtered_rewards,
                            const std::vector<int>& keep_mask, GroupStatsMode mode) {
  const std::size_t K = filtered_rewards.size();
  if (K < 2) throw std::invalid_argument("group_advantages: K must be >= 2");
  if (keep_mask.size() != K)
    throw std::invalid_argument("group_advantages: size mismatch");
  Advantages out;
  out.a.assign(K, 0.0);

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (mode == GroupStatsMode::Unfiltered && !keep_mask[k]) continue;
    sum += filtered_rewards[k];
    ++count;
  }
  if (count == 0) return out;
  out.mu = sum / count;
  // Two-pass variance: a group of identical rewards must land well under the
  // degeneracy guard instead of at round-off scale.
  double ss = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (mode == GroupStatsMode::Unfiltered && !keep_mask[k]) continue;
    const double d = filtered_rewards[k] - out.mu;
    ss += d * d;
  }
  out.sigma = std::sqrt(ss / count);
  if (out.sigma < 1e-8) {
    out.sigma = 0.0;
    return out;
  }
  for (std::size_t k = 0; k < K; ++k)
    if (keep_mask[k]) out.a[k] = (filtered_rewards[k] - out.mu) / out.sigma;
  return out;
}

double length_penalty_reward(double r, int chain_steps, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("length_penalty_reward: lambda < 0");
  return r - lambda * chain_steps;
}

double adaptive_tau(const TauSchedule& s) {
  if (s.tau_min > s.tau_max || s.r_lo >= s.r_hi)
    throw std::invalid_argument("adaptive_tau: bad schedule");
  const double frac = std::clamp((s.r_bar - s.r_lo) / (s.r_hi - s.r_lo), 0.0, 1.0);
  return s.tau_min + (s.tau_max - s.tau_min) * frac;
}

TauSchedule update_ema(TauSchedule schedule, double batch_mean_reward) {
  schedule.r_bar =
      schedule.ema_decay * schedule.r_bar + (1.0 - schedule.ema_decay) * batch_mean_reward;
  return schedule;
}

PolicyParams grpo_step(const PolicyParams& params, const FrozenBase& base,
                       const Probe* probe, const std::vector<Task>& tasks_batch,
                       const TrainerConfig& cfg, TauSchedule& schedule, RngStream rng,
                       StepStats* stats_out) {
  if (tasks_batch.empty()) throw std::invalid_argument("grpo_step: empty batch");
  if (cfg.group_size < 2) throw std::invalid_argument("grpo_step: group_size must be >= 2");
  const bool filtering = cfg.filter_enabled && probe != nullptr;
  if (cfg.filter_enabled && probe == nullptr)
    throw std::invalid_argument("grpo_step: filter enabled without a probe");

  const std::size_t B = tasks_batch.size();
  const std::size_t K = cfg.group_size;
  std::vector<std::vector<Rollout>> rollouts(B);
  std::vector<GroupBatch> groups(B);

  double reward_sum = 0.0;
  int correct_count = 0;
  for (std::size_t i = 0; i < B; ++i) {
    rollouts[i].reserve(K);
    GroupBatch& g = groups[i];
    for (std::size_t k = 0; k < K; ++k) {
      Rollout r = sample_rollout(params, tasks_batch[i], cfg.temperature, cfg.max_len,
                                 rng.child(i * K + k), base, filtering);
      double reward = r.correct ? 1.0 : 0.0;
      correct_count += r.correct;
      if (cfg.reward_mode == RewardMode::LengthPenalty)
        reward = length_penalty_reward(reward, r.num_steps(), cfg.lambda);
      g.rewards.push_back(reward);
      if (filtering && r.num_steps() > 0)
        g.p_bars.push_back(mean_performativity(*probe, r).mean);
      else
        g.p_bars.push_back(0.0);
      rollouts[i].push_back(std::move(r));
      reward_sum += reward;
    }
  }
  const double batch_mean = reward_sum / static_cast<double>(B * K);
  schedule = update_ema(schedule, batch_mean);
  const double tau =
      schedule.mode == TauSchedule::Mode::Fixed ? schedule.tau_fixed : adaptive_tau(schedule);

  PolicyParams grad = zero_like(params);
  int filtered_count = 0;
  int kept_total = 0;
  double p_bar_sum = 0.0;
  for (std::size_t i = 0; i < B; ++i) {
    GroupBatch& g = groups[i];
    g.tau = tau;
    if (filtering) {
      auto [fr, mask] = apply_probe_filter(g.rewards, g.p_bars, tau);
      g.filtered_rewards = std::move(fr);
      g.keep_mask = std::move(mask);
    } else {
      g.filtered_rewards = g.rewards;
      g.keep_mask.assign(K, 1);
    }
    for (int kept : g.keep_mask) {
      filtered_count += 1 - kept;
      kept_total += kept;
    }
    for (double p : g.p_bars) p_bar_sum += p;

    const Advantages adv = group_advantages(g.filtered_rewards, g.keep_mask,
                                            cfg.group_stats_mode);
    g.advantages = adv.a;
    g.mu = adv.mu;
    g.sigma = adv.sigma;
    for (std::size_t k = 0; k < K; ++k) {
      if (g.advantages[k] == 0.0) continue;
      accumulate_logprob_grad(params, tasks_batch[i], rollouts[i][k], g.advantages[k],
                              cfg.temperature, cfg.max_len, grad);
    }
  }

  // The surrogate is a mean over the rollouts admitted to the loss: filtered
  // rollouts are excluded from the objective outright, so they do not deflate
  // the step size. Without filtering kept_total is exactly B * K.
  PolicyParams next = params;
  if (kept_total > 0) axpy(next, grad, cfg.lr / static_cast<double>(kept_total));

  if (stats_out) {
    stats_out->mean_reward = batch_mean;
    stats_out->filter_rate = static_cast<double>(filtered_count) / static_cast<double>(B * K);
    stats_out->tau = tau;
    stats_out->mean_p_bar = p_bar_sum / static_cast<double>(B * K);
    stats_out->accuracy = static_cast<double>(correct_count) / static_cast<double>(B * K);
    stats_out->groups = std::move(groups);
  }
  return next;
}

std::optional<double> audit_frozen_probe(const Probe& probe, const FrozenBase& base,
                                         const std::vector<LabeledTaskRollout>& labeled,
                                         int max_len) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const LabeledTaskRollout& lr : labeled) {
    if (lr.rollout.num_steps() == 0) continue;
    const ProbeScores s = mean_performativity(probe, base, lr.task, lr.rollout, max_len);
    for (std::size_t t = 0; t < s.per_step.size(); ++t) {
      scores.push_back(s.per_step[t]);
      labels.push_back(lr.label.step_labels[t]);
    }
  }
  const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!pos || !neg) return std::nullopt;
  return auroc(scores, labels);
}

}  // namespace modchain
