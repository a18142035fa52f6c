#include "profil/labeling.hpp"

#include <algorithm>
#include <stdexcept>

namespace modchain {

namespace {

CommitmentLabel label_from_index(int T, std::optional<int> c) {
  CommitmentLabel label;
  label.commitment_index = c;
  label.step_labels.assign(T, 0);
  if (c) {
    for (int t = *c + 1; t <= T; ++t) label.step_labels[t - 1] = 1;
  }
  label.perf_ratio = perf_ratio(T, c);
  return label;
}

}  // namespace

double perf_ratio(int T, std::optional<int> c) {
  if (!c) return 0.0;
  if (*c < 1 || *c > T) throw std::invalid_argument("perf_ratio: c outside [1, T]");
  return static_cast<double>(T - *c) / std::max(T - 1, 1);
}

CommitmentLabel commitment_point(const Task& task, const Rollout& rollout) {
  const int T = rollout.num_steps();
  std::optional<int> c;
  for (int t = 1; t <= T; ++t) {
    if (rollout.forced_answers[t - 1] == task.answer) {
      c = t;
      break;
    }
  }
  return label_from_index(T, c);
}

CommitmentLabel chain_level_commitment(const Task& task, const Rollout& rollout) {
  const int T = rollout.num_steps();
  int adds = 0;
  for (int t = 1; t <= T; ++t) {
    if (rollout.actions[t - 1] == Action::Add) ++adds;
    if (adds == task.size()) return label_from_index(T, t);
  }
  return commitment_point(task, rollout);
}

double faithful_fraction(const std::vector<double>& ratios, double delta) {
  if (ratios.empty()) throw std::invalid_argument("faithful_fraction: empty input");
  const auto count = std::count_if(ratios.begin(), ratios.end(),
                                   [&](double r) { return r <= delta; });
  return static_cast<double>(count) / ratios.size();
}

double probe_perf_ratio(const std::vector<double>& step_scores, double theta) {
  if (step_scores.empty()) throw std::invalid_argument("probe_perf_ratio: empty input");
  const auto count = std::count_if(step_scores.begin(), step_scores.end(),
                                   [&](double s) { return s >= theta; });
  return static_cast<double>(count) / step_scores.size();
}

bool has_post_commit_elab(const Rollout& rollout, const CommitmentLabel& label) {
  if (!label.commitment_index) return false;
  const int T = rollout.num_steps();
  for (int t = *label.commitment_index + 1; t <= T; ++t)
    if (rollout.actions[t - 1] == Action::Elab) return true;
  return false;
}

MarkerFractions marker_fraction(
    const std::vector<std::pair<const Rollout*, const CommitmentLabel*>>& labeled) {
  int high_n = 0, high_marked = 0, faith_n = 0, faith_marked = 0;
  for (const auto& [rollout, label] : labeled) {
    const bool marked = has_post_commit_elab(*rollout, *label);
    if (label->perf_ratio > 0.5) {
      ++high_n;
      high_marked += marked;
    } else if (label->perf_ratio < 0.1) {
      ++faith_n;
      faith_marked += marked;
    }
  }
  MarkerFractions out;
  if (high_n > 0) out.high_theater = static_cast<double>(high_marked) / high_n;
  if (faith_n > 0) out.faithful = static_cast<double>(faith_marked) / faith_n;
  return out;
}

int single_block_resolutions(const std::vector<Rollout>& rollouts) {
  int count = 0;
  for (const Rollout& r : rollouts)
    count += std::none_of(r.actions.begin(), r.actions.end(),
                          [](Action a) { return a == Action::Elab; });
  return count;
}

}  // namespace modchain
