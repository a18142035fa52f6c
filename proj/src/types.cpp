#include "profil/types.hpp"

#include <numeric>
#include <stdexcept>

namespace modchain {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Add:
      return "ADD";
    case Action::Elab:
      return "ELAB";
    case Action::Stop:
      return "STOP";
  }
  throw std::logic_error("to_string: bad Action");
}

Action action_from_string(std::string_view s) {
  if (s == "ADD") return Action::Add;
  if (s == "ELAB") return Action::Elab;
  if (s == "STOP") return Action::Stop;
  throw std::invalid_argument("action_from_string: unknown action '" + std::string(s) + "'");
}

Task make_task(std::string id, std::vector<int> values, int modulus) {
  if (values.size() < 2 || values.size() > 8)
    throw std::invalid_argument("make_task: need between 2 and 8 values");
  for (int v : values)
    if (v < 0 || v > 9) throw std::invalid_argument("make_task: values must be digits 0..9");
  if (modulus < 5 || modulus > 13)
    throw std::invalid_argument("make_task: modulus must be in [5, 13]");
  Task t;
  t.id = std::move(id);
  t.values = std::move(values);
  t.modulus = modulus;
  t.answer = std::accumulate(t.values.begin(), t.values.end(), 0) % modulus;
  return t;
}

bool operator==(const StepActivations& x, const StepActivations& y) {
  return x.a1.size() == y.a1.size() && x.a2.size() == y.a2.size() &&
         (x.a1.array() == y.a1.array()).all() && (x.a2.array() == y.a2.array()).all();
}

int Rollout::num_steps() const {
  const auto n = static_cast<int>(actions.size());
  if (n > 0 && actions.back() == Action::Stop) return n - 1;
  return n;
}

bool Rollout::truncated() const {
  return actions.empty() || actions.back() != Action::Stop;
}

TaskMap make_task_map(const std::vector<Task>& tasks) {
  TaskMap map;
  for (const Task& t : tasks) map.emplace(t.id, t);
  return map;
}

bool operator==(const Rollout& x, const Rollout& y) {
  return x.task_id == y.task_id && x.seed == y.seed && x.actions == y.actions &&
         x.forced_answers == y.forced_answers && x.answer == y.answer &&
         x.correct == y.correct && x.step_logprobs == y.step_logprobs &&
         x.activations == y.activations && x.condition == y.condition &&
         x.checkpoint == y.checkpoint;
}

}  // namespace modchain
