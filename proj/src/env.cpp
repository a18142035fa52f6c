#include "profil/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace modchain {

Task gen_task(const EnvConfig& cfg, RngStream& rng, std::string id) {
  const int n = rng.uniform_int(cfg.n_min, cfg.n_max);
  std::vector<int> values(n);
  for (int& v : values) v = rng.uniform_int(0, 9);
  const int m = rng.uniform_int(cfg.m_min, cfg.m_max);
  return make_task(std::move(id), std::move(values), m);
}

std::vector<Task> gen_tasks(const EnvConfig& cfg, RngStream& rng, int count,
                            const std::string& id_prefix) {
  std::vector<Task> tasks;
  tasks.reserve(count);
  for (int i = 0; i < count; ++i)
    tasks.push_back(gen_task(cfg, rng, id_prefix + "_" + std::to_string(i)));
  return tasks;
}

EnvState initial_state() { return EnvState{}; }

EnvState transition(const Task& task, const EnvState& s, Action a) {
  if (s.done) throw std::logic_error("transition: episode already done");
  EnvState next = s;
  switch (a) {
    case Action::Add:
      if (next.incorporated < task.size()) {
        next.running_sum += task.values[next.incorporated];
        ++next.incorporated;
      }
      break;
    case Action::Elab:
      break;
    case Action::Stop:
      next.done = true;
      break;
  }
  ++next.steps_elapsed;
  next.last_action = a;
  return next;
}

int forced_answer(const Task& task, const EnvState& s) {
  return s.running_sum % task.modulus;
}

int forced_answer(const Task& task, const std::vector<Action>& prefix) {
  EnvState s = initial_state();
  for (Action a : prefix) {
    if (a == Action::Stop)
      throw std::invalid_argument("forced_answer: prefix must not contain STOP");
    s = transition(task, s, a);
  }
  return forced_answer(task, s);
}

bool verify(const Task& task, int answer) { return answer == task.answer; }

std::vector<Rollout> make_demos(const std::vector<Task>& tasks, const DemoConfig& cfg,
                                const EnvConfig& env, RngStream rng) {
  if (tasks.empty()) throw std::invalid_argument("make_demos: no tasks");
  std::vector<Rollout> demos;
  demos.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) {
    const Task& task = tasks[i % tasks.size()];
    RngStream r = rng.child(i);
    const int n = task.size();
    // Leave room for the terminal Stop within the episode cap.
    const int tail_cap = env.max_len - n - 1;
    const int tail = std::min(r.geometric_failures(cfg.theater_p), tail_cap);

    Rollout demo;
    demo.task_id = task.id;
    demo.seed = r.stream_id();
    demo.condition = "demo";
    EnvState s = initial_state();
    auto act = [&](Action a) {
      s = transition(task, s, a);
      demo.actions.push_back(a);
      if (a != Action::Stop) demo.forced_answers.push_back(forced_answer(task, s));
    };
    for (int k = 0; k < n; ++k) act(Action::Add);
    for (int k = 0; k < tail; ++k) act(Action::Elab);
    act(Action::Stop);
    demo.answer = forced_answer(task, s);
    demo.correct = verify(task, *demo.answer);
    demo.step_logprobs.assign(demo.actions.size(), 0.0);
    demos.push_back(std::move(demo));
  }
  return demos;
}

}  // namespace modchain
