#pragma once

#include <vector>

#include "profil/rng.hpp"
#include "profil/types.hpp"

namespace modchain {

struct EnvConfig {
  int n_min = 2;  // value count range
  int n_max = 8;
  int m_min = 5;  // modulus range
  int m_max = 13;
  // Cap on actions per episode, terminal Stop included. An episode that runs
  // to the cap without stopping is truncated and scores zero.
  int max_len = 24;
};

Task gen_task(const EnvConfig& cfg, RngStream& rng, std::string id);
std::vector<Task> gen_tasks(const EnvConfig& cfg, RngStream& rng, int count,
                            const std::string& id_prefix);

EnvState initial_state();

// Add incorporates the next value when any remain and is a no-op afterwards;
// Elab never touches the sum; Stop marks the state done. Every action costs
// one step.
EnvState transition(const Task& task, const EnvState& s, Action a);

// Answer the chain would emit if forced to stop in state s.
int forced_answer(const Task& task, const EnvState& s);

// Same, for a replayed action prefix (which must not contain Stop).
int forced_answer(const Task& task, const std::vector<Action>& prefix);

bool verify(const Task& task, int answer);

struct DemoConfig {
  int count = 2000;
  // Chance each post-completion step continues elaborating. The padded tail
  // has geometric length with mean theater_p / (1 - theater_p).
  double theater_p = 0.5;
};

// Scripted correct chains: incorporate every value, pad with a random run of
// Elab, then stop. These teach both the task and the padding habit.
std::vector<Rollout> make_demos(const std::vector<Task>& tasks, const DemoConfig& cfg,
                                const EnvConfig& env, RngStream rng);

}  // namespace modchain
