#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modchain {

enum class Action { Add, Elab, Stop };

std::string_view to_string(Action a);
Action action_from_string(std::string_view s);

// A modular-sum problem instance: the answer is (sum of values) mod modulus.
struct Task {
  std::string id;
  std::vector<int> values;  // digits in [0,9], between 2 and 8 of them
  int modulus = 5;          // in [5,13]
  int answer = 0;

  int size() const { return static_cast<int>(values.size()); }
};

// Validates fields and fills in the answer.
Task make_task(std::string id, std::vector<int> values, int modulus);

struct EnvState {
  int incorporated = 0;
  int running_sum = 0;
  int steps_elapsed = 0;
  std::optional<Action> last_action;
  bool done = false;
};

// Hidden-layer snapshot at one decision state, read from a fixed policy.
struct StepActivations {
  Eigen::VectorXd a1;
  Eigen::VectorXd a2;
};

bool operator==(const StepActivations& x, const StepActivations& y);

// One sampled chain. The terminal Stop action, when present, is recorded in
// `actions` but is not a reasoning step: num_steps() excludes it, and
// forced_answers / activations carry exactly one entry per reasoning step.
struct Rollout {
  std::string task_id;
  std::uint64_t seed = 0;
  std::vector<Action> actions;
  std::vector<int> forced_answers;
  std::optional<int> answer;
  bool correct = false;
  std::vector<double> step_logprobs;  // one per action, terminal Stop included
  std::optional<std::vector<StepActivations>> activations;
  std::string condition;
  int checkpoint = 0;

  // T: reasoning steps, excluding the terminal Stop.
  int num_steps() const;
  bool truncated() const;
};

bool operator==(const Rollout& x, const Rollout& y);

using TaskMap = std::map<std::string, Task>;
TaskMap make_task_map(const std::vector<Task>& tasks);

}  // namespace modchain
