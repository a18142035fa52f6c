#include "profil/rollout_io.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "profil/labeling.hpp"

namespace modchain {

using nlohmann::json;

bool operator==(const CachedRollout& a, const CachedRollout& b) {
  return a.task.id == b.task.id && a.task.values == b.task.values &&
         a.task.modulus == b.task.modulus && a.task.answer == b.task.answer &&
         a.rollout == b.rollout && a.probe_scores == b.probe_scores;
}

std::string rollout_to_json_line(const CachedRollout& r, bool store_activations) {
  const CommitmentLabel label = commitment_point(r.task, r.rollout);
  json j;
  j["task_id"] = r.rollout.task_id;
  j["seed"] = r.rollout.seed;
  j["condition"] = r.rollout.condition;
  j["checkpoint"] = r.rollout.checkpoint;
  j["task"] = {{"values", r.task.values},
               {"modulus", r.task.modulus},
               {"answer", r.task.answer}};
  json actions = json::array();
  for (Action a : r.rollout.actions) actions.push_back(std::string(to_string(a)));
  j["actions"] = std::move(actions);
  j["forced_answers"] = r.rollout.forced_answers;
  if (r.rollout.answer)
    j["answer"] = *r.rollout.answer;
  else
    j["answer"] = nullptr;
  j["correct"] = r.rollout.correct;
  if (label.commitment_index)
    j["commitment_index"] = *label.commitment_index;
  else
    j["commitment_index"] = nullptr;
  j["perf_ratio_oracle"] = label.perf_ratio;
  if (r.probe_scores) j["probe_scores"] = *r.probe_scores;
  j["step_logprobs"] = r.rollout.step_logprobs;
  if (store_activations && r.rollout.activations) {
    json a1 = json::array(), a2 = json::array();
    for (const StepActivations& s : *r.rollout.activations) {
      a1.push_back(std::vector<double>(s.a1.begin(), s.a1.end()));
      a2.push_back(std::vector<double>(s.a2.begin(), s.a2.end()));
    }
    j["activations"] = {{"a1", std::move(a1)}, {"a2", std::move(a2)}};
  }
  return j.dump();
}

CachedRollout rollout_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  CachedRollout out;
  out.task = make_task(j.at("task_id").get<std::string>(),
                       j.at("task").at("values").get<std::vector<int>>(),
                       j.at("task").at("modulus").get<int>());
  if (out.task.answer != j.at("task").at("answer").get<int>())
    throw std::runtime_error("task answer does not match its values");
  Rollout& r = out.rollout;
  r.task_id = j.at("task_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.condition = j.at("condition").get<std::string>();
  r.checkpoint = j.at("checkpoint").get<int>();
  for (const auto& a : j.at("actions"))
    r.actions.push_back(action_from_string(a.get<std::string>()));
  r.forced_answers = j.at("forced_answers").get<std::vector<int>>();
  if (!j.at("answer").is_null()) r.answer = j.at("answer").get<int>();
  r.correct = j.at("correct").get<bool>();
  r.step_logprobs = j.at("step_logprobs").get<std::vector<double>>();
  if (j.contains("probe_scores"))
    out.probe_scores = j.at("probe_scores").get<std::vector<double>>();
  if (j.contains("activations")) {
    const auto& a1 = j.at("activations").at("a1");
    const auto& a2 = j.at("activations").at("a2");
    r.activations.emplace();
    for (std::size_t t = 0; t < a1.size(); ++t) {
      StepActivations s;
      const auto v1 = a1[t].get<std::vector<double>>();
      const auto v2 = a2[t].get<std::vector<double>>();
      s.a1 = Eigen::Map<const Eigen::VectorXd>(v1.data(), v1.size());
      s.a2 = Eigen::Map<const Eigen::VectorXd>(v2.data(), v2.size());
      r.activations->push_back(std::move(s));
    }
  }
  return out;
}

void write_rollouts(const std::string& path, const std::vector<CachedRollout>& rollouts,
                    bool store_activations) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("write_rollouts: cannot open '" + tmp + "'");
    for (const CachedRollout& r : rollouts)
      out << rollout_to_json_line(r, store_activations) << "\n";
    if (!out) throw std::runtime_error("write_rollouts: write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("write_rollouts: rename to '" + path + "' failed");
}

std::vector<CachedRollout> read_rollouts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_rollouts: cannot open '" + path + "'");
  std::vector<CachedRollout> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(rollout_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("read_rollouts: " + path + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace modchain
