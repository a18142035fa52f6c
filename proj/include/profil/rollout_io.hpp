#pragma once

#include <optional>
#include <string>
#include <vector>

#include "profil/types.hpp"

namespace modchain {

// One persisted record: the rollout, its task, and optional probe scores.
// Oracle fields (commitment index, perf ratio) are derived at write time so
// every cache line is self-describing.
struct CachedRollout {
  Task task;
  Rollout rollout;
  std::optional<std::vector<double>> probe_scores;
};

bool operator==(const CachedRollout& a, const CachedRollout& b);

// Newline-delimited records, one JSON object per line, written atomically.
// store_activations=false drops the activation arrays from the file.
void write_rollouts(const std::string& path, const std::vector<CachedRollout>& rollouts,
                    bool store_activations = true);

// Errors carry the 1-based line number of the offending record.
std::vector<CachedRollout> read_rollouts(const std::string& path);

std::string rollout_to_json_line(const CachedRollout& r, bool store_activations = true);
CachedRollout rollout_from_json_line(const std::string& line);

}  // namespace modchain
