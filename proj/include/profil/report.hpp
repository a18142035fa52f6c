#pragma once

#include <optional>
#include <string>
#include <vector>

#include "profil/stats.hpp"

namespace modchain {

struct MetricRow {
  std::string condition;
  std::string metric;
  double value = 0.0;
  std::optional<Interval> ci;  // rate metrics carry an interval
  int n = 0;
};

// Comma-separated table, header
//   condition,metric,value,ci_lo,ci_hi,method,n
// with every numeric column printed to 3 decimals. Rows without an interval
// leave ci_lo/ci_hi/method empty. Written atomically.
void emit_report(const std::vector<MetricRow>& rows, const std::string& path);

std::string format_report(const std::vector<MetricRow>& rows);

}  // namespace modchain
