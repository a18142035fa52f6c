#pragma once

#include <array>
#include <optional>
#include <vector>

#include "profil/rng.hpp"

namespace modchain {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  enum class Method { Wilson, Bootstrap } method = Method::Wilson;
  int n = 0;
  double level = 0.95;
};

// Wilson score interval for a binomial rate.
Interval wilson_ci(int successes, int n, double level = 0.95);

// Percentile interval of the resampled means. Each resample draws from its
// own derived stream, so the result is independent of evaluation order.
Interval bootstrap_ci(const std::vector<double>& samples, int resamples, double level,
                      RngStream rng);

// Probability that a random positive outscores a random negative, ties
// counted half. Rank-based; both classes must be present.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Throws when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
};

// Rank correlation with average ranks for ties; p from the t approximation
// on n-2 degrees of freedom. Constant input has no defined rank order.
std::optional<SpearmanResult> spearman(const std::vector<double>& x,
                                       const std::vector<double>& y);

// Sort by ratio, split into three near-equal groups (remainders go to the
// earlier groups), report the mean outcome of each.
std::array<double, 3> tercile_report(const std::vector<double>& perf_ratios,
                                     const std::vector<int>& outcomes);

// Counts over bins [0,0.1), [0.1,0.2), ..., [0.9,1.0]; the last bin is
// closed at 1.
std::array<int, 10> decile_histogram(const std::vector<double>& perf_ratios);

double mean(const std::vector<double>& xs);

}  // namespace modchain
