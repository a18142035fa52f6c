#include "profil/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace modchain {

namespace {

// Average ranks (1-based); tied values share the mean of their rank span.
std::vector<double> average_ranks(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * (sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi) return sorted[lo];
  const double w = pos - lo;
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

Interval wilson_ci(int successes, int n, double level) {
  if (n < 1) throw std::invalid_argument("wilson_ci: n must be >= 1");
  if (successes < 0 || successes > n)
    throw std::invalid_argument("wilson_ci: successes out of range");
  if (level <= 0.0 || level >= 1.0)
    throw std::invalid_argument("wilson_ci: level must be in (0,1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + level / 2.0);
  const double z2 = z * z;
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval ci;
  ci.lo = std::max(0.0, center - half);
  ci.hi = std::min(1.0, center + half);
  ci.method = Interval::Method::Wilson;
  ci.n = n;
  ci.level = level;
  return ci;
}

Interval bootstrap_ci(const std::vector<double>& samples, int resamples, double level,
                      RngStream rng) {
  if (samples.empty()) throw std::invalid_argument("bootstrap_ci: empty samples");
  if (resamples < 1) throw std::invalid_argument("bootstrap_ci: resamples must be >= 1");
  const int n = static_cast<int>(samples.size());
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    RngStream r = rng.child(b);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += samples[r.uniform_int(0, n - 1)];
    means[b] = sum / n;
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  Interval ci;
  ci.lo = quantile_sorted(means, alpha);
  ci.hi = quantile_sorted(means, 1.0 - alpha);
  ci.method = Interval::Method::Bootstrap;
  ci.n = n;
  ci.level = level;
  return ci;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auroc: size mismatch");
  const auto n_pos = std::count(labels.begin(), labels.end(), 1);
  const auto n_neg = static_cast<long>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auroc: both classes required");
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) rank_sum_pos += ranks[i];
  const double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::optional<SpearmanResult> spearman(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("spearman: need at least 3 points");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  SpearmanResult res;
  res.rho = sxy / std::sqrt(sxx * syy);
  const double clipped = std::clamp(res.rho, -1.0, 1.0);
  if (std::abs(clipped) >= 1.0) {
    res.p = 0.0;
  } else {
    const double t = clipped * std::sqrt((n - 2) / (1.0 - clipped * clipped));
    const boost::math::students_t_distribution<double> dist(n - 2);
    res.p = 2.0 * boost::math::cdf(dist, -std::abs(t));
  }
  return res;
}

std::array<double, 3> tercile_report(const std::vector<double>& perf_ratios,
                                     const std::vector<int>& outcomes) {
  if (perf_ratios.size() != outcomes.size())
    throw std::invalid_argument("tercile_report: size mismatch");
  const int n = static_cast<int>(perf_ratios.size());
  if (n < 3) throw std::invalid_argument("tercile_report: need at least 3 points");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return perf_ratios[i] < perf_ratios[j]; });
  std::array<double, 3> acc{};
  int start = 0;
  for (int g = 0; g < 3; ++g) {
    const int size = n / 3 + (g < n % 3 ? 1 : 0);
    double sum = 0.0;
    for (int i = start; i < start + size; ++i) sum += outcomes[order[i]];
    acc[g] = sum / size;
    start += size;
  }
  return acc;
}

std::array<int, 10> decile_histogram(const std::vector<double>& perf_ratios) {
  std::array<int, 10> bins{};
  for (double r : perf_ratios) {
    if (r < 0.0 || r > 1.0)
      throw std::invalid_argument("decile_histogram: ratio outside [0,1]");
    int bin = 0;
    for (int k = 1; k < 10; ++k)
      if (r >= k / 10.0) bin = k;
    ++bins[bin];
  }
  return bins;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

}  // namespace modchain
