#include "adapair/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "adapair/error.hpp"

namespace adapair {

TiesPolicy parse_ties_policy(std::string_view name) {
  if (name == "half") return TiesPolicy::Half;
  if (name == "strict") return TiesPolicy::Strict;
  throw ConfigError("unknown ties policy '" + std::string(name) + "' (expected half|strict)");
}

namespace {
void check_scored_set(const ScoredSet& ss) {
  if (ss.scores.size() != ss.labels.size()) throw ConfigError("auc: scores and labels differ in length");
  bool pos = false, neg = false;
  for (int y : ss.labels) {
    if (y > 0) pos = true;
    else neg = true;
  }
  if (!pos || !neg) throw ClassEmptyError("auc: both classes must be present");
}
}  // namespace

double auc_bruteforce(const ScoredSet& ss, TiesPolicy ties) {
  check_scored_set(ss);
  const double credit = ties == TiesPolicy::Half ? 0.5 : 0.0;
  double wins = 0.0;
  double n_pos = 0.0, n_neg = 0.0;
  for (std::size_t i = 0; i < ss.scores.size(); ++i) {
    if (ss.labels[i] > 0) n_pos += 1.0;
    else n_neg += 1.0;
  }
  for (std::size_t i = 0; i < ss.scores.size(); ++i) {
    if (ss.labels[i] <= 0) continue;
    for (std::size_t j = 0; j < ss.scores.size(); ++j) {
      if (ss.labels[j] > 0) continue;
      if (ss.scores[i] > ss.scores[j]) wins += 1.0;
      else if (ss.scores[i] == ss.scores[j]) wins += credit;
    }
  }
  return wins / (n_pos * n_neg);
}

double auc_rank(const ScoredSet& ss, TiesPolicy ties) {
  check_scored_set(ss);
  const std::size_t n = ss.scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ss.scores[a] < ss.scores[b]; });

  // Twice the midrank sum of positives stays integral: a tie block occupying
  // 1-based ranks [lo, hi] has doubled midrank lo + hi.
  double doubled_rank_sum = 0.0;
  double tied_pairs = 0.0;
  double n_pos = 0.0;
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo;
    while (hi + 1 < n && ss.scores[order[hi + 1]] == ss.scores[order[lo]]) ++hi;
    double block_pos = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
      if (ss.labels[order[k]] > 0) block_pos += 1.0;
    }
    const double block_neg = static_cast<double>(hi - lo + 1) - block_pos;
    doubled_rank_sum += block_pos * static_cast<double>(lo + 1 + hi + 1);
    tied_pairs += block_pos * block_neg;
    n_pos += block_pos;
    lo = hi + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  // U = R+ - n+(n+ + 1)/2, doubled to stay in integers.
  double doubled_u = doubled_rank_sum - n_pos * (n_pos + 1.0);
  if (ties == TiesPolicy::Strict) doubled_u -= tied_pairs;
  return doubled_u / (2.0 * n_pos * n_neg);
}

MeanStderr mean_stderr(std::span<const double> values) {
  if (values.size() < 2) throw ConfigError("mean_stderr: standard error needs at least two values");
  const auto k = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / k;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (k - 1.0));
  return {mean, sd / std::sqrt(k)};
}

}  // namespace adapair
