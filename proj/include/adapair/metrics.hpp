#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace adapair {

/// Credit for a tied (positive, negative) score pair.
enum class TiesPolicy {
  Half,    ///< 0.5, the Mann-Whitney convention
  Strict,  ///< 0, the literal strict indicator 1[f(x) > f(x')]
};

TiesPolicy parse_ties_policy(std::string_view name);

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;  ///< +1 / -1
};

/// (1/(n+n-)) sum over (positive, negative) pairs of 1[s+ > s-] + credit·1[s+ = s-].
double auc_bruteforce(const ScoredSet& ss, TiesPolicy ties = TiesPolicy::Half);

/// O(n log n) rank-sum form of the same quantity using midranks.
double auc_rank(const ScoredSet& ss, TiesPolicy ties = TiesPolicy::Half);

struct MeanStderr {
  double mean;
  double stderr;
};

/// Mean and sample standard deviation / sqrt(k); throws ConfigError for k < 2.
MeanStderr mean_stderr(std::span<const double> values);

}  // namespace adapair
