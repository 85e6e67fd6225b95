#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "adapair/data.hpp"
#include "adapair/pairloss.hpp"
#include "adapair/rng.hpp"

namespace adapair {

enum class PairDistributionKind {
  UniformPairs,  ///< P(i,j) = 1/(n(n-1)) over all ordered pairs i != j
  OppositeOnly,  ///< P(i,j) = 1/(2 n+ n-) on opposite-label ordered pairs, 0 otherwise
};

PairDistributionKind parse_distribution(std::string_view name);
std::string_view to_string(PairDistributionKind kind) noexcept;

/// Sampling law over the ordered pairs of one (stage) dataset.
class PairDistribution {
 public:
  /// Throws ClassEmptyError / ConfigError if the law is undefined on `ds`.
  PairDistribution(PairDistributionKind kind, const Dataset& ds);

  PairDistributionKind kind() const noexcept { return kind_; }
  std::size_t n() const noexcept { return n_pos_ + n_neg_; }
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t n_neg() const noexcept { return n_neg_; }

  /// P(i, j) for positions i != j given their labels.
  double probability(int label_i, int label_j) const noexcept;

 private:
  PairDistributionKind kind_;
  std::size_t n_pos_;
  std::size_t n_neg_;
};

/// An ordered pair of positions in the sampled dataset.
struct PairDraw {
  std::uint32_t i;
  std::uint32_t j;
};

/// OppositeOnly: i uniform over positives, j uniform over negatives (the
/// (positive, negative) orientation stands for both orderings, whose gradients
/// coincide). UniformPairs: an ordered pair uniform over i != j.
PairDraw sample_pair(const PairDistribution& dist, Rng& rng, const Dataset& ds);

/// Factor making weight·pair_grad an unbiased estimate of full_gradient under
/// `target`. Throws ConfigError for a pair the distribution cannot draw.
///   OppositeOnly -> OppositeSpace: 1
///   OppositeOnly -> PairSpace:     2n+n-/(n(n-1))
///   UniformPairs -> PairSpace:     1 on opposite pairs, 0 on same-label pairs
///   UniformPairs -> OppositeSpace: n(n-1)/(2n+n-) on opposite pairs, 0 otherwise
double importance_weight(const PairDistribution& dist, int label_i, int label_j, Normalization target);

/// Importance-weighted gradient of the drawn pair, oriented (positive,
/// negative); the zero vector for a same-label draw.
SparseVector pair_stochastic_gradient(PairLoss loss, std::span<const double> w, const PairDistribution& dist,
                                      const Dataset& ds, PairDraw pair, Normalization target);

/// Draws a pair and returns its importance-weighted gradient.
SparseVector stochastic_gradient(PairLoss loss, std::span<const double> w, const PairDistribution& dist, Rng& rng,
                                 const Dataset& ds, Normalization target);

/// Sum over every ordered pair of P(i,j)·g_ij, enumerated exactly.
std::vector<double> expected_stochastic_gradient(PairLoss loss, std::span<const double> w,
                                                 const PairDistribution& dist, const Dataset& ds,
                                                 Normalization target);

inline constexpr std::size_t kDefaultVariancePairCap = 2000;

/// Exact Var[g] = sum_ij P(i,j)·||g_ij - E g||^2 by enumeration of the
/// n(n-1) ordered pairs. Throws CapExceededError above `pair_cap`.
double variance_exact(PairLoss loss, std::span<const double> w, const PairDistribution& dist, const Dataset& ds,
                      Normalization target, std::size_t pair_cap = kDefaultVariancePairCap);

struct VarianceEstimate {
  double mean;    ///< (1/(K-1)) sum_k ||g_k - ĝ||^2
  double stderr;  ///< standard error of that mean
};

/// Monte-Carlo estimate of the same variance from K >= 2 draws. The first
/// pass forms ĝ, the second replays the identical draws.
VarianceEstimate variance_mc(PairLoss loss, std::span<const double> w, const PairDistribution& dist,
                             const Dataset& ds, std::size_t draws, Rng& rng, Normalization target);

}  // namespace adapair
