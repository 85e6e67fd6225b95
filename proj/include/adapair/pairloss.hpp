#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "adapair/data.hpp"
#include "adapair/prox.hpp"

namespace adapair {

/// Surrogate of the AUC indicator on a (positive, negative) pair with margin
/// m = <w, x_pos - x_neg>: Squared (1 - m)^2, Hinge max(0, 1 - m).
enum class PairLoss { Squared, Hinge };

/// How the pair sum is normalized.
/// OppositeSpace: mean over the n+·n- (positive, negative) pairs.
/// PairSpace: sum over both orderings of opposite pairs divided by n(n-1);
/// same-label pairs contribute zero.
enum class Normalization { OppositeSpace, PairSpace };

PairLoss parse_pair_loss(std::string_view name);
std::string_view to_string(PairLoss loss) noexcept;
Normalization parse_normalization(std::string_view name);
std::string_view to_string(Normalization norm) noexcept;

/// Linear scorer f(x) = <w, x>.
struct Model {
  std::vector<double> weights;

  double score(const SparseVector& x) const noexcept { return x.dot(weights); }
  std::vector<double> scores(const Dataset& ds) const;
  std::size_t support_size() const noexcept;
};

double loss_from_margin(PairLoss loss, double margin) noexcept;
/// d loss / d margin; the hinge subgradient at the kink (margin == 1) is 0.
double loss_slope(PairLoss loss, double margin) noexcept;

double pair_margin(std::span<const double> w, const SparseVector& x_pos, const SparseVector& x_neg);
double pair_loss(PairLoss loss, std::span<const double> w, const SparseVector& x_pos, const SparseVector& x_neg);
/// Gradient in w; support is contained in the support of x_pos - x_neg.
SparseVector pair_grad(PairLoss loss, std::span<const double> w, const SparseVector& x_pos,
                       const SparseVector& x_neg);

/// Weight applied to a one-ordering (positive, negative) pair sum to obtain
/// the normalized loss: 1/(n+n-) or 2/(n(n-1)).
double normalization_factor(Normalization norm, std::size_t n_pos, std::size_t n_neg) noexcept;

/// Exact objective by enumerating every (positive, negative) pair, plus reg(w).
double full_objective(PairLoss loss, std::span<const double> w, const Dataset& ds, const Regularizer& reg,
                      Normalization norm);
/// Exact gradient of the loss part by enumeration: for i in pos, j in neg
/// accumulate pair_grad, then scale by normalization_factor.
std::vector<double> full_gradient(PairLoss loss, std::span<const double> w, const Dataset& ds, Normalization norm);

/// Same value as full_objective computed from the n scores in O(n log n):
/// the squared loss expands into per-class moments, the hinge loss is summed
/// over a sorted sweep.
double fast_objective(PairLoss loss, std::span<const double> w, const Dataset& ds, const Regularizer& reg,
                      Normalization norm);

}  // namespace adapair
