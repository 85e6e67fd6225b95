#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "adapair/data.hpp"
#include "adapair/optimizer.hpp"
#include "adapair/pairloss.hpp"

namespace adapair {

/// Problem constants assumed by the bounds.
struct TheoryConstants {
  double G = 1.0;       ///< Lipschitz constant of the pair loss
  double mu = 1.0;      ///< strong convexity modulus
  double L = 1.0;       ///< smoothness constant
  double sigma2 = 0.0;  ///< bound on the stochastic gradient variance
};

/// V_m = m^-alpha (unit constant).
double statistical_accuracy(double m, double alpha);

/// Warm-start suboptimality bound delta_m + 2·((n - m)/n)·V_m.
double warm_start_bound(double delta_m, double m, double n, double alpha);

/// Generalization bound 4G^2 / (n(n-1)) · sqrt(sum_t γ_t^2).
double stability_generalization_bound(double G, double n, std::span<const double> gammas);
/// Same bound given sum_t γ_t^2 directly.
double stability_generalization_bound_sumsq(double G, double n, double sum_squared_steps);
/// Constant-step form 4G^2 γ sqrt(T) / (n(n-1)).
double stability_generalization_bound_constant(double G, double n, double gamma, double iterations);

/// A/T + B·sqrt(T) with A = 1/(γμ), B = 4G^2γ/(n(n-1)).
double inner_iteration_objective(double G, double mu, double gamma, double n, double iterations);
/// Integer minimizer of inner_iteration_objective. The continuous stationary
/// point is T_c = (2A/B)^{2/3}; the answer is whichever of floor(T_c) and
/// ceil(T_c) has the smaller objective (the floor on ties), at least 1.
std::size_t optimal_inner_iters(double G, double mu, double gamma, double n);

/// (1/(γμT))·gap + γσ^2.
double convergence_bound(double gap, double gamma, double mu, double sigma2, double iterations);

/// Lipschitz constant of the pair loss over the rows of the given datasets.
/// Hinge: 2·max ||x||. Squared: 2(1 + 2rR)·2r on the iterate ball of radius R,
/// which must then be supplied.
double pair_loss_lipschitz(PairLoss loss, std::span<const Dataset* const> datasets,
                           std::optional<double> iterate_radius = std::nullopt);

struct LabeledExample {
  SparseVector x;
  int label = 1;
};

struct StabilityProbeResult {
  double measured = 0.0;  ///< max over probe pairs of |loss(w_S) - loss(w_{S^i})|
  double bound = 0.0;     ///< epsilon = half the generalization bound
  double lipschitz = 0.0;
  double sum_squared_steps = 0.0;
};

/// Trains on S and on S^i (row `replaced` swapped for `replacement`) with the
/// same seed, so both runs draw identical positions, and compares the losses
/// of the two models on the probe pairs (x_pos, x_neg).
StabilityProbeResult stability_probe(const Dataset& ds, const TrainConfig& config, std::size_t replaced,
                                     const LabeledExample& replacement,
                                     std::span<const std::pair<SparseVector, SparseVector>> probe_pairs,
                                     std::optional<double> iterate_radius = std::nullopt);

}  // namespace adapair
