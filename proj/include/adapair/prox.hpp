#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adapair/data.hpp"

namespace adapair {

/// Elastic net Omega(w) = lambda2·||w||^2 + lambda1·||w||_1.
struct Regularizer {
  double lambda2 = 0.0;
  double lambda1 = 0.0;

  void validate() const;
  bool is_zero() const noexcept { return lambda2 == 0.0 && lambda1 == 0.0; }
};

double reg_value(const Regularizer& reg, std::span<const double> w) noexcept;

double soft_threshold(double u, double tau) noexcept;

/// argmin_w (1/(2γ))(w - z)^2 + lambda2·w^2 + lambda1·|w| for one coordinate:
/// sign(u)·max(|u| - τ, 0) with u = z/(2γλ2 + 1), τ = γλ1/(2γλ2 + 1).
double prox_coordinate(double z, double gamma, const Regularizer& reg) noexcept;

/// Coordinatewise prox of the elastic net. Throws ConfigError for gamma <= 0.
std::vector<double> prox_elastic_net(std::span<const double> z, double gamma, const Regularizer& reg);
SparseVector prox_elastic_net(const SparseVector& z, double gamma, const Regularizer& reg);

/// Weight vector under repeated "gradient step then elastic-net prox" updates
/// where each gradient touches only a few coordinates.
///
/// Coordinates outside a gradient's support only receive the prox map. Those
/// pending maps are not applied eagerly: each coordinate remembers the step at
/// which it was last brought up to date and catches up in closed form when it
/// is read. k prox steps with fixed γ shrink |w| to
///   max(0, q^k |w| - τ' (1 - q^k)/(1 - q)),  q = 1/(1 + 2γλ2), τ' = γλ1·q,
/// because the unclamped recursion is affine and 0 is absorbing. Per-update
/// cost is O(nnz(gradient)) independent of the dimension.
class LazyElasticNet {
 public:
  LazyElasticNet(std::vector<double> w0, const Regularizer& reg, double gamma);

  /// Brings every coordinate up to date, then switches the step size.
  void set_gamma(double gamma);
  double gamma() const noexcept { return gamma_; }

  /// Current value of coordinate c (brought up to date as a side effect).
  double value(FeatureIndex c);

  /// One iteration: w <- prox(w - γ·grad). Returns false if a touched
  /// coordinate became non-finite.
  bool step(const SparseVector& grad);

  /// All coordinates brought up to date.
  const std::vector<double>& flush();

  std::uint64_t steps() const noexcept { return now_; }

 private:
  void catch_up(FeatureIndex c);

  std::vector<double> w_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t now_ = 0;
  Regularizer reg_;
  double gamma_ = 0.0;
  double log_q_ = 0.0;     // log(1/(1+2γλ2)) as -log1p(2γλ2)
  double tau_ = 0.0;       // γλ1/(1+2γλ2)
  double ratio_ = 0.0;     // 2γλ2
};

}  // namespace adapair
