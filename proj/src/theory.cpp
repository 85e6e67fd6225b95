#include "adapair/theory.hpp"

#include <algorithm>
#include <cmath>

#include "adapair/error.hpp"

namespace adapair {

double statistical_accuracy(double m, double alpha) {
  if (!(m >= 1.0)) throw ConfigError("statistical accuracy: m must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw ConfigError("statistical accuracy: alpha must lie in [0, 0.5]");
  return std::pow(m, -alpha);
}

double warm_start_bound(double delta_m, double m, double n, double alpha) {
  if (!(m <= n)) throw ConfigError("warm-start bound: m must not exceed n");
  return delta_m + 2.0 * ((n - m) / n) * statistical_accuracy(m, alpha);
}

double stability_generalization_bound_sumsq(double G, double n, double sum_squared_steps) {
  if (!(n >= 2.0)) throw ConfigError("stability bound: n must be >= 2");
  return 4.0 * G * G / (n * (n - 1.0)) * std::sqrt(sum_squared_steps);
}

double stability_generalization_bound(double G, double n, std::span<const double> gammas) {
  double sum_sq = 0.0;
  for (double g : gammas) sum_sq += g * g;
  return stability_generalization_bound_sumsq(G, n, sum_sq);
}

double stability_generalization_bound_constant(double G, double n, double gamma, double iterations) {
  if (!(n >= 2.0)) throw ConfigError("stability bound: n must be >= 2");
  return 4.0 * G * G * gamma / (n * (n - 1.0)) * std::sqrt(iterations);
}

double inner_iteration_objective(double G, double mu, double gamma, double n, double iterations) {
  const double a = 1.0 / (gamma * mu);
  const double b = 4.0 * G * G * gamma / (n * (n - 1.0));
  return a / iterations + b * std::sqrt(iterations);
}

std::size_t optimal_inner_iters(double G, double mu, double gamma, double n) {
  if (!(G > 0.0 && mu > 0.0 && gamma > 0.0 && n >= 2.0)) {
    throw ConfigError("optimal inner iterations: constants must be positive and n >= 2");
  }
  const double a = 1.0 / (gamma * mu);
  const double b = 4.0 * G * G * gamma / (n * (n - 1.0));
  const double stationary = std::pow(2.0 * a / b, 2.0 / 3.0);
  const double lo = std::max(1.0, std::floor(stationary));
  const double hi = std::max(1.0, std::ceil(stationary));
  const double f_lo = inner_iteration_objective(G, mu, gamma, n, lo);
  const double f_hi = inner_iteration_objective(G, mu, gamma, n, hi);
  return static_cast<std::size_t>(f_lo <= f_hi ? lo : hi);
}

double convergence_bound(double gap, double gamma, double mu, double sigma2, double iterations) {
  if (!(gamma > 0.0 && mu > 0.0 && iterations > 0.0)) {
    throw ConfigError("convergence bound: gamma, mu and T must be positive");
  }
  return gap / (gamma * mu * iterations) + gamma * sigma2;
}

double pair_loss_lipschitz(PairLoss loss, std::span<const Dataset* const> datasets,
                           std::optional<double> iterate_radius) {
  double radius = 0.0;
  for (const Dataset* ds : datasets) {
    for (std::size_t k = 0; k < ds->size(); ++k) radius = std::max(radius, std::sqrt(ds->row(k).squared_norm()));
  }
  if (loss == PairLoss::Hinge) return 2.0 * radius;
  if (!iterate_radius) {
    throw ConfigError("squared pair loss is not globally Lipschitz: supply an iterate-ball radius");
  }
  const double delta = 2.0 * radius;
  return 2.0 * (1.0 + *iterate_radius * delta) * delta;
}

StabilityProbeResult stability_probe(const Dataset& ds, const TrainConfig& config, std::size_t replaced,
                                     const LabeledExample& replacement,
                                     std::span<const std::pair<SparseVector, SparseVector>> probe_pairs,
                                     std::optional<double> iterate_radius) {
  if (replaced >= ds.size()) throw ConfigError("stability probe: replaced index out of range");
  if (probe_pairs.empty()) throw ConfigError("stability probe: need at least one probe pair");
  SparseVector x = replacement.x;
  x.dim = ds.dim();
  const Dataset perturbed = ds.with_replaced(replaced, std::move(x), replacement.label);

  TraceOptions quiet;
  quiet.record_objectives = false;
  const TrainResult on_s = train_adaptive(ds, config, quiet);
  const TrainResult on_si = train_adaptive(perturbed, config, quiet);

  StabilityProbeResult out;
  for (const auto& [x_pos, x_neg] : probe_pairs) {
    const double a = pair_loss(config.loss, on_s.model.weights, x_pos, x_neg);
    const double b = pair_loss(config.loss, on_si.model.weights, x_pos, x_neg);
    out.measured = std::max(out.measured, std::abs(a - b));
  }
  const Dataset* both[] = {&ds, &perturbed};
  out.lipschitz = pair_loss_lipschitz(config.loss, both, iterate_radius);
  out.sum_squared_steps = on_s.trace.sum_squared_steps();
  out.bound =
      stability_generalization_bound_sumsq(out.lipschitz, static_cast<double>(ds.size()), out.sum_squared_steps) / 2.0;
  return out;
}

}  // namespace adapair
