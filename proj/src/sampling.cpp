#include "adapair/sampling.hpp"

#include <cmath>
#include <string>

#include "adapair/error.hpp"

namespace adapair {

PairDistributionKind parse_distribution(std::string_view name) {
  if (name == "opposite") return PairDistributionKind::OppositeOnly;
  if (name == "uniform") return PairDistributionKind::UniformPairs;
  throw ConfigError("unknown distribution '" + std::string(name) + "' (expected opposite|uniform)");
}

std::string_view to_string(PairDistributionKind kind) noexcept {
  return kind == PairDistributionKind::OppositeOnly ? "opposite" : "uniform";
}

PairDistribution::PairDistribution(PairDistributionKind kind, const Dataset& ds)
    : kind_(kind), n_pos_(ds.n_pos()), n_neg_(ds.n_neg()) {
  if (kind == PairDistributionKind::OppositeOnly && !ds.has_both_classes()) {
    throw ClassEmptyError("opposite-pair sampling needs at least one positive and one negative");
  }
  if (kind == PairDistributionKind::UniformPairs && ds.size() < 2) {
    throw ConfigError("uniform pair sampling needs at least two rows");
  }
}

double PairDistribution::probability(int label_i, int label_j) const noexcept {
  const auto np = static_cast<double>(n_pos_);
  const auto nn = static_cast<double>(n_neg_);
  if (kind_ == PairDistributionKind::UniformPairs) {
    const double n = np + nn;
    return 1.0 / (n * (n - 1.0));
  }
  return label_i != label_j ? 1.0 / (2.0 * np * nn) : 0.0;
}

PairDraw sample_pair(const PairDistribution& dist, Rng& rng, const Dataset& ds) {
  if (dist.kind() == PairDistributionKind::OppositeOnly) {
    const auto pos = ds.pos_idx();
    const auto neg = ds.neg_idx();
    const auto a = pos[rng.uniform_index(pos.size())];
    const auto b = neg[rng.uniform_index(neg.size())];
    return {a, b};
  }
  const std::uint64_t n = ds.size();
  const auto i = static_cast<std::uint32_t>(rng.uniform_index(n));
  auto j = static_cast<std::uint32_t>(rng.uniform_index(n - 1));
  if (j >= i) ++j;
  return {i, j};
}

double importance_weight(const PairDistribution& dist, int label_i, int label_j, Normalization target) {
  const bool opposite = label_i != label_j;
  const auto np = static_cast<double>(dist.n_pos());
  const auto nn = static_cast<double>(dist.n_neg());
  const double n = np + nn;
  if (dist.kind() == PairDistributionKind::OppositeOnly) {
    if (!opposite) throw ConfigError("importance weight: same-label pair has zero probability under opposite sampling");
    return target == Normalization::OppositeSpace ? 1.0 : 2.0 * np * nn / (n * (n - 1.0));
  }
  if (!opposite) return 0.0;
  return target == Normalization::PairSpace ? 1.0 : n * (n - 1.0) / (2.0 * np * nn);
}

SparseVector pair_stochastic_gradient(PairLoss loss, std::span<const double> w, const PairDistribution& dist,
                                      const Dataset& ds, PairDraw pair, Normalization target) {
  const int yi = ds.label(pair.i);
  const int yj = ds.label(pair.j);
  const double weight = importance_weight(dist, yi, yj, target);
  if (weight == 0.0) {
    SparseVector zero;
    zero.dim = ds.dim();
    return zero;
  }
  const auto& x_pos = yi > 0 ? ds.row(pair.i) : ds.row(pair.j);
  const auto& x_neg = yi > 0 ? ds.row(pair.j) : ds.row(pair.i);
  SparseVector g = pair_grad(loss, w, x_pos, x_neg);
  for (auto& v : g.values) v *= weight;
  return g;
}

SparseVector stochastic_gradient(PairLoss loss, std::span<const double> w, const PairDistribution& dist, Rng& rng,
                                 const Dataset& ds, Normalization target) {
  return pair_stochastic_gradient(loss, w, dist, ds, sample_pair(dist, rng, ds), target);
}

namespace {

void check_enumerable(const Dataset& ds, std::span<const double> w, std::size_t pair_cap) {
  const std::size_t n = ds.size();
  if (n * (n - 1) > pair_cap) {
    throw CapExceededError("exact enumeration of " + std::to_string(n * (n - 1)) + " ordered pairs exceeds cap " +
                           std::to_string(pair_cap) + "; use the Monte-Carlo estimator");
  }
  if (w.size() != ds.dim()) throw DimensionError("variance: model dimension differs from dataset dimension");
}

/// Calls fn(P(i,j), g_ij) for every ordered pair with P(i,j) > 0.
template <typename Fn>
void for_each_weighted_pair(PairLoss loss, std::span<const double> w, const PairDistribution& dist, const Dataset& ds,
                            Normalization target, Fn&& fn) {
  const auto n = static_cast<std::uint32_t>(ds.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double p = dist.probability(ds.label(i), ds.label(j));
      if (p == 0.0) continue;
      fn(p, pair_stochastic_gradient(loss, w, dist, ds, {i, j}, target));
    }
  }
}

}  // namespace

std::vector<double> expected_stochastic_gradient(PairLoss loss, std::span<const double> w,
                                                 const PairDistribution& dist, const Dataset& ds,
                                                 Normalization target) {
  if (w.size() != ds.dim()) throw DimensionError("expectation: model dimension differs from dataset dimension");
  std::vector<double> mean(ds.dim(), 0.0);
  for_each_weighted_pair(loss, w, dist, ds, target, [&](double p, const SparseVector& g) {
    for (std::size_t e = 0; e < g.nnz(); ++e) mean[g.indices[e]] += p * g.values[e];
  });
  return mean;
}

double variance_exact(PairLoss loss, std::span<const double> w, const PairDistribution& dist, const Dataset& ds,
                      Normalization target, std::size_t pair_cap) {
  check_enumerable(ds, w, pair_cap);
  const std::vector<double> mean = expected_stochastic_gradient(loss, w, dist, ds, target);
  double mean_sq = 0.0;
  for (double v : mean) mean_sq += v * v;

  double var = 0.0;
  for_each_weighted_pair(loss, w, dist, ds, target, [&](double p, const SparseVector& g) {
    // ||g - m||^2 = ||m||^2 + sum_{c in supp g} (g_c - m_c)^2 - m_c^2
    double dev = mean_sq;
    for (std::size_t e = 0; e < g.nnz(); ++e) {
      const double m = mean[g.indices[e]];
      const double diff = g.values[e] - m;
      dev += diff * diff - m * m;
    }
    var += p * dev;
  });
  return var < 0.0 ? 0.0 : var;
}

VarianceEstimate variance_mc(PairLoss loss, std::span<const double> w, const PairDistribution& dist,
                             const Dataset& ds, std::size_t draws, Rng& rng, Normalization target) {
  if (draws < 2) throw ConfigError("variance_mc: need at least two draws");
  if (w.size() != ds.dim()) throw DimensionError("variance_mc: model dimension differs from dataset dimension");

  const Rng replay = rng;
  std::vector<double> mean(ds.dim(), 0.0);
  for (std::size_t k = 0; k < draws; ++k) {
    const SparseVector g = stochastic_gradient(loss, w, dist, rng, ds, target);
    for (std::size_t e = 0; e < g.nnz(); ++e) mean[g.indices[e]] += g.values[e];
  }
  const auto kd = static_cast<double>(draws);
  double mean_sq = 0.0;
  for (auto& v : mean) {
    v /= kd;
    mean_sq += v * v;
  }

  Rng second = replay;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    const SparseVector g = stochastic_gradient(loss, w, dist, second, ds, target);
    double dev = mean_sq;
    for (std::size_t e = 0; e < g.nnz(); ++e) {
      const double m = mean[g.indices[e]];
      const double diff = g.values[e] - m;
      dev += diff * diff - m * m;
    }
    dev = dev < 0.0 ? 0.0 : dev;
    sum += dev;
    sum_sq += dev * dev;
  }
  const double avg = sum / kd;
  const double spread = std::max(0.0, sum_sq / kd - avg * avg) * kd / (kd - 1.0);
  const double scale = kd / (kd - 1.0);
  return {avg * scale, scale * std::sqrt(spread / kd)};
}

}  // namespace adapair
