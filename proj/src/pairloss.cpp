#include "adapair/pairloss.hpp"

#include <algorithm>
#include <string>

#include "adapair/error.hpp"

namespace adapair {

PairLoss parse_pair_loss(std::string_view name) {
  if (name == "squared") return PairLoss::Squared;
  if (name == "hinge") return PairLoss::Hinge;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected squared|hinge)");
}

std::string_view to_string(PairLoss loss) noexcept {
  return loss == PairLoss::Squared ? "squared" : "hinge";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "opposite") return Normalization::OppositeSpace;
  if (name == "pair") return Normalization::PairSpace;
  throw ConfigError("unknown normalization '" + std::string(name) + "' (expected opposite|pair)");
}

std::string_view to_string(Normalization norm) noexcept {
  return norm == Normalization::OppositeSpace ? "opposite" : "pair";
}

std::vector<double> Model::scores(const Dataset& ds) const {
  if (ds.dim() > weights.size()) throw DimensionError("model: dataset dimension exceeds model dimension");
  std::vector<double> out(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) out[k] = ds.row(k).dot(weights);
  return out;
}

std::size_t Model::support_size() const noexcept {
  return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double v) { return v != 0.0; }));
}

double loss_from_margin(PairLoss loss, double margin) noexcept {
  const double r = 1.0 - margin;
  if (loss == PairLoss::Squared) return r * r;
  return r > 0.0 ? r : 0.0;
}

double loss_slope(PairLoss loss, double margin) noexcept {
  if (loss == PairLoss::Squared) return -2.0 * (1.0 - margin);
  return margin < 1.0 ? -1.0 : 0.0;
}

namespace {
void check_dims(std::span<const double> w, const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim || a.dim != w.size()) throw DimensionError("pair loss: dimension mismatch");
}
}  // namespace

double pair_margin(std::span<const double> w, const SparseVector& x_pos, const SparseVector& x_neg) {
  check_dims(w, x_pos, x_neg);
  return x_pos.dot(w) - x_neg.dot(w);
}

double pair_loss(PairLoss loss, std::span<const double> w, const SparseVector& x_pos, const SparseVector& x_neg) {
  return loss_from_margin(loss, pair_margin(w, x_pos, x_neg));
}

SparseVector pair_grad(PairLoss loss, std::span<const double> w, const SparseVector& x_pos,
                       const SparseVector& x_neg) {
  check_dims(w, x_pos, x_neg);
  SparseVector delta = difference(x_pos, x_neg);
  const double slope = loss_slope(loss, delta.dot(w));
  if (slope == 0.0) {
    delta.indices.clear();
    delta.values.clear();
    return delta;
  }
  for (auto& v : delta.values) v *= slope;
  return delta;
}

double normalization_factor(Normalization norm, std::size_t n_pos, std::size_t n_neg) noexcept {
  const auto np = static_cast<double>(n_pos);
  const auto nn = static_cast<double>(n_neg);
  if (norm == Normalization::OppositeSpace) return 1.0 / (np * nn);
  const double n = np + nn;
  return 2.0 / (n * (n - 1.0));
}

namespace {
void require_both_classes(const Dataset& ds, std::span<const double> w) {
  if (!ds.has_both_classes()) throw ClassEmptyError("objective: dataset lacks a class");
  if (w.size() != ds.dim()) throw DimensionError("objective: model dimension differs from dataset dimension");
}
}  // namespace

double full_objective(PairLoss loss, std::span<const double> w, const Dataset& ds, const Regularizer& reg,
                      Normalization norm) {
  require_both_classes(ds, w);
  double sum = 0.0;
  for (auto i : ds.pos_idx()) {
    for (auto j : ds.neg_idx()) sum += pair_loss(loss, w, ds.row(i), ds.row(j));
  }
  return sum * normalization_factor(norm, ds.n_pos(), ds.n_neg()) + reg_value(reg, w);
}

std::vector<double> full_gradient(PairLoss loss, std::span<const double> w, const Dataset& ds, Normalization norm) {
  require_both_classes(ds, w);
  std::vector<double> acc(ds.dim(), 0.0);
  for (auto i : ds.pos_idx()) {
    for (auto j : ds.neg_idx()) {
      const SparseVector g = pair_grad(loss, w, ds.row(i), ds.row(j));
      for (std::size_t e = 0; e < g.nnz(); ++e) acc[g.indices[e]] += g.values[e];
    }
  }
  const double factor = normalization_factor(norm, ds.n_pos(), ds.n_neg());
  for (auto& v : acc) v *= factor;
  return acc;
}

double fast_objective(PairLoss loss, std::span<const double> w, const Dataset& ds, const Regularizer& reg,
                      Normalization norm) {
  require_both_classes(ds, w);
  std::vector<double> pos_scores, neg_scores;
  pos_scores.reserve(ds.n_pos());
  neg_scores.reserve(ds.n_neg());
  for (auto i : ds.pos_idx()) pos_scores.push_back(ds.row(i).dot(w));
  for (auto j : ds.neg_idx()) neg_scores.push_back(ds.row(j).dot(w));
  const auto np = static_cast<double>(pos_scores.size());
  const auto nn = static_cast<double>(neg_scores.size());

  double sum = 0.0;
  if (loss == PairLoss::Squared) {
    // sum_ij (a_i + b_j)^2 with a_i = 1 - s_i, b_j = s_j.
    double sa = 0.0, saa = 0.0, sb = 0.0, sbb = 0.0;
    for (double s : pos_scores) {
      const double a = 1.0 - s;
      sa += a;
      saa += a * a;
    }
    for (double b : neg_scores) {
      sb += b;
      sbb += b * b;
    }
    sum = nn * saa + 2.0 * sa * sb + np * sbb;
  } else {
    // For positive i only negatives with s_j > s_i - 1 contribute 1 - s_i + s_j.
    std::sort(neg_scores.begin(), neg_scores.end());
    std::vector<double> suffix(neg_scores.size() + 1, 0.0);
    for (std::size_t k = neg_scores.size(); k-- > 0;) suffix[k] = suffix[k + 1] + neg_scores[k];
    for (double s : pos_scores) {
      const auto first = std::upper_bound(neg_scores.begin(), neg_scores.end(), s - 1.0);
      const auto k = static_cast<std::size_t>(first - neg_scores.begin());
      const auto count = static_cast<double>(neg_scores.size() - k);
      sum += (1.0 - s) * count + suffix[k];
    }
  }
  return sum * normalization_factor(norm, ds.n_pos(), ds.n_neg()) + reg_value(reg, w);
}

}  // namespace adapair
