#include "adapair/prox.hpp"

#include <cmath>

#include "adapair/error.hpp"

namespace adapair {

void Regularizer::validate() const {
  if (!(std::isfinite(lambda2) && lambda2 >= 0.0)) throw ConfigError("regularizer: lambda2 must be finite and >= 0");
  if (!(std::isfinite(lambda1) && lambda1 >= 0.0)) throw ConfigError("regularizer: lambda1 must be finite and >= 0");
}

double reg_value(const Regularizer& reg, std::span<const double> w) noexcept {
  double sq = 0.0, l1 = 0.0;
  for (double v : w) {
    sq += v * v;
    l1 += std::abs(v);
  }
  return reg.lambda2 * sq + reg.lambda1 * l1;
}

double soft_threshold(double u, double tau) noexcept {
  const double mag = std::abs(u) - tau;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, u);
}

double prox_coordinate(double z, double gamma, const Regularizer& reg) noexcept {
  const double denom = 2.0 * gamma * reg.lambda2 + 1.0;
  return soft_threshold(z / denom, gamma * reg.lambda1 / denom);
}

namespace {
void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("prox: step size must be positive and finite");
}
}  // namespace

std::vector<double> prox_elastic_net(std::span<const double> z, double gamma, const Regularizer& reg) {
  check_gamma(gamma);
  std::vector<double> out(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) out[c] = prox_coordinate(z[c], gamma, reg);
  return out;
}

SparseVector prox_elastic_net(const SparseVector& z, double gamma, const Regularizer& reg) {
  check_gamma(gamma);
  SparseVector out;
  out.dim = z.dim;
  for (std::size_t e = 0; e < z.nnz(); ++e) {
    const double v = prox_coordinate(z.values[e], gamma, reg);
    if (v != 0.0) {
      out.indices.push_back(z.indices[e]);
      out.values.push_back(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LazyElasticNet::LazyElasticNet(std::vector<double> w0, const Regularizer& reg, double gamma)
    : w_(std::move(w0)), stamp_(w_.size(), 0), reg_(reg) {
  reg_.validate();
  set_gamma(gamma);
}

void LazyElasticNet::set_gamma(double gamma) {
  check_gamma(gamma);
  flush();
  gamma_ = gamma;
  ratio_ = 2.0 * gamma * reg_.lambda2;
  log_q_ = -std::log1p(ratio_);
  tau_ = gamma * reg_.lambda1 / (ratio_ + 1.0);
}

void LazyElasticNet::catch_up(FeatureIndex c) {
  const std::uint64_t k = now_ - stamp_[c];
  stamp_[c] = now_;
  double& w = w_[c];
  if (k == 0 || w == 0.0) return;
  if (k == 1) {
    w = soft_threshold(w / (ratio_ + 1.0), tau_);
    return;
  }
  const double kd = static_cast<double>(k);
  const double qk = std::exp(kd * log_q_);
  if (tau_ == 0.0) {
    w *= qk;
    return;
  }
  // Sum_{i<k} q^i, written to stay accurate when 2γλ2 is tiny.
  const double geometric = ratio_ == 0.0 ? kd : -std::expm1(kd * log_q_) * (1.0 + ratio_) / ratio_;
  const double mag = qk * std::abs(w) - tau_ * geometric;
  w = mag > 0.0 ? std::copysign(mag, w) : 0.0;
}

double LazyElasticNet::value(FeatureIndex c) {
  catch_up(c);
  return w_[c];
}

bool LazyElasticNet::step(const SparseVector& grad) {
  bool finite = true;
  for (std::size_t e = 0; e < grad.nnz(); ++e) {
    const FeatureIndex c = grad.indices[e];
    catch_up(c);
    const double z = w_[c] - gamma_ * grad.values[e];
    w_[c] = soft_threshold(z / (ratio_ + 1.0), tau_);
    stamp_[c] = now_ + 1;
    finite = finite && std::isfinite(w_[c]);
  }
  ++now_;
  return finite;
}

const std::vector<double>& LazyElasticNet::flush() {
  for (FeatureIndex c = 0; c < w_.size(); ++c) catch_up(c);
  return w_;
}

}  // namespace adapair
