#include "adapair/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "adapair/error.hpp"
#include "adapair/metrics.hpp"

namespace adapair {

double step_for_stage(const StepSchedule& schedule, std::size_t stage_size) {
  if (const auto* c = std::get_if<ConstantStep>(&schedule)) return c->gamma;
  const auto& p = std::get<PerStageStep>(schedule);
  return p.gamma0 / std::pow(static_cast<double>(stage_size), p.exponent);
}

std::size_t iterations_for_stage(const InnerSchedule& schedule, std::size_t stage_size) {
  if (std::holds_alternative<LinearInM>(schedule)) return stage_size;
  if (const auto* p = std::get_if<PowerLaw>(&schedule)) {
    const double t = std::ceil(p->c * std::pow(static_cast<double>(stage_size), 4.0 / 3.0));
    return std::max<std::size_t>(1, static_cast<std::size_t>(t));
  }
  return std::get<FixedIters>(schedule).iterations;
}

InnerSchedule parse_inner_schedule(std::string_view text) {
  if (text == "linear") return LinearInM{};
  if (text == "n43") return PowerLaw{};
  if (text.starts_with("fixed:")) {
    const std::string count(text.substr(6));
    std::size_t used = 0;
    unsigned long long t = 0;
    try {
      t = std::stoull(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != count.size() || t == 0) throw ConfigError("inner schedule: fixed:T needs a positive integer T");
    return FixedIters{static_cast<std::size_t>(t)};
  }
  throw ConfigError("unknown inner schedule '" + std::string(text) + "' (expected linear|n43|fixed:T)");
}

std::vector<std::size_t> stage_sizes(std::size_t n, std::size_t m0, double beta) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw ConfigError("stage sizes: growth rate beta must be > 1");
  if (m0 < 2) throw ConfigError("stage sizes: initial sample size m0 must be >= 2");
  if (m0 > n) throw ConfigError("stage sizes: m0 = " + std::to_string(m0) + " exceeds n = " + std::to_string(n));
  std::vector<std::size_t> sizes{m0};
  while (sizes.back() < n) {
    const double next = std::ceil(beta * static_cast<double>(sizes.back()));
    sizes.push_back(next >= static_cast<double>(n) ? n : static_cast<std::size_t>(next));
  }
  return sizes;
}

// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw ConfigError("config: beta must be > 1");
  if (m0 && *m0 < 2) throw ConfigError("config: m0 must be >= 2");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw ConfigError("config: alpha must lie in [0, 0.5]");
  if (!(first_stage_factor >= 1.0) || !std::isfinite(first_stage_factor)) {
    throw ConfigError("config: first stage factor must be >= 1");
  }
  reg.validate();
  if (const auto* c = std::get_if<ConstantStep>(&step)) {
    if (!(c->gamma > 0.0) || !std::isfinite(c->gamma)) throw ConfigError("config: step size must be > 0");
  } else {
    const auto& p = std::get<PerStageStep>(step);
    if (!(p.gamma0 > 0.0) || !std::isfinite(p.gamma0)) throw ConfigError("config: gamma0 must be > 0");
    if (!std::isfinite(p.exponent)) throw ConfigError("config: step exponent must be finite");
  }
  if (const auto* f = std::get_if<FixedIters>(&inner); f && f->iterations == 0) {
    throw ConfigError("config: fixed inner iterations must be >= 1");
  }
  if (const auto* p = std::get_if<PowerLaw>(&inner); p && !(p->c > 0.0)) {
    throw ConfigError("config: power-law constant must be > 0");
  }
}

std::size_t TrainConfig::initial_size(std::size_t n) const noexcept {
  return m0 ? *m0 : std::min<std::size_t>(100, n);
}

double TrainTrace::total_seconds() const noexcept {
  double s = 0.0;
  for (const auto& r : stages) s += r.seconds;
  return s;
}

double TrainTrace::sum_squared_steps() const noexcept {
  double s = 0.0;
  for (const auto& r : stages) s += static_cast<double>(r.iterations) * r.gamma * r.gamma;
  return s;
}

Rng stage_rng(std::uint64_t seed, std::size_t stage) { return Rng(seed, 0xD5600000ULL).substream(stage); }

// ---------------------------------------------------------------------------

std::vector<double> inner_dsgd(std::vector<double> w0, const Dataset& stage, std::size_t iterations, double gamma,
                               PairLoss loss, const Regularizer& reg, PairDistributionKind dist_kind, Rng& rng,
                               Normalization normalization) {
  if (iterations == 0) throw ConfigError("inner loop: iteration count must be >= 1");
  if (w0.size() != stage.dim()) throw DimensionError("inner loop: model dimension differs from dataset dimension");
  if (!stage.has_both_classes()) throw ClassEmptyError("inner loop: stage subset lacks a class");
  const PairDistribution dist(dist_kind, stage);

  LazyElasticNet weights(std::move(w0), reg, gamma);
  SparseVector delta;
  SparseVector empty;
  empty.dim = stage.dim();
  for (std::size_t t = 0; t < iterations; ++t) {
    const PairDraw draw = sample_pair(dist, rng, stage);
    const int yi = stage.label(draw.i);
    const int yj = stage.label(draw.j);
    const double weight = importance_weight(dist, yi, yj, normalization);
    bool finite = true;
    if (weight == 0.0) {
      finite = weights.step(empty);
    } else {
      const auto& x_pos = yi > 0 ? stage.row(draw.i) : stage.row(draw.j);
      const auto& x_neg = yi > 0 ? stage.row(draw.j) : stage.row(draw.i);
      difference_into(x_pos, x_neg, delta);
      double margin = 0.0;
      for (std::size_t e = 0; e < delta.nnz(); ++e) margin += weights.value(delta.indices[e]) * delta.values[e];
      const double slope = weight * loss_slope(loss, margin);
      if (slope == 0.0) {
        finite = weights.step(empty);
      } else {
        for (auto& v : delta.values) v *= slope;
        finite = weights.step(delta);
      }
    }
    if (!finite) {
      throw DivergenceError(t + 1, "non-finite iterate at iteration " + std::to_string(t + 1) + " with step size " +
                                       std::to_string(gamma) + "; try a smaller step size");
    }
  }
  std::vector<double> out = weights.flush();
  for (double v : out) {
    if (!std::isfinite(v)) throw DivergenceError(iterations, "non-finite iterate after the inner loop");
  }
  return out;
}

namespace {

double objective_or_nan(const TrainConfig& config, std::span<const double> w, const Dataset& ds, bool enabled) {
  if (!enabled) return std::numeric_limits<double>::quiet_NaN();
  return fast_objective(config.loss, w, ds, config.reg, config.normalization);
}

}  // namespace

TrainResult train_adaptive(const Dataset& ds, const TrainConfig& config, const TraceOptions& options) {
  config.validate();
  if (!ds.has_both_classes()) throw ClassEmptyError("training set lacks a class");
  const std::size_t n = ds.size();
  const std::vector<std::size_t> sizes = stage_sizes(n, config.initial_size(n), config.beta);
  const StagePermutation permutation(ds, config.seed, config.stratify);

  TrainResult result;
  std::vector<double> w(ds.dim(), 0.0);
  std::size_t grad_evals = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const Dataset stage = permutation.prefix(sizes[s]);
    const double gamma = step_for_stage(config.step, sizes[s]);
    std::size_t iterations = iterations_for_stage(config.inner, sizes[s]);
    if (s == 0 && sizes.size() > 1) {
      iterations = static_cast<std::size_t>(std::ceil(config.first_stage_factor * static_cast<double>(iterations)));
    }

    StageRecord record;
    record.stage = s + 1;
    record.size = sizes[s];
    record.iterations = iterations;
    record.gamma = gamma;
    record.start_objective = objective_or_nan(config, w, stage, options.record_objectives);

    Rng rng = stage_rng(config.seed, s + 1);
    const auto start = std::chrono::steady_clock::now();
    w = inner_dsgd(std::move(w), stage, iterations, gamma, config.loss, config.reg, config.dist, rng,
                   config.normalization);
    record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    grad_evals += iterations;
    record.grad_evals = grad_evals;
    record.end_objective = objective_or_nan(config, w, stage, options.record_objectives);
    record.objective = objective_or_nan(config, w, ds, options.record_objectives);
    if (options.test != nullptr) {
      const Model current{w};
      record.test_auc = auc_rank({current.scores(*options.test), options.test->labels()});
    }
    result.trace.stages.push_back(record);
  }
  result.model.weights = std::move(w);
  return result;
}

TrainResult train_plain(const Dataset& ds, const TrainConfig& config, const TraceOptions& options) {
  if (!std::holds_alternative<FixedIters>(config.inner)) {
    throw ConfigError("plain training needs a fixed inner iteration count (fixed:T)");
  }
  TrainConfig single = config;
  single.m0 = ds.size();
  return train_adaptive(ds, single, options);
}

}  // namespace adapair
