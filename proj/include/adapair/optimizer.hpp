#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "adapair/data.hpp"
#include "adapair/pairloss.hpp"
#include "adapair/prox.hpp"
#include "adapair/rng.hpp"
#include "adapair/sampling.hpp"

namespace adapair {

// ---------------------------------------------------------------------------
// Schedules

struct ConstantStep {
  double gamma = 0.01;
};
/// γ_s = γ0 / m_s^p
struct PerStageStep {
  double gamma0 = 1.0;
  double exponent = 0.5;
};
using StepSchedule = std::variant<ConstantStep, PerStageStep>;

double step_for_stage(const StepSchedule& schedule, std::size_t stage_size);

/// T_s = m_s
struct LinearInM {};
/// T_s = ceil(c · m_s^{4/3})
struct PowerLaw {
  double c = 1.0;
};
/// T_s = T
struct FixedIters {
  std::size_t iterations = 1000;
};
using InnerSchedule = std::variant<LinearInM, PowerLaw, FixedIters>;

std::size_t iterations_for_stage(const InnerSchedule& schedule, std::size_t stage_size);

/// Parses `linear`, `n43` or `fixed:T`.
InnerSchedule parse_inner_schedule(std::string_view text);

/// Stage sizes m_1 = m0, m_{s+1} = min(ceil(β·m_s), n), ending at n.
/// Throws ConfigError unless 2 <= m0 <= n and β > 1.
std::vector<std::size_t> stage_sizes(std::size_t n, std::size_t m0, double beta);

// ---------------------------------------------------------------------------
// Configuration and trace

struct TrainConfig {
  double beta = 2.0;
  /// Initial stage size; unset means min(100, n).
  std::optional<std::size_t> m0;
  StepSchedule step = PerStageStep{};
  InnerSchedule inner = LinearInM{};
  PairLoss loss = PairLoss::Squared;
  Regularizer reg{1e-4, 1e-4};
  PairDistributionKind dist = PairDistributionKind::OppositeOnly;
  Normalization normalization = Normalization::OppositeSpace;
  /// Exponent of the statistical accuracy V_m = m^-alpha.
  double alpha = 0.5;
  /// Stage 1 budget multiplier, applied only when there is more than one stage.
  double first_stage_factor = 3.0;
  bool stratify = false;
  std::uint64_t seed = 0;

  /// Throws ConfigError on invalid values.
  void validate() const;
  std::size_t initial_size(std::size_t n) const noexcept;
};

struct StageRecord {
  std::size_t stage = 0;        ///< 1-based
  std::size_t size = 0;         ///< m_s
  std::size_t iterations = 0;   ///< T_s actually run
  double gamma = 0.0;           ///< γ_s
  double seconds = 0.0;         ///< wall time of the inner loop
  double start_objective = 0.0; ///< R_{m_s} at the warm start
  double end_objective = 0.0;   ///< R_{m_s} at the stage output
  double objective = 0.0;       ///< objective on the whole training set at the stage output
  std::optional<double> test_auc;
  std::size_t grad_evals = 0;   ///< cumulative pair-gradient evaluations
};

struct TrainTrace {
  std::vector<StageRecord> stages;

  std::size_t total_grad_evals() const noexcept { return stages.empty() ? 0 : stages.back().grad_evals; }
  double total_seconds() const noexcept;
  /// sum over every iteration of γ_t^2
  double sum_squared_steps() const noexcept;
};

/// Optional per-stage evaluation. Objectives use fast_objective.
struct TraceOptions {
  bool record_objectives = true;
  const Dataset* test = nullptr;
};

// ---------------------------------------------------------------------------
// Training

/// T iterations of: draw a pair, importance-weighted gradient, elastic-net prox
/// with step γ. Throws DivergenceError on a non-finite iterate.
std::vector<double> inner_dsgd(std::vector<double> w0, const Dataset& stage, std::size_t iterations, double gamma,
                               PairLoss loss, const Regularizer& reg, PairDistributionKind dist, Rng& rng,
                               Normalization normalization);

struct TrainResult {
  Model model;
  TrainTrace trace;
};

/// Adaptive sample size training over nested stage prefixes with warm starts.
TrainResult train_adaptive(const Dataset& ds, const TrainConfig& config, const TraceOptions& options = {});

/// Single stage on the full dataset with the same machinery; requires a
/// FixedIters inner schedule.
TrainResult train_plain(const Dataset& ds, const TrainConfig& config, const TraceOptions& options = {});

/// Rng substream used by stage s (1-based) of a run seeded with `seed`.
Rng stage_rng(std::uint64_t seed, std::size_t stage);

}  // namespace adapair
