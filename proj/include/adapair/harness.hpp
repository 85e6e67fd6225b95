#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adapair/data.hpp"
#include "adapair/optimizer.hpp"

namespace adapair {

/// Exact CSV header of train and bench result files.
inline constexpr const char* kResultHeader = "dataset,algorithm,seed,auc,objective,seconds,grad_evals,stages";

enum class Algorithm { Adaptive, Plain };
Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm) noexcept;

struct ExperimentConfig {
  std::string dataset_name;
  Dataset data;
  TrainConfig train;
  Algorithm algorithm = Algorithm::Adaptive;
  std::size_t repeats = 25;
  std::uint64_t seed = 0;  ///< run k uses seed + k for its split and its training
  std::size_t workers = 1;
  bool grid = false;
  bool scale = false;   ///< max-abs scaling fitted on each training split
  bool timing = true;   ///< false writes 0 seconds so files are byte-reproducible
  double train_fraction = 0.8;
};

struct ResultRow {
  std::string dataset;
  std::string algorithm;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double objective = 0.0;
  double seconds = 0.0;
  std::size_t grad_evals = 0;
  std::size_t stages = 0;
};

/// Stage-boundary trace line of a bench run.
struct TraceRow {
  std::string dataset;
  std::string algorithm;
  std::uint64_t seed = 0;
  StageRecord record;
  double cumulative_seconds = 0.0;
};

/// Rows of the seeds that finished plus, if some seed failed, the first error
/// in seed order. Rows are sorted by (algorithm, seed).
struct RunOutcome {
  std::string dataset;
  std::vector<ResultRow> rows;
  std::vector<TraceRow> trace;
  std::optional<std::string> failure;
  bool failure_is_config = false;
};

/// Hyperparameters chosen by the grid search.
struct GridPoint {
  double gamma0 = 1.0;
  double lambda2 = 1e-4;
  double lambda1 = 1e-4;
};

/// Candidate values swept by --grid for lambda2 and for lambda1.
std::vector<double> grid_values();
/// Candidate values of gamma0 swept by --grid.
std::vector<double> step_grid_values();

/// Trains every grid point on 90% of `train` and scores it on the other 10%
/// (carve-out seeded by `seed`); returns the point with the best validation
/// AUC, the earliest one on ties. Candidates that diverge are skipped.
GridPoint select_hyperparameters(const Dataset& train, const TrainConfig& base, Algorithm algorithm,
                                 std::uint64_t seed);

/// Per seed: split, optional scaling and grid search, train, test AUC.
RunOutcome run_train(const ExperimentConfig& config);

/// Adaptive and plain training at equal gradient budget (plain gets the
/// adaptive run's total), with per-stage traces.
RunOutcome run_bench(const ExperimentConfig& config);

/// Result rows followed by summary rows: per algorithm, one row of means and
/// one row of standard errors (algorithm suffixed ":stderr", NA for a single
/// seed), both with seed "summary". A failure appends a FAILED marker row.
std::string format_results_csv(const RunOutcome& outcome);
std::string format_trace_csv(const std::vector<TraceRow>& trace);

struct VarianceRow {
  std::size_t probe = 0;  ///< 0 is the zero model
  double var_uniform = 0.0;
  double var_opposite = 0.0;
  std::optional<double> stderr_uniform;
  std::optional<double> stderr_opposite;
};

struct VarianceConfig {
  PairLoss loss = PairLoss::Squared;
  std::size_t probes = 10;          ///< random models besides the zero model
  std::uint64_t seed = 0;
  std::optional<std::size_t> mc_draws;  ///< Monte Carlo instead of enumeration
  std::size_t pair_cap = 2000;
};

/// Gradient variance of both distributions under the pair-space target, for
/// the zero model and `probes` models w ~ N(0, I/d).
std::vector<VarianceRow> run_variance(const Dataset& ds, const VarianceConfig& config);
std::string format_variance_csv(const std::vector<VarianceRow>& rows);

struct StabilityConfig {
  std::vector<std::size_t> n_grid{100, 200, 400};
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::size_t d = 10;
  double separation = 2.0;
  double class_balance = 0.5;
  std::size_t probe_pairs = 100;
  bool identical_replacement = false;
  std::size_t workers = 1;
  TrainConfig train;  ///< loss must be hinge
};

struct StabilityRow {
  std::size_t n = 0;
  std::size_t seeds = 0;
  double measured_mean = 0.0;
  std::optional<double> measured_stderr;
  double bound_mean = 0.0;
  std::vector<double> measured;  ///< per seed
  std::vector<double> bounds;    ///< per seed
};

/// For each n and seed k: a synthetic training set drawn with seed + k, one
/// row replaced by a fresh draw from its own class, a probe set shared by
/// every n for that k, and stability_probe.
std::vector<StabilityRow> run_stability(const StabilityConfig& config);
std::string format_stability_csv(const std::vector<StabilityRow>& rows);

/// Full command-line entry point (subcommands train, bench, variance,
/// stability, gen-synth, auc). Returns the process exit code: 0 success,
/// 1 configuration error, 2 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adapair
