#include "adapair/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "adapair/detail/parallel.hpp"
#include "adapair/error.hpp"
#include "adapair/metrics.hpp"
#include "adapair/sampling.hpp"
#include "adapair/theory.hpp"

namespace adapair {

Algorithm parse_algorithm(std::string_view name) {
  if (name == "adaptive") return Algorithm::Adaptive;
  if (name == "plain") return Algorithm::Plain;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected adaptive|plain)");
}

std::string_view to_string(Algorithm algorithm) noexcept {
  return algorithm == Algorithm::Adaptive ? "adaptive" : "plain";
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string num_g(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

TrainResult run_algorithm(Algorithm algorithm, const Dataset& train, const TrainConfig& config,
                          const TraceOptions& options) {
  return algorithm == Algorithm::Adaptive ? train_adaptive(train, config, options)
                                          : train_plain(train, config, options);
}

double test_auc(const Model& model, const Dataset& test) {
  return auc_rank({model.scores(test), test.labels()});
}

TrainConfig with_point(TrainConfig config, const GridPoint& p) {
  double exponent = 0.5;
  if (const auto* ps = std::get_if<PerStageStep>(&config.step)) exponent = ps->exponent;
  config.step = PerStageStep{p.gamma0, exponent};
  config.reg = Regularizer{p.lambda2, p.lambda1};
  return config;
}

struct Prepared {
  Dataset train;
  Dataset test;
};

Prepared prepare(const ExperimentConfig& config, std::uint64_t seed) {
  auto [train, test] = split(config.data, SplitSpec{config.train_fraction, seed});
  if (config.scale) {
    const auto factors = max_abs_factors(train);
    train = train.scaled(factors);
    test = test.scaled(factors);
  }
  return {std::move(train), std::move(test)};
}

void record_failure(RunOutcome& outcome, const std::vector<std::optional<JobError>>& errors) {
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (errors[k]) {
      outcome.failure = errors[k]->message;
      outcome.failure_is_config = errors[k]->config;
      return;
    }
  }
}

void sort_rows(RunOutcome& outcome) {
  std::stable_sort(outcome.rows.begin(), outcome.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.algorithm, a.seed) < std::tie(b.algorithm, b.seed);
  });
}

}  // namespace

std::vector<double> grid_values() { return {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}; }

std::vector<double> step_grid_values() { return {1e-2, 1e-1, 1.0, 10.0}; }

GridPoint select_hyperparameters(const Dataset& train, const TrainConfig& base, Algorithm algorithm,
                                 std::uint64_t seed) {
  const auto [fit, validation] = split(train, SplitSpec{0.9, mix64(seed) ^ 0x9A1DULL});
  TraceOptions quiet;
  quiet.record_objectives = false;
  std::optional<GridPoint> best;
  double best_auc = -1.0;
  for (double g : step_grid_values()) {
    for (double l2 : grid_values()) {
      for (double l1 : grid_values()) {
        const GridPoint p{g, l2, l1};
        double auc = 0.0;
        try {
          auc = test_auc(run_algorithm(algorithm, fit, with_point(base, p), quiet).model, validation);
        } catch (const DivergenceError&) {
          continue;
        }
        if (auc > best_auc) {
          best_auc = auc;
          best = p;
        }
      }
    }
  }
  if (!best) throw DivergenceError(0, "every grid point diverged; try --scale");
  return *best;
}

RunOutcome run_train(const ExperimentConfig& config) {
  if (config.repeats == 0) throw ConfigError("repeats must be >= 1");
  std::vector<std::optional<ResultRow>> slots(config.repeats);
  const auto errors = parallel_jobs(config.repeats, config.workers, [&](std::size_t k) {
    const std::uint64_t seed = config.seed + k;
    const Prepared data = prepare(config, seed);
    TrainConfig cfg = config.train;
    cfg.seed = seed;
    if (config.grid) cfg = with_point(cfg, select_hyperparameters(data.train, cfg, config.algorithm, seed));
    TraceOptions quiet;
    quiet.record_objectives = false;
    const TrainResult result = run_algorithm(config.algorithm, data.train, cfg, quiet);
    ResultRow row;
    row.dataset = config.dataset_name;
    row.algorithm = std::string(to_string(config.algorithm));
    row.seed = seed;
    row.auc = test_auc(result.model, data.test);
    row.objective = fast_objective(cfg.loss, result.model.weights, data.train, cfg.reg, cfg.normalization);
    row.seconds = config.timing ? result.trace.total_seconds() : 0.0;
    row.grad_evals = result.trace.total_grad_evals();
    row.stages = result.trace.stages.size();
    slots[k] = row;
  });
  RunOutcome outcome;
  outcome.dataset = config.dataset_name;
  for (auto& s : slots) {
    if (s) outcome.rows.push_back(std::move(*s));
  }
  record_failure(outcome, errors);
  sort_rows(outcome);
  return outcome;
}

RunOutcome run_bench(const ExperimentConfig& config) {
  if (config.repeats == 0) throw ConfigError("repeats must be >= 1");
  struct Slot {
    std::vector<ResultRow> rows;
    std::vector<TraceRow> trace;
  };
  std::vector<Slot> slots(config.repeats);
  const auto errors = parallel_jobs(config.repeats, config.workers, [&](std::size_t k) {
    const std::uint64_t seed = config.seed + k;
    const Prepared data = prepare(config, seed);
    TrainConfig adaptive = config.train;
    adaptive.seed = seed;
    TraceOptions options;
    options.test = &data.test;

    Slot slot;
    auto emit = [&](Algorithm algorithm, const TrainConfig& cfg) {
      const TrainResult result = run_algorithm(algorithm, data.train, cfg, options);
      ResultRow row;
      row.dataset = config.dataset_name;
      row.algorithm = std::string(to_string(algorithm));
      row.seed = seed;
      row.auc = test_auc(result.model, data.test);
      row.objective = result.trace.stages.back().objective;
      row.seconds = config.timing ? result.trace.total_seconds() : 0.0;
      row.grad_evals = result.trace.total_grad_evals();
      row.stages = result.trace.stages.size();
      slot.rows.push_back(row);
      double elapsed = 0.0;
      for (StageRecord r : result.trace.stages) {
        if (!config.timing) r.seconds = 0.0;
        elapsed += r.seconds;
        slot.trace.push_back(TraceRow{row.dataset, row.algorithm, seed, r, elapsed});
      }
      return row.grad_evals;
    };
    const std::size_t budget = emit(Algorithm::Adaptive, adaptive);
    TrainConfig plain = adaptive;
    plain.inner = FixedIters{budget};
    emit(Algorithm::Plain, plain);
    slots[k] = std::move(slot);
  });
  RunOutcome outcome;
  outcome.dataset = config.dataset_name;
  for (auto& s : slots) {
    for (auto& r : s.rows) outcome.rows.push_back(std::move(r));
    for (auto& t : s.trace) outcome.trace.push_back(std::move(t));
  }
  record_failure(outcome, errors);
  sort_rows(outcome);
  std::stable_sort(outcome.trace.begin(), outcome.trace.end(), [](const TraceRow& a, const TraceRow& b) {
    return std::tie(a.algorithm, a.seed, a.record.stage) < std::tie(b.algorithm, b.seed, b.record.stage);
  });
  return outcome;
}

std::string format_results_csv(const RunOutcome& outcome) {
  std::ostringstream out;
  out << kResultHeader << '\n';
  for (const auto& r : outcome.rows) {
    out << r.dataset << ',' << r.algorithm << ',' << r.seed << ',' << num(r.auc) << ',' << num_g(r.objective) << ','
        << num(r.seconds) << ',' << r.grad_evals << ',' << r.stages << '\n';
  }

  std::vector<std::string> algorithms;
  for (const auto& r : outcome.rows) {
    if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end()) {
      algorithms.push_back(r.algorithm);
    }
  }
  for (const auto& algorithm : algorithms) {
    std::vector<double> auc, obj, sec, evals, stages;
    std::string dataset;
    for (const auto& r : outcome.rows) {
      if (r.algorithm != algorithm) continue;
      dataset = r.dataset;
      auc.push_back(r.auc);
      obj.push_back(r.objective);
      sec.push_back(r.seconds);
      evals.push_back(static_cast<double>(r.grad_evals));
      stages.push_back(static_cast<double>(r.stages));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto stat = [&](const std::vector<double>& v) -> MeanStderr {
      if (v.size() < 2) return {v.front(), nan};
      return mean_stderr(v);
    };
    const MeanStderr a = stat(auc), o = stat(obj), s = stat(sec), e = stat(evals), st = stat(stages);
    out << dataset << ',' << algorithm << ",summary," << num(a.mean) << ',' << num_g(o.mean) << ',' << num(s.mean)
        << ',' << num_g(e.mean) << ',' << num_g(st.mean) << '\n';
    out << dataset << ',' << algorithm << ":stderr,summary," << num(a.stderr) << ',' << num_g(o.stderr) << ','
        << num(s.stderr) << ',' << num_g(e.stderr) << ',' << num_g(st.stderr) << '\n';
  }
  if (outcome.failure) {
    out << outcome.dataset << ",FAILED,NA,NA,NA,NA,NA,NA\n";
  }
  return out.str();
}

std::string format_trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "dataset,algorithm,seed,stage,size,iterations,gamma,seconds,cumulative_seconds,grad_evals,objective,"
         "test_auc\n";
  for (const auto& t : trace) {
    const auto& r = t.record;
    out << t.dataset << ',' << t.algorithm << ',' << t.seed << ',' << r.stage << ',' << r.size << ',' << r.iterations
        << ',' << num_g(r.gamma) << ',' << num(r.seconds) << ',' << num(t.cumulative_seconds) << ',' << r.grad_evals
        << ',' << num_g(r.objective) << ',' << (r.test_auc ? num(*r.test_auc) : std::string("NA")) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<VarianceRow> run_variance(const Dataset& ds, const VarianceConfig& config) {
  if (!ds.has_both_classes()) throw ClassEmptyError("variance: dataset lacks a class");
  if (config.mc_draws && *config.mc_draws < 2) throw ConfigError("variance: Monte Carlo needs >= 2 draws");
  const PairDistribution uniform(PairDistributionKind::UniformPairs, ds);
  const PairDistribution opposite(PairDistributionKind::OppositeOnly, ds);
  Rng model_rng(config.seed, 0x7A41);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(ds.dim(), 1)));

  std::vector<VarianceRow> rows;
  for (std::size_t p = 0; p <= config.probes; ++p) {
    std::vector<double> w(ds.dim(), 0.0);
    if (p > 0) {
      for (auto& v : w) v = scale * model_rng.normal();
    }
    VarianceRow row;
    row.probe = p;
    if (config.mc_draws) {
      Rng ru = Rng(config.seed, 0x3C0).substream(2 * p);
      Rng ro = Rng(config.seed, 0x3C0).substream(2 * p + 1);
      const auto u = variance_mc(config.loss, w, uniform, ds, *config.mc_draws, ru, Normalization::PairSpace);
      const auto o = variance_mc(config.loss, w, opposite, ds, *config.mc_draws, ro, Normalization::PairSpace);
      row.var_uniform = u.mean;
      row.var_opposite = o.mean;
      row.stderr_uniform = u.stderr;
      row.stderr_opposite = o.stderr;
    } else {
      row.var_uniform = variance_exact(config.loss, w, uniform, ds, Normalization::PairSpace, config.pair_cap);
      row.var_opposite = variance_exact(config.loss, w, opposite, ds, Normalization::PairSpace, config.pair_cap);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_variance_csv(const std::vector<VarianceRow>& rows) {
  std::ostringstream out;
  out << "probe,var_uniform,var_opposite,stderr_uniform,stderr_opposite\n";
  for (const auto& r : rows) {
    out << r.probe << ',' << num_g(r.var_uniform) << ',' << num_g(r.var_opposite) << ','
        << (r.stderr_uniform ? num_g(*r.stderr_uniform) : std::string("NA")) << ','
        << (r.stderr_opposite ? num_g(*r.stderr_opposite) : std::string("NA")) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------

std::vector<StabilityRow> run_stability(const StabilityConfig& config) {
  if (config.train.loss != PairLoss::Hinge) {
    throw ConfigError("stability: the probe needs the hinge loss (the squared loss has no global Lipschitz constant)");
  }
  if (config.repeats == 0) throw ConfigError("stability: repeats must be >= 1");
  if (config.probe_pairs == 0) throw ConfigError("stability: need at least one probe pair");
  for (std::size_t n : config.n_grid) {
    if (n < 4) throw ConfigError("stability: every n must be >= 4");
  }

  const std::size_t cells = config.n_grid.size() * config.repeats;
  std::vector<StabilityProbeResult> results(cells);
  const auto errors = parallel_jobs(cells, config.workers, [&](std::size_t job) {
    const std::size_t n = config.n_grid[job / config.repeats];
    const std::uint64_t seed = config.seed + job % config.repeats;
    const SyntheticSpec spec{n, config.d, config.separation, config.class_balance, seed};
    const Dataset ds = generate_synthetic(spec);

    Rng pick(seed, 0x57AB);
    const std::size_t replaced = pick.uniform_index(n);
    LabeledExample replacement{ds.row(replaced), ds.label(replaced)};
    // Same class as the replaced row: a label change would reshuffle every
    // opposite-pair draw and decouple the two runs.
    if (!config.identical_replacement) {
      replacement.x = draw_synthetic_example(spec, replacement.label, mix64(seed ^ 0x4E57ULL));
    }
    std::vector<std::pair<SparseVector, SparseVector>> probes;
    probes.reserve(config.probe_pairs);
    for (std::size_t p = 0; p < config.probe_pairs; ++p) {
      const std::uint64_t base = mix64(seed * 0x9E3779B97F4A7C15ULL + p);
      probes.emplace_back(draw_synthetic_example(spec, 1, base), draw_synthetic_example(spec, -1, base + 1));
    }
    TrainConfig train = config.train;
    train.seed = seed;
    results[job] = stability_probe(ds, train, replaced, replacement, probes);
  });
  for (const auto& e : errors) {
    if (e) {
      if (e->config) throw ConfigError(e->message);
      throw Error(e->message);
    }
  }

  std::vector<StabilityRow> rows;
  for (std::size_t g = 0; g < config.n_grid.size(); ++g) {
    StabilityRow row;
    row.n = config.n_grid[g];
    row.seeds = config.repeats;
    for (std::size_t k = 0; k < config.repeats; ++k) {
      row.measured.push_back(results[g * config.repeats + k].measured);
      row.bounds.push_back(results[g * config.repeats + k].bound);
    }
    double sum = 0.0, bsum = 0.0;
    for (std::size_t k = 0; k < config.repeats; ++k) {
      sum += row.measured[k];
      bsum += row.bounds[k];
    }
    row.measured_mean = sum / static_cast<double>(config.repeats);
    row.bound_mean = bsum / static_cast<double>(config.repeats);
    if (config.repeats >= 2) row.measured_stderr = mean_stderr(row.measured).stderr;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_stability_csv(const std::vector<StabilityRow>& rows) {
  std::ostringstream out;
  out << "n,seeds,measured_mean,measured_stderr,bound\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.seeds << ',' << num_g(r.measured_mean) << ','
        << (r.measured_stderr ? num_g(*r.measured_stderr) : std::string("NA")) << ',' << num_g(r.bound_mean) << '\n';
  }
  return out.str();
}

}  // namespace adapair
