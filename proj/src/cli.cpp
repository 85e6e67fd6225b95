#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "adapair/error.hpp"
#include "adapair/harness.hpp"
#include "adapair/metrics.hpp"

namespace adapair {

namespace {

struct Options {
  std::string data;
  std::size_t n = 200;
  std::size_t d = 10;
  double separation = 2.0;
  double balance = 0.5;

  std::string loss = "squared";
  std::string dist = "opposite";
  std::string normalization = "opposite";
  std::string algorithm = "adaptive";
  double beta = 2.0;
  std::optional<std::size_t> m0;
  std::string inner = "linear";
  std::optional<double> gamma;
  double gamma0 = 1.0;
  double step_exponent = 0.5;
  double lambda2 = 1e-4;
  double lambda1 = 1e-4;
  double first_stage_factor = 3.0;
  std::size_t repeats = 25;
  std::uint64_t seed = 0;
  std::uint64_t label_seed = 0;
  std::string out;
  std::string trace_out;
  std::size_t workers = 1;
  bool stratify = false;
  bool grid = false;
  bool scale = false;
  std::optional<std::size_t> subsample;
  bool no_timing = false;
  double train_fraction = 0.8;

  std::size_t probes = 10;
  std::optional<std::size_t> mc;
  std::size_t pair_cap = kDefaultVariancePairCap;

  std::vector<std::size_t> n_grid{100, 200, 400};
  std::size_t stability_repeats = 10;
  std::size_t probe_pairs = 100;
  bool identical = false;

  std::string scores;
  std::string ties = "half";
};

void add_data_options(CLI::App* app, Options& o) {
  app->add_option("--data", o.data, "LIBSVM file (omit for a synthetic dataset)");
  app->add_option("--n", o.n, "synthetic: number of rows");
  app->add_option("--d", o.d, "synthetic: dimension");
  app->add_option("--separation", o.separation, "synthetic: distance between the class means");
  app->add_option("--balance", o.balance, "synthetic: fraction of positives");
  app->add_option("--label-seed", o.label_seed, "seed of the label partition for multiclass files");
  app->add_option("--subsample", o.subsample, "keep a seeded subsample of this many rows");
}

void add_train_options(CLI::App* app, Options& o) {
  app->add_option("--loss", o.loss, "squared|hinge");
  app->add_option("--dist", o.dist, "opposite|uniform");
  app->add_option("--normalization", o.normalization, "opposite|pair");
  app->add_option("--beta", o.beta, "stage growth rate");
  app->add_option("--m0", o.m0, "initial stage size (default min(100, n))");
  app->add_option("--inner", o.inner, "linear|n43|fixed:T");
  app->add_option("--gamma", o.gamma, "constant step size (overrides --gamma0)");
  app->add_option("--gamma0", o.gamma0, "per-stage step gamma0 / m^p");
  app->add_option("--step-exponent", o.step_exponent, "p of the per-stage step");
  app->add_option("--lambda2", o.lambda2, "ridge weight");
  app->add_option("--lambda1", o.lambda1, "lasso weight");
  app->add_option("--first-stage-factor", o.first_stage_factor, "budget multiplier of stage 1");
  app->add_flag("--stratify", o.stratify, "class-stratified stage permutation");
  app->add_option("--seed", o.seed, "base seed");
  app->add_option("--workers", o.workers, "worker threads");
  app->add_option("--out", o.out, "output CSV (default stdout)");
}

void add_experiment_options(CLI::App* app, Options& o) {
  app->add_option("--repeats", o.repeats, "number of seeds");
  app->add_option("--algorithm", o.algorithm, "adaptive|plain");
  app->add_flag("--grid", o.grid, "select gamma0, lambda2, lambda1 on a validation carve-out");
  app->add_flag("--scale", o.scale, "max-abs feature scaling fitted on the training split");
  app->add_flag("--no-timing", o.no_timing, "write 0 in the seconds column");
  app->add_option("--train-fraction", o.train_fraction, "train share of each split");
}

TrainConfig make_train_config(const Options& o) {
  TrainConfig c;
  c.beta = o.beta;
  c.m0 = o.m0;
  if (o.gamma) {
    c.step = ConstantStep{*o.gamma};
  } else {
    c.step = PerStageStep{o.gamma0, o.step_exponent};
  }
  c.inner = parse_inner_schedule(o.inner);
  c.loss = parse_pair_loss(o.loss);
  c.dist = parse_distribution(o.dist);
  c.normalization = parse_normalization(o.normalization);
  c.reg = Regularizer{o.lambda2, o.lambda1};
  c.first_stage_factor = o.first_stage_factor;
  c.stratify = o.stratify;
  c.seed = o.seed;
  c.validate();
  return c;
}

std::pair<std::string, Dataset> load_data(const Options& o) {
  Dataset ds;
  std::string name;
  if (!o.data.empty()) {
    const std::filesystem::path path(o.data);
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("data file not found: " + o.data);
    ds = load_dataset(path, o.label_seed);
    name = path.stem().string();
  } else {
    ds = generate_synthetic(SyntheticSpec{o.n, o.d, o.separation, o.balance, o.seed});
    name = "synthetic";
  }
  if (o.subsample) ds = subsample(ds, *o.subsample, o.seed);
  return {name, std::move(ds)};
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file: " + path);
  file << text;
  if (!file) throw Error("failed writing " + path);
}

ExperimentConfig make_experiment(const Options& o) {
  if (o.repeats == 0) throw ConfigError("--repeats must be >= 1");
  if (o.workers == 0) throw ConfigError("--workers must be >= 1");
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) throw ConfigError("--train-fraction must lie in (0, 1)");
  ExperimentConfig e;
  auto [name, ds] = load_data(o);
  e.dataset_name = std::move(name);
  e.data = std::move(ds);
  e.train = make_train_config(o);
  e.algorithm = parse_algorithm(o.algorithm);
  e.repeats = o.repeats;
  e.seed = o.seed;
  e.workers = o.workers;
  e.grid = o.grid;
  e.scale = o.scale;
  e.timing = !o.no_timing;
  e.train_fraction = o.train_fraction;
  return e;
}

int finish(const RunOutcome& outcome, std::ostream& err) {
  if (!outcome.failure) return 0;
  err << "error: " << *outcome.failure << '\n';
  return outcome.failure_is_config ? 1 : 2;
}

std::vector<std::pair<int, double>> read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scores file: " + path);
  std::vector<std::pair<int, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    double label = 0.0;
    double score = 0.0;
    if (!(fields >> label >> score) || (label != 1.0 && label != -1.0)) {
      throw ParseError(line_no, "expected '<+1|-1> <score>'");
    }
    rows.emplace_back(static_cast<int>(label), score);
  }
  return rows;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive sample size pairwise learning"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "multi-seed train/test AUC runs");
  add_data_options(train, o);
  add_train_options(train, o);
  add_experiment_options(train, o);

  auto* bench = app.add_subcommand("bench", "adaptive vs plain at equal gradient budget, with stage traces");
  add_data_options(bench, o);
  add_train_options(bench, o);
  add_experiment_options(bench, o);
  bench->add_option("--trace-out", o.trace_out, "per-stage trace CSV");

  auto* variance = app.add_subcommand("variance", "gradient variance of uniform vs opposite-pair sampling");
  add_data_options(variance, o);
  variance->add_option("--loss", o.loss, "squared|hinge");
  variance->add_option("--probes", o.probes, "random models besides the zero model");
  variance->add_option("--mc", o.mc, "Monte Carlo draws instead of exact enumeration");
  variance->add_option("--pair-cap", o.pair_cap, "largest n(n-1) enumerated exactly");
  variance->add_option("--seed", o.seed, "seed");
  variance->add_option("--out", o.out, "output CSV (default stdout)");

  auto* stability = app.add_subcommand("stability", "replace-one stability probe over a grid of n");
  add_train_options(stability, o);
  stability->add_option("--n-grid", o.n_grid, "training set sizes")->delimiter(',');
  stability->add_option("--repeats", o.stability_repeats, "seeds per n");
  stability->add_option("--d", o.d, "dimension");
  stability->add_option("--separation", o.separation, "distance between the class means");
  stability->add_option("--balance", o.balance, "fraction of positives");
  stability->add_option("--probe-pairs", o.probe_pairs, "fresh (positive, negative) pairs scored");
  stability->add_flag("--identical", o.identical, "replace the row by itself");

  auto* gen = app.add_subcommand("gen-synth", "write a synthetic dataset as LIBSVM text");
  gen->add_option("--n", o.n, "rows");
  gen->add_option("--d", o.d, "dimension");
  gen->add_option("--separation", o.separation, "distance between the class means");
  gen->add_option("--balance", o.balance, "fraction of positives");
  gen->add_option("--seed", o.seed, "seed");
  gen->add_option("--out", o.out, "output file (default stdout)");

  auto* auc = app.add_subcommand("auc", "AUC of '<label> <score>' lines");
  auc->add_option("--scores", o.scores, "scores file")->required();
  auc->add_option("--ties", o.ties, "half|strict");

  std::string config_file;
  for (auto* sub : {train, bench, variance, stability, gen}) {
    sub->add_option("--config", config_file, "key=value file using the long option names; flags win");
  }

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    if (!config_file.empty()) {
      // Re-parse with the file's settings appended for every option not given on the command line.
      std::vector<std::string> merged = args;
      for (const auto& item : CLI::ConfigINI().from_file(config_file)) {
        const std::string flag = "--" + item.name;
        if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
        const bool has_eq = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
          return a.rfind(flag + "=", 0) == 0;
        });
        if (has_eq) continue;
        if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
          if (item.inputs[0] == "true") merged.push_back(flag);
          continue;
        }
        merged.push_back(flag);
        for (const auto& v : item.inputs) merged.push_back(v);
      }
      o = Options{};
      app.clear();
      app.parse(std::vector<std::string>(merged.rbegin(), merged.rend()));
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (train->parsed()) {
      const RunOutcome outcome = run_train(make_experiment(o));
      write_output(o.out, format_results_csv(outcome), out);
      return finish(outcome, err);
    }
    if (bench->parsed()) {
      ExperimentConfig e = make_experiment(o);
      if (e.grid) throw ConfigError("bench does not support --grid");
      const RunOutcome outcome = run_bench(e);
      write_output(o.out, format_results_csv(outcome), out);
      if (!o.trace_out.empty()) write_output(o.trace_out, format_trace_csv(outcome.trace), out);
      return finish(outcome, err);
    }
    if (variance->parsed()) {
      VarianceConfig v;
      v.loss = parse_pair_loss(o.loss);
      v.probes = o.probes;
      v.seed = o.seed;
      v.mc_draws = o.mc;
      v.pair_cap = o.pair_cap;
      const auto [name, ds] = load_data(o);
      write_output(o.out, format_variance_csv(run_variance(ds, v)), out);
      return 0;
    }
    if (stability->parsed()) {
      if (stability->count("--loss") == 0) o.loss = "hinge";
      StabilityConfig s;
      s.train = make_train_config(o);
      s.n_grid = o.n_grid;
      s.repeats = o.stability_repeats;
      s.seed = o.seed;
      s.d = o.d;
      s.separation = o.separation;
      s.class_balance = o.balance;
      s.probe_pairs = o.probe_pairs;
      s.identical_replacement = o.identical;
      s.workers = o.workers;
      write_output(o.out, format_stability_csv(run_stability(s)), out);
      return 0;
    }
    if (gen->parsed()) {
      const Dataset ds = generate_synthetic(SyntheticSpec{o.n, o.d, o.separation, o.balance, o.seed});
      write_output(o.out, serialize_libsvm(ds), out);
      return 0;
    }
    if (auc->parsed()) {
      ScoredSet ss;
      for (const auto& [label, score] : read_scores(o.scores)) {
        ss.labels.push_back(label);
        ss.scores.push_back(score);
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.12g", auc_rank(ss, parse_ties_policy(o.ties)));
      out << buf << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace adapair
