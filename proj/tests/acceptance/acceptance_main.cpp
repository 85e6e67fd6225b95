// Acceptance run: one PASS/FAIL line per criterion. `--criterion k` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "adapair/error.hpp"
#include "adapair/harness.hpp"
#include "adapair/metrics.hpp"
#include "adapair/optimizer.hpp"
#include "adapair/pairloss.hpp"
#include "adapair/prox.hpp"
#include "adapair/sampling.hpp"
#include "adapair/theory.hpp"
#include "oracles.hpp"

using namespace adapair;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

fs::path data_dir() { return fs::path(ADAPAIR_SOURCE_DIR) / "data"; }

fs::path artifact_dir;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// 1, 2: held-out AUC over 25 splits with grid-selected hyperparameters.

Outcome table_run(const std::string& name, double min_auc, std::optional<double> target, double window) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.dataset_name = name;
  c.data = load_dataset(data_dir() / name, 0);
  c.repeats = 25;
  c.seed = 0;
  c.grid = true;
  c.scale = true;
  const RunOutcome out = run_train(c);
  if (out.failure) return {false, "run failed: " + *out.failure};
  std::vector<double> aucs;
  for (const auto& r : out.rows) aucs.push_back(r.auc);
  const auto ms = mean_stderr(aucs);
  bool pass = aucs.size() == 25 && ms.mean >= min_auc;
  if (target) pass = pass && std::abs(ms.mean - *target) <= window;
  std::string detail = fmt("mean AUC %.4f +- %.4f over %zu seeds (need >= %.2f", ms.mean, ms.stderr, aucs.size(),
                           min_auc);
  if (target) detail += fmt(" and within %.2f of %.4f", window, *target);
  detail += fmt("), %.1f s", seconds_since(start));
  return {pass, detail};
}

Outcome criterion_diabetes() { return table_run("diabetes", 0.80, 0.8284, 0.03); }
Outcome criterion_a9a() { return table_run("a9a", 0.88, std::nullopt, 0.0); }

// ---------------------------------------------------------------------------
// 3, 4: sampling fixtures.

struct Fixture {
  Dataset ds;
  std::vector<std::vector<double>> models;
};

std::vector<Fixture> sampling_fixtures() {
  std::mt19937_64 gen(20240);
  std::uniform_int_distribution<std::size_t> size(3, 30), dim(1, 6);
  std::vector<Fixture> out;
  for (int k = 0; k < 50; ++k) {
    Fixture f;
    const std::size_t d = dim(gen);
    f.ds = oracle::random_dataset(gen, size(gen), d);
    for (int m = 0; m < 5; ++m) f.models.push_back(oracle::random_vector(gen, d, 1.0));
    out.push_back(std::move(f));
  }
  return out;
}

// Full gradient straight from the definition, one ordering of each opposite pair.
std::vector<double> oracle_full_gradient(PairLoss loss, const std::vector<double>& w, const Dataset& ds,
                                         Normalization norm) {
  const std::size_t d = ds.dim();
  std::vector<double> g(d, 0.0);
  for (auto i : ds.pos_idx()) {
    for (auto j : ds.neg_idx()) {
      const auto a = oracle::dense(ds.row(i), d), b = oracle::dense(ds.row(j), d);
      std::vector<double> delta(d);
      for (std::size_t c = 0; c < d; ++c) delta[c] = a[c] - b[c];
      const double m = oracle::dot(w, delta);
      const double slope = loss == PairLoss::Squared ? -2.0 * (1.0 - m) : (m < 1.0 ? -1.0 : 0.0);
      for (std::size_t c = 0; c < d; ++c) g[c] += slope * delta[c];
    }
  }
  const double np = double(ds.n_pos()), nn = double(ds.n_neg()), n = np + nn;
  const double scale = norm == Normalization::OppositeSpace ? 1.0 / (np * nn) : 2.0 / (n * (n - 1.0));
  for (double& v : g) v *= scale;
  return g;
}

double norm2(const std::vector<double>& v) { return std::sqrt(oracle::dot(v, v)); }

Outcome criterion_unbiased() {
  double worst = 0.0;
  std::size_t cases = 0;
  bool pass = true;
  for (const auto& f : sampling_fixtures()) {
    const std::size_t n = f.ds.size(), d = f.ds.dim();
    for (const auto& w : f.models) {
      for (auto loss : {PairLoss::Squared, PairLoss::Hinge}) {
        for (auto kind : {PairDistributionKind::OppositeOnly, PairDistributionKind::UniformPairs}) {
          for (auto norm : {Normalization::OppositeSpace, Normalization::PairSpace}) {
            const PairDistribution dist(kind, f.ds);
            const double np = double(f.ds.n_pos()), nn = double(f.ds.n_neg()), nd = double(n);
            std::vector<double> expect(d, 0.0);
            for (std::uint32_t i = 0; i < n; ++i) {
              for (std::uint32_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const bool opposite = f.ds.label(i) != f.ds.label(j);
                const double p = kind == PairDistributionKind::UniformPairs ? 1.0 / (nd * (nd - 1.0))
                                 : opposite                                 ? 1.0 / (2.0 * np * nn)
                                                                            : 0.0;
                if (p == 0.0) continue;
                const auto g = oracle::dense(pair_stochastic_gradient(loss, w, dist, f.ds, {i, j}, norm), d);
                for (std::size_t c = 0; c < d; ++c) expect[c] += p * g[c];
              }
            }
            const auto lib = full_gradient(loss, w, f.ds, norm);
            const auto ref = oracle_full_gradient(loss, w, f.ds, norm);
            const double scale = norm2(ref);
            std::vector<double> diff_lib(d), diff_ref(d);
            for (std::size_t c = 0; c < d; ++c) {
              diff_lib[c] = expect[c] - lib[c];
              diff_ref[c] = expect[c] - ref[c];
            }
            ++cases;
            if (scale == 0.0) {
              pass = pass && norm2(expect) <= 1e-300;
              continue;
            }
            const double rel = std::max(norm2(diff_lib), norm2(diff_ref)) / scale;
            worst = std::max(worst, rel);
            if (!(rel <= 1e-12)) pass = false;
          }
        }
      }
    }
  }
  return {pass, fmt("%zu (dataset, model, loss, distribution, normalization) cases, worst relative error %.2e", cases,
                    worst)};
}

Outcome criterion_variance() {
  nlohmann::json counterexamples = nlohmann::json::array();
  std::size_t eligible = 0, skipped = 0;
  double worst_ratio = 0.0;
  for (const auto& f : sampling_fixtures()) {
    const std::size_t n = f.ds.size();
    const bool has_same = f.ds.n_pos() >= 2 || f.ds.n_neg() >= 2;
    for (const auto& w : f.models) {
      const auto grad = full_gradient(PairLoss::Squared, w, f.ds, Normalization::OppositeSpace);
      if (!has_same || norm2(grad) == 0.0) {
        ++skipped;
        continue;
      }
      for (auto norm : {Normalization::OppositeSpace, Normalization::PairSpace}) {
        ++eligible;
        const PairDistribution opp(PairDistributionKind::OppositeOnly, f.ds);
        const PairDistribution uni(PairDistributionKind::UniformPairs, f.ds);
        const double v_opp = variance_exact(PairLoss::Squared, w, opp, f.ds, norm);
        const double v_uni = variance_exact(PairLoss::Squared, w, uni, f.ds, norm);
        worst_ratio = std::max(worst_ratio, v_opp / v_uni);
        if (!(v_opp < v_uni)) {
          nlohmann::json ex;
          ex["libsvm"] = serialize_libsvm(f.ds);
          ex["w"] = w;
          ex["normalization"] = std::string(to_string(norm));
          ex["var_opposite"] = v_opp;
          ex["var_uniform"] = v_uni;
          ex["n"] = n;
          counterexamples.push_back(ex);
        }
      }
    }
  }
  std::string detail = fmt("%zu eligible cases (%zu models skipped), largest Var_opp/Var_uni %.4f", eligible, skipped,
                           worst_ratio);
  if (!counterexamples.empty()) {
    const fs::path file = artifact_dir / "variance_counterexamples.json";
    std::ofstream(file) << counterexamples.dump(2) << '\n';
    detail += fmt(", %zu counterexamples written to ", counterexamples.size()) + file.string();
  }
  return {counterexamples.empty() && eligible > 0, detail};
}

// ---------------------------------------------------------------------------
// 5: prox.

Outcome criterion_prox() {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> zd(-10, 10), gd(1e-3, 3), ld(0, 5);
  double worst_value = 0.0, worst_kkt = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    const double z = zd(gen), gamma = gd(gen);
    const Regularizer r{ld(gen), ld(gen)};
    const double w = prox_elastic_net(std::vector<double>{z}, gamma, r)[0];
    const auto objective = [&](double x) {
      return (x - z) * (x - z) / (2.0 * gamma) + r.lambda2 * x * x + r.lambda1 * std::abs(x);
    };
    const double ref = oracle::golden_min(objective, -std::abs(z) - 1.0, std::abs(z) + 1.0, 1e-13);
    worst_value = std::max(worst_value, std::abs(w - ref));
    const double smooth = (w - z) / gamma + 2.0 * r.lambda2 * w;
    const double kkt = w != 0.0 ? std::abs(smooth + r.lambda1 * (w > 0 ? 1.0 : -1.0))
                                : std::max(0.0, std::abs(smooth) - r.lambda1);
    worst_kkt = std::max(worst_kkt, kkt);
  }
  return {worst_value <= 1e-6 && worst_kkt <= 1e-8,
          fmt("10000 triples, max |prox - golden section| %.2e, max optimality violation %.2e", worst_value,
              worst_kkt)};
}

// ---------------------------------------------------------------------------
// 6: AUC.

Outcome criterion_auc() {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> size(2, 300), level(0, 6), coin(0, 1);
  std::normal_distribution<double> normal;
  std::size_t tied = 0;
  double worst = 0.0, worst_count = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const bool with_ties = rep % 4 == 0;
    ScoredSet ss;
    const int n = size(gen);
    for (int k = 0; k < n; ++k) {
      ss.scores.push_back(with_ties ? double(level(gen)) : normal(gen));
      ss.labels.push_back(coin(gen) ? 1 : -1);
    }
    ss.labels[0] = 1;
    ss.labels[1] = -1;
    std::vector<double> sorted = ss.scores;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) ++tied;
    const double rank = auc_rank(ss, TiesPolicy::Half);
    worst = std::max(worst, std::abs(rank - auc_bruteforce(ss, TiesPolicy::Half)));
    long twice = 0, pairs = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (ss.labels[i] != 1 || ss.labels[j] != -1) continue;
        ++pairs;
        twice += ss.scores[i] > ss.scores[j] ? 2 : ss.scores[i] == ss.scores[j] ? 1 : 0;
      }
    }
    worst_count = std::max(worst_count, std::abs(rank - double(twice) / (2.0 * double(pairs))));
  }
  return {worst <= 1e-12 && worst_count <= 1e-12 && tied >= 200,
          fmt("1000 sets, %zu with tied scores, max |rank - bruteforce| %.2e, max |rank - count| %.2e", tied, worst,
              worst_count)};
}

// ---------------------------------------------------------------------------
// 7: convergence shape.

// F(w) = 1 - 2 w.b + w'Mw + λ2|w|^2 for the squared pair loss averaged over
// opposite pairs, from class means and second moments.
struct Quadratic {
  std::size_t d = 0;
  std::vector<double> M, b;
  double lambda2 = 0.0;

  explicit Quadratic(const Dataset& ds, double l2) : d(ds.dim()), M(d * d, 0.0), b(d, 0.0), lambda2(l2) {
    std::vector<double> mp(d, 0.0), mn(d, 0.0), sp(d * d, 0.0), sn(d * d, 0.0);
    const auto accumulate = [&](std::span<const std::uint32_t> idx, std::vector<double>& m, std::vector<double>& s) {
      for (auto i : idx) {
        const auto x = oracle::dense(ds.row(i), d);
        for (std::size_t a = 0; a < d; ++a) {
          m[a] += x[a] / double(idx.size());
          for (std::size_t c = 0; c < d; ++c) s[a * d + c] += x[a] * x[c] / double(idx.size());
        }
      }
    };
    accumulate(ds.pos_idx(), mp, sp);
    accumulate(ds.neg_idx(), mn, sn);
    for (std::size_t a = 0; a < d; ++a) {
      b[a] = mp[a] - mn[a];
      for (std::size_t c = 0; c < d; ++c) M[a * d + c] = sp[a * d + c] + sn[a * d + c] - mp[a] * mn[c] - mn[a] * mp[c];
    }
  }

  double value(const std::vector<double>& w) const {
    double f = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      f += -2.0 * w[a] * b[a] + lambda2 * w[a] * w[a];
      for (std::size_t c = 0; c < d; ++c) f += w[a] * M[a * d + c] * w[c];
    }
    return f;
  }

  // Gradient of the loss part only.
  std::vector<double> smooth_gradient(const std::vector<double>& w) const {
    std::vector<double> g(d);
    for (std::size_t a = 0; a < d; ++a) {
      g[a] = -2.0 * b[a];
      for (std::size_t c = 0; c < d; ++c) g[a] += 2.0 * M[a * d + c] * w[c];
    }
    return g;
  }

  // Largest eigenvalue of shift·I - sign·2M by power iteration.
  double power(double shift, double sign) const {
    std::vector<double> v(d, 1.0), u(d);
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
      for (std::size_t a = 0; a < d; ++a) {
        u[a] = shift * v[a];
        for (std::size_t c = 0; c < d; ++c) u[a] -= sign * 2.0 * M[a * d + c] * v[c];
      }
      lambda = norm2(u);
      for (std::size_t a = 0; a < d; ++a) v[a] = u[a] / lambda;
    }
    return lambda;
  }
};

struct Fit {
  double A = 0.0, B = 0.0, rms = 0.0;
};

// Nonnegative least squares of A/T + B on relative residuals.
Fit fit_rate(const std::vector<double>& T, const std::vector<double>& s) {
  const auto loss = [&](double A, double B) {
    double sum = 0.0;
    for (std::size_t k = 0; k < T.size(); ++k) {
      const double r = (A / T[k] + B - s[k]) / s[k];
      sum += r * r;
    }
    return std::sqrt(sum / double(T.size()));
  };
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t k = 0; k < T.size(); ++k) {
    const double x1 = 1.0 / (T[k] * s[k]), x2 = 1.0 / s[k];
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    r1 += x1;
    r2 += x2;
  }
  std::vector<Fit> candidates{{0.0, r2 / s22, 0.0}, {r1 / s11, 0.0, 0.0}};
  const double det = s11 * s22 - s12 * s12;
  const double A = (r1 * s22 - r2 * s12) / det, B = (r2 * s11 - r1 * s12) / det;
  if (A >= 0.0 && B >= 0.0) candidates.push_back({A, B, 0.0});
  Fit best{0, 0, std::numeric_limits<double>::infinity()};
  for (auto& c : candidates) {
    c.rms = loss(c.A, c.B);
    if (c.rms < best.rms) best = c;
  }
  return best;
}

Outcome criterion_convergence() {
  const auto start = std::chrono::steady_clock::now();
  const double lambda2 = 0.1;
  const Dataset ds = generate_synthetic(SyntheticSpec{400, 10, 2.0, 0.5, 7});
  const Quadratic q(ds, lambda2);

  const double L = q.power(0.0, -1.0);
  const double mu = L - q.power(L, 1.0) + 2.0 * lambda2;
  std::vector<double> w_star(q.d, 0.0);
  const double eta = 1.0 / L;
  for (int t = 0; t < 100000; ++t) {
    const auto g = q.smooth_gradient(w_star);
    for (std::size_t a = 0; a < q.d; ++a) w_star[a] = (w_star[a] - eta * g[a]) / (1.0 + 2.0 * eta * lambda2);
  }
  const double f_star = q.value(w_star);
  auto stationarity = q.smooth_gradient(w_star);
  for (std::size_t a = 0; a < q.d; ++a) stationarity[a] += 2.0 * lambda2 * w_star[a];
  const double consistency =
      std::abs(full_objective(PairLoss::Squared, w_star, ds, {lambda2, 0.0}, Normalization::OppositeSpace) - f_star);

  const std::vector<double> Ts{250, 500, 1000, 2000, 4000};
  const auto curve = [&](double gamma) {
    std::vector<double> gaps;
    for (double T : Ts) {
      double sum = 0.0;
      for (std::uint64_t seed = 0; seed < 25; ++seed) {
        TrainConfig c;
        c.step = ConstantStep{gamma};
        c.inner = FixedIters{static_cast<std::size_t>(T)};
        c.reg = {lambda2, 0.0};
        c.seed = seed;
        sum += q.value(train_plain(ds, c, TraceOptions{false, nullptr}).model.weights) - f_star;
      }
      gaps.push_back(sum / 25.0);
    }
    return gaps;
  };

  // Smallest step for which the transient factor 1/(γμT) of the bound is at
  // most 1 over the whole T range.
  const double gamma = 1.0 / (mu * Ts.front());
  const auto g1 = curve(gamma), g2 = curve(2.0 * gamma);
  const Fit f1 = fit_rate(Ts, g1), f2 = fit_rate(Ts, g2);
  const bool pass = norm2(stationarity) <= 1e-9 && consistency <= 1e-9 && f1.rms <= 0.25 && f2.rms <= 0.25 &&
                    f2.B > f1.B;

  std::string detail = fmt("mu %.3f, gamma %.3g: A %.3g floor %.3g rms %.1f%%; gamma %.3g: A %.3g floor %.3g rms "
                           "%.1f%%; |grad F(w*)| %.1e",
                           mu, gamma, f1.A, f1.B, 100 * f1.rms, 2 * gamma, f2.A, f2.B, 100 * f2.rms,
                           norm2(stationarity));
  // Smaller steps, reported only: the transient there is geometric, not 1/T.
  for (double factor : {0.125, 0.25, 0.5}) {
    const Fit f = fit_rate(Ts, curve(factor * gamma));
    detail += fmt("; [gamma %.3g rms %.1f%%]", factor * gamma, 100 * f.rms);
  }
  detail += fmt("; %.1f s", seconds_since(start));
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 8: complexity accounting.

Outcome criterion_complexity() {
  std::size_t combos = 0, violations = 0, count_mismatch = 0, corrected_violations = 0, trace_mismatch = 0, traced = 0;
  double worst_ratio = 0.0;
  std::string worst_case;
  for (std::size_t n : {100, 1000, 1500, 4096, 10000}) {
    for (std::size_t m0 : {2, 10, 64, 100}) {
      for (double beta : {1.5, 2.0, 3.0, 4.0}) {
        if (m0 > n) continue;
        ++combos;
        std::vector<std::size_t> expect{m0};
        while (expect.back() < n) {
          expect.push_back(std::min<std::size_t>(static_cast<std::size_t>(std::ceil(beta * expect.back())), n));
        }
        const auto sizes = stage_sizes(n, m0, beta);
        if (sizes != expect) ++count_mismatch;
        double total = 0.0;
        for (auto m : sizes) total += double(iterations_for_stage(LinearInM{}, m));
        const double bound = beta / (beta - 1.0) * double(n) + double(m0);
        if (total > bound) ++violations;
        if (total >= double(n) + beta / (beta - 1.0) * double(n)) ++corrected_violations;
        if (total / bound > worst_ratio) {
          worst_ratio = total / bound;
          worst_case = fmt("n=%zu m0=%zu beta=%g: sum %.0f vs %.1f", n, m0, beta, total, bound);
        }

        if (n <= 1500) {
          ++traced;
          const Dataset ds = generate_synthetic(SyntheticSpec{n, 3, 2.0, 0.5, n + m0});
          TrainConfig c;
          c.m0 = m0;
          c.beta = beta;
          c.stratify = true;
          c.step = PerStageStep{0.1, 0.5};
          c.seed = m0;
          const auto trace = train_adaptive(ds, c, TraceOptions{false, nullptr}).trace;
          bool ok = trace.stages.size() == sizes.size();
          std::size_t cumulative = 0;
          for (std::size_t s = 0; ok && s < sizes.size(); ++s) {
            const std::size_t t = s == 0 && sizes.size() > 1 ? 3 * sizes[0] : sizes[s];
            cumulative += t;
            ok = trace.stages[s].iterations == t && trace.stages[s].grad_evals == cumulative;
          }
          ok = ok && trace.total_grad_evals() == cumulative;
          if (!ok) ++trace_mismatch;
        }
      }
    }
  }
  return {violations == 0 && count_mismatch == 0 && trace_mismatch == 0,
          fmt("%zu (n, m0, beta) combos: %zu exceed beta/(beta-1)*n + m0 (worst ratio %.3f at ", combos, violations,
              worst_ratio) +
              worst_case +
              fmt("), %zu exceed n + beta/(beta-1)*n, %zu stage-size mismatches, %zu/%zu trace mismatches",
                  corrected_violations, count_mismatch, trace_mismatch, traced)};
}

// ---------------------------------------------------------------------------
// 9: theory calculators.

Outcome criterion_theory() {
  std::vector<std::string> failed;
  const auto expect = [&](const char* what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) failed.push_back(fmt("%s: %.10g vs %.10g", what, got, want));
  };
  expect("V_400", statistical_accuracy(400, 0.5), 0.05, 1e-15);
  expect("V_1", statistical_accuracy(1, 0.5), 1.0, 0.0);
  expect("V alpha 0", statistical_accuracy(777, 0.0), 1.0, 0.0);
  expect("warm start m=n", warm_start_bound(0.123, 900, 900, 0.5), 0.123, 0.0);
  expect("warm start example", warm_start_bound(0.04472, 500, 1000, 0.5), 0.08944, 5e-6);
  expect("warm start example exact", warm_start_bound(0.04472, 500, 1000, 0.5), 0.04472 + 1.0 / std::sqrt(500.0), 1e-15);
  expect("warm start alpha 0", warm_start_bound(0.0, 50, 100, 0.0), 1.0, 1e-15);
  const std::vector<double> steps(100, 0.1);
  expect("stability example", stability_generalization_bound(1, 10, steps), 4.0 / 90.0, 1e-15);
  expect("stability example digits", stability_generalization_bound(1, 10, steps), 0.04444, 5e-6);
  expect("stability zeros", stability_generalization_bound(1, 10, std::vector<double>(9, 0.0)), 0.0, 0.0);
  expect("stability constant form", stability_generalization_bound_constant(1, 10, 0.1, 100),
         stability_generalization_bound(1, 10, steps), 1e-15);
  expect("T* A=B", double(optimal_inner_iters(std::sqrt(22.5), 1, 1, 10)), 2, 0);
  expect("T* n=10", double(optimal_inner_iters(1, 1, 1, 10)), 13, 0);
  const double ratio = double(optimal_inner_iters(1, 1, 1, 2000)) / double(optimal_inner_iters(1, 1, 1, 1000));
  expect("T* doubling ratio / 2^(4/3)", ratio / std::pow(2.0, 4.0 / 3.0), 1.0, 0.05);
  expect("convergence example", convergence_bound(1, 0.1, 1, 1, 10), 1.1, 1e-15);
  expect("convergence floor", convergence_bound(0, 0.1, 1, 3, 10), 0.3, 1e-15);
  expect("convergence halving", convergence_bound(2, 0.1, 1, 0, 20), convergence_bound(2, 0.1, 1, 0, 10) / 2, 1e-15);

  std::size_t scans = 0;
  for (double G : {0.3, 1.0, 2.0}) {
    for (double mu : {0.05, 1.0}) {
      for (double gamma : {0.01, 0.5}) {
        for (double n : {10.0, 50.0, 200.0}) {
          const std::size_t t = optimal_inner_iters(G, mu, gamma, n);
          const double A = 1.0 / (gamma * mu), B = 4.0 * G * G * gamma / (n * (n - 1.0));
          std::size_t best = 1;
          double best_value = std::numeric_limits<double>::infinity();
          for (std::size_t T = 1; T <= 10 * t; ++T) {
            const double v = A / double(T) + B * std::sqrt(double(T));
            if (v < best_value) best_value = v, best = T;
          }
          ++scans;
          if (best != t) failed.push_back(fmt("T* scan G=%g mu=%g gamma=%g n=%g: %zu vs %zu", G, mu, gamma, n, t, best));
        }
      }
    }
  }
  std::string detail = fmt("worked examples plus %zu integer scans for T*", scans);
  for (const auto& f : failed) detail += "; " + f;
  return {failed.empty(), detail};
}

// ---------------------------------------------------------------------------
// 10: stability trend.

Outcome criterion_stability() {
  const auto start = std::chrono::steady_clock::now();
  StabilityConfig sc;
  sc.train.loss = PairLoss::Hinge;
  // Same initial stage for every n, so each n runs the adaptive schedule.
  sc.train.m0 = 50;
  const auto rows = run_stability(sc);
  bool pass = true;
  std::string detail;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k > 0 && rows[k].measured_mean > rows[k - 1].measured_mean) pass = false;
    detail += fmt("%sn=%zu measured %.4f +- %.4f bound %.5f", k ? "; " : "", rows[k].n, rows[k].measured_mean,
                  rows[k].measured_stderr.value_or(0.0), rows[k].bound_mean);
  }
  detail += fmt("; %.1f s", seconds_since(start));
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 11: determinism through the command line.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the command and returns stdout followed by any files it wrote.
std::string run_capture(std::vector<std::string> args, const std::vector<fs::path>& files) {
  for (const auto& f : files) fs::remove(f);
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  std::string text = "exit " + std::to_string(code) + "\n" + out.str();
  for (const auto& f : files) text += "\n--- " + f.filename().string() + "\n" + slurp(f);
  return text;
}

Outcome criterion_determinism() {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = artifact_dir / "determinism";
  fs::create_directories(dir);
  const std::string diabetes = (data_dir() / "diabetes").string();
  {
    std::ofstream scores(dir / "scores.txt");
    std::mt19937_64 gen(11);
    std::uniform_int_distribution<int> level(0, 9), coin(0, 1);
    for (int k = 0; k < 200; ++k) scores << (coin(gen) ? "+1 " : "-1 ") << level(gen) * 0.1 << '\n';
  }
  struct Command {
    std::string name;
    std::vector<std::string> args;
    bool parallel;
    std::vector<fs::path> files;
  };
  const std::vector<Command> commands{
      {"train", {"train", "--data", diabetes, "--repeats", "8", "--scale", "--no-timing"}, true, {}},
      {"train-grid", {"train", "--data", diabetes, "--repeats", "4", "--grid", "--scale", "--no-timing"}, true, {}},
      {"train-plain",
       {"train", "--n", "600", "--algorithm", "plain", "--inner", "fixed:900", "--gamma0", "0.1", "--repeats", "5",
        "--no-timing"},
       true,
       {}},
      {"bench",
       {"bench", "--n", "1500", "--d", "8", "--gamma0", "0.1", "--repeats", "5", "--no-timing", "--trace-out",
        (dir / "trace.csv").string()},
       true,
       {dir / "trace.csv"}},
      {"stability", {"stability", "--m0", "50", "--repeats", "4"}, true, {}},
      {"variance", {"variance", "--n", "30", "--d", "4", "--probes", "6"}, false, {}},
      {"variance-mc", {"variance", "--n", "60", "--d", "4", "--probes", "3", "--mc", "5000"}, false, {}},
      {"gen-synth",
       {"gen-synth", "--n", "300", "--d", "6", "--out", (dir / "synth.libsvm").string()},
       false,
       {dir / "synth.libsvm"}},
      {"auc", {"auc", "--scores", (dir / "scores.txt").string()}, false, {}},
  };
  std::vector<std::string> problems;
  std::size_t runs = 0;
  for (const auto& c : commands) {
    std::vector<std::string> per_worker;
    for (const char* workers : {"1", "4"}) {
      auto args = c.args;
      if (c.parallel) {
        args.push_back("--workers");
        args.push_back(workers);
      }
      const std::string first = run_capture(args, c.files);
      const std::string second = run_capture(args, c.files);
      runs += 2;
      if (first.rfind("exit 0\n", 0) != 0) problems.push_back(c.name + " failed: " + first.substr(0, 80));
      if (first != second) problems.push_back(c.name + " differs between runs at workers " + workers);
      per_worker.push_back(first);
      if (!c.parallel) break;
    }
    if (per_worker.size() == 2 && per_worker[0] != per_worker[1]) {
      problems.push_back(c.name + " differs between 1 and 4 workers");
    }
  }

  // With timing on only the seconds column may change.
  const auto strip_seconds = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
      if (cells.size() == 8) cells[5] = "-";
      for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
      out += '\n';
    }
    return out;
  };
  const std::vector<std::string> timed{"train", "--data", diabetes, "--repeats", "6", "--scale", "--workers", "4"};
  const bool timed_same = strip_seconds(run_capture(timed, {})) == strip_seconds(run_capture(timed, {}));

  std::string detail = fmt("%zu runs of %zu commands at workers 1 and 4", runs, commands.size());
  detail += timed_same ? ", timed runs agree outside the seconds column" : ", timed runs differ outside seconds";
  for (const auto& p : problems) detail += "; " + p;
  detail += fmt("; %.1f s", seconds_since(start));
  return {problems.empty() && timed_same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  std::string artifacts = ".";
  app.add_option("--criterion", only, "run a single criterion (1-11)");
  app.add_option("--artifacts", artifacts, "directory for counterexamples and scratch files");
  CLI11_PARSE(app, argc, argv);
  artifact_dir = artifacts;
  fs::create_directories(artifact_dir);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"diabetes held-out AUC", criterion_diabetes},
      {"a9a held-out AUC", criterion_a9a},
      {"importance-weighted gradient is unbiased", criterion_unbiased},
      {"opposite-pair sampling reduces variance", criterion_variance},
      {"elastic-net prox", criterion_prox},
      {"rank AUC equals pair counting", criterion_auc},
      {"convergence shape", criterion_convergence},
      {"complexity accounting", criterion_complexity},
      {"theory calculators", criterion_theory},
      {"stability decreases with n", criterion_stability},
      {"deterministic output", criterion_determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << k + 1 << ' ' << criteria[k].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
