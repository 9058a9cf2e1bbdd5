// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "btem/em.hpp"
#include "btem/harness.hpp"
#include "btem/metrics.hpp"
#include "btem/rng.hpp"
#include "btem/sampler.hpp"
#include "btem/stats.hpp"

using namespace btem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t worker_count() {
  return harness::threads_from_env(std::max(1u, std::thread::hardware_concurrency()));
}

MixtureModel line_model(std::size_t n, double c, double q, double w0) {
  MixtureModel m;
  m.templates = make_line_templates(n, c);
  m.weights = {w0, 1.0 - w0};
  m.q = q;
  return m;
}

Outcome moments() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto same = stats::mc_distance_moments(stats::Scenario::SamePair, 1000, 0.1, 0, 10000, 1);
  const auto cross =
      stats::mc_distance_moments(stats::Scenario::CrossPair, 1000, 0.1, 500, 10000, 2);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = std::abs(same.mean - 180.0) <= 0.6 &&
                  std::abs(same.variance / 147.6 - 1.0) <= 0.10 &&
                  std::abs(cross.mean - 500.0) <= 0.7 && secs < 5.0;
  return {ok, fmt("same mean %.3f var %.2f, cross mean %.3f, %.2fs", same.mean, same.variance,
                  cross.mean, secs)};
}

Outcome tail_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 1000, samples = 100000;
  const double q = 0.1, lambda = 1.5;
  MixtureModel model;
  model.templates = {BinaryVector(n)};
  model.weights = {1.0};
  model.q = q;
  std::size_t exceed = 0;
  for (std::size_t j = 0; j < samples; ++j) {
    CounterRng rng(derive_seed(3, j));
    const auto [x, label] = sample_example(model, rng);
    if (static_cast<double>(x.count()) > lambda * n * q) ++exceed;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double bound = stats::tail_bound_own_template(n, q, lambda);
  const double freq = static_cast<double>(exceed) / samples;
  const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / samples);
  return {freq <= limit && secs < 10.0,
          fmt("frequency %.2e vs limit %.2e (bound %.2e), %.2fs", freq, limit, bound, secs)};
}

Outcome q0_estimation() {
  const auto model = line_model(2000, 0.5, 0.1, 0.5);
  std::size_t close = 0;
  double worst = 0.0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const auto data = sample_dataset(model, 300, derive_seed(4, 2 * run));
    const auto fit = em::two_round_em(data.examples, 2, 0.5, 0.1, derive_seed(4, 2 * run + 1));
    const double err = std::abs(fit.q0 - 0.1);
    worst = std::max(worst, err);
    if (err <= 0.02) ++close;
  }
  return {close >= 95, fmt("%zu/100 within 0.02 (worst error %.4f)", close, worst)};
}

Outcome estep_oracle() {
  CounterRng rng(5);
  double worst = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.below(20);
    const std::size_t m = 1 + rng.below(8);
    const std::size_t r = 1 + rng.below(6);
    const double q = 0.01 + 0.48 * rng.uniform();
    std::vector<BinaryVector> xs, ts;
    auto random_vector = [&] {
      BinaryVector v(n);
      for (std::size_t s = 0; s < n; ++s) v.set(s, rng.bernoulli(0.5));
      return v;
    };
    for (std::size_t j = 0; j < m; ++j) xs.push_back(random_vector());
    for (std::size_t i = 0; i < r; ++i) ts.push_back(random_vector());
    std::vector<double> w(r);
    for (auto& x : w) x = 0.05 + rng.uniform();
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;

    const auto post = em::e_step(xs, ts, w, q);
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> f(r);
      double z = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        f[i] = w[i];
        for (std::size_t s = 0; s < n; ++s) f[i] *= xs[j].get(s) == ts[i].get(s) ? 1.0 - q : q;
        z += f[i];
      }
      for (std::size_t i = 0; i < r; ++i) {
        const double exact = f[i] / z;
        worst = std::max(worst, std::abs(post(j, i) - exact) / exact);
      }
    }
  }
  return {worst <= 1e-10, fmt("max relative error %.3e over 1000 instances", worst)};
}

harness::ExperimentConfig single_point(double n, double m, double q, double c, double w_min,
                                       std::uint64_t seed) {
  harness::ExperimentConfig cfg;
  cfg.fixed.n = n, cfg.fixed.m = m, cfg.fixed.k = 2, cfg.fixed.q = q, cfg.fixed.c = c;
  cfg.fixed.w_min = w_min;
  cfg.algorithms.emplace_back();
  cfg.trials = 100;
  cfg.seed = seed;
  return cfg;
}

Outcome exact_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto recs = harness::sweep_grid(single_point(2000, 300, 0.01, 0.5, 0.5, 6), worker_count());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = recs.front().success_rate;
  return {rate >= 0.90 && secs < 120.0, fmt("success rate %.2f, %.1fs", rate, secs)};
}

Outcome theorem_regime() {
  const std::size_t n = 4096, m = 300;
  const double q = 1e-4, eps = 0.1;
  const auto model = line_model(n, 1.0, q, 0.5);
  std::size_t successes = 0, violations = 0;
  double worst_gap = -INFINITY;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const auto data = sample_dataset(model, m, derive_seed(7, 2 * run));
    const auto fit = em::two_round_em(data.examples, 2, 0.5, 0.1, derive_seed(7, 2 * run + 1));
    const auto match = metrics::match_templates(fit.templates, model.templates);
    if (!match.exact_recovery()) continue;
    ++successes;
    const auto oracle = metrics::oracle_mean_error(data, model.templates);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto truth = match.permutation[i];
      const double gap = l1_distance_real(fit.templates_real[i], model.templates[truth]) -
                         oracle[truth];
      worst_gap = std::max(worst_gap, gap);
      if (gap > eps * q) ++violations;
    }
  }
  return {successes >= 90 && violations == 0,
          fmt("success %zu/100, inequality violations %zu (max D(T,P)-D(mean,P) = %.3e, "
              "allowance %.1e)",
              successes, violations, worst_gap, eps * q)};
}

Outcome pruning_uniqueness() {
  const auto model = line_model(2000, 0.5, 0.01, 0.5);
  std::size_t unique = 0;
  for (std::uint64_t run = 0; run < 100; ++run) {
    const auto data = sample_dataset(model, 300, derive_seed(8, 2 * run));
    const auto fit = em::two_round_em(data.examples, 2, 0.5, 0.1, derive_seed(8, 2 * run + 1));
    const auto& d = fit.diagnostics;
    std::vector<std::size_t> clusters;
    for (auto sel : d.selection_order) clusters.push_back(data.labels[d.initial_indices[sel]]);
    std::sort(clusters.begin(), clusters.end());
    if (clusters == std::vector<std::size_t>{0, 1}) ++unique;
  }
  return {unique >= 99, fmt("%zu/100 runs selected one template per cluster", unique)};
}

Outcome sample_complexity() {
  auto cfg = single_point(1458, 0, 0.1, 0.02, 0.4, 9);
  std::vector<double> ms;
  for (int m = 20; m <= 300; m += 20) ms.push_back(m);
  cfg.grid.emplace_back("m", ms);
  const auto recs = harness::sweep_grid(cfg, worker_count());
  std::vector<double> rates;
  for (const auto& r : recs) rates.push_back(r.success_rate);
  const double trials = 100.0;
  bool monotone = true;
  for (std::size_t i = 0; i < rates.size(); ++i)
    for (std::size_t j = i + 1; j < rates.size(); ++j) {
      const double sigma = std::sqrt(rates[i] * (1 - rates[i]) / trials +
                                     rates[j] * (1 - rates[j]) / trials);
      if (rates[j] < rates[i] - 3.0 * sigma) monotone = false;
    }
  std::ostringstream curve;
  for (std::size_t i = 0; i < rates.size(); ++i)
    curve << (i ? " " : "") << static_cast<int>(ms[i]) << ":" << rates[i];
  const bool reaches_one = rates.back() == 1.0;
  return {monotone && reaches_one,
          fmt("non-decreasing within 3 sigma: %s; rate at m=300: %.2f; curve %s",
              monotone ? "yes" : "no", rates.back(), curve.str().c_str())};
}

Outcome metric_values() {
  const std::vector<std::size_t> truth{0, 0, 1, 1}, perfect{1, 1, 0, 0}, confused{0, 1, 0, 1};
  const double p1 = metrics::conditional_purity(truth, perfect);
  const double h1 = metrics::conditional_entropy(truth, perfect);
  const double p2 = metrics::conditional_purity(truth, confused);
  const double h2 = metrics::conditional_entropy(truth, confused);
  const bool ok = p1 == 1.0 && h1 == 0.0 && std::abs(p2 - 0.5) <= 1e-12 &&
                  std::abs(h2 - std::log(2.0)) <= 1e-12;
  return {ok, fmt("perfect (%.17g, %.17g), confused (%.17g, %.17g)", p1, h1, p2, h2)};
}

Outcome determinism() {
  auto cfg = harness::parse_config_text(R"({
    "fixed": {"n": 500, "k": 2, "c": 0.2, "w_min": 0.4},
    "grid": {"q": [0.05, 0.15], "m": [60, 150]},
    "algorithms": ["two-round", {"type": "standard", "iterations": 3, "restarts": 3}],
    "trials": 20,
    "seed": 10
  })");
  std::vector<std::string> outputs;
  for (std::size_t threads : {1, 2, 4, 7}) {
    std::ostringstream out;
    harness::write_csv(out, harness::sweep_grid(cfg, threads));
    outputs.push_back(out.str());
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(),
                                [&](const std::string& s) { return s == outputs.front(); });
  return {same, fmt("thread counts 1, 2, 4, 7: %s (%zu bytes)",
                    same ? "identical" : "different", outputs.front().size())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 distance moments", moments},
      {"2 tail bound", tail_bound},
      {"3 noise estimate q0", q0_estimation},
      {"4 E-step oracle", estep_oracle},
      {"5 exact recovery", exact_recovery},
      {"6 guarantee regime", theorem_regime},
      {"7 pruning uniqueness", pruning_uniqueness},
      {"8 sample complexity", sample_complexity},
      {"9 metrics", metric_values},
      {"10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
