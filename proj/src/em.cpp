#include "btem/em.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "btem/error.hpp"
#include "btem/rng.hpp"

namespace btem::em {

namespace {

constexpr double kEmptyMass = 1e-12;
constexpr double kWeightSumTolerance = 1e-9;

void check_examples(std::span<const BinaryVector> examples) {
  if (examples.empty()) throw InsufficientInput("no examples");
  const auto n = examples.front().dim();
  for (const auto& x : examples)
    if (x.dim() != n) throw DimensionError("examples must share one dimension");
}

void check_weights(std::span<const double> weights, std::size_t r) {
  if (weights.size() != r)
    throw DimensionError("one weight per template required");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ParameterError("weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
    throw ParameterError("weights must sum to 1");
}

void check_q(double q) {
  if (!(q > 0.0 && q <= 0.5)) throw ParameterError("noise level must lie in (0, 1/2]");
}

// Fills one row of `out` from the component log-densities `log_terms`
// (log w_i + log f_i), overwriting them in the process.
void normalize_row(std::span<double> log_terms, std::span<double> row,
                   double& log_normalizer) {
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < log_terms.size(); ++i) {
    row[i] = std::exp(log_terms[i] - top);
    sum += row[i];
  }
  for (double& p : row) p /= sum;
  log_normalizer = top + std::log(sum);
}

// Shared body of both e_step overloads; distance(j, i) gives D(x_j, T_i).
template <typename Distance>
SoftAssignment e_step_impl(std::size_t m, std::size_t n,
                           std::span<const double> weights, double q,
                           Distance&& distance) {
  const std::size_t r = weights.size();
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double nd = static_cast<double>(n);
  std::vector<double> log_w(r);
  for (std::size_t i = 0; i < r; ++i)
    log_w[i] = weights[i] > 0.0 ? std::log(weights[i])
                                : -std::numeric_limits<double>::infinity();

  SoftAssignment out(m, r);
  std::vector<double> terms(r);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < r; ++i) {
      const double d = distance(j, i);
      terms[i] = log_w[i] + d * log_q + (nd - d) * log_1mq;
    }
    normalize_row(terms, out.row(j), out.log_normalizers()[j]);
  }
  return out;
}

std::vector<std::size_t> sample_distinct(std::size_t population, std::size_t count,
                                         CounterRng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

std::vector<BinaryVector> rounded(std::span<const RealVector> templates) {
  std::vector<BinaryVector> out;
  out.reserve(templates.size());
  for (const auto& t : templates) out.push_back(round_to_binary(t));
  return out;
}

std::vector<RealVector> as_real(std::span<const BinaryVector> templates) {
  std::vector<RealVector> out;
  out.reserve(templates.size());
  for (const auto& t : templates) out.push_back(RealVector::from_binary(t));
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

double SoftAssignment::log_likelihood() const noexcept {
  double sum = 0.0;
  for (double v : log_normalizers_) sum += v;
  return sum;
}

std::vector<std::size_t> SoftAssignment::hard_labels() const {
  std::vector<std::size_t> labels(rows_);
  for (std::size_t j = 0; j < rows_; ++j) {
    const auto r = row(j);
    labels[j] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return labels;
}

InitialCount choose_l(double w_min, double delta) {
  if (!(w_min > 0.0 && w_min <= 1.0)) throw ParameterError("w_min must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  InitialCount out;
  out.raw = 4.0 / w_min * std::log(2.0 / (delta * w_min));
  out.l = static_cast<std::size_t>(std::ceil(out.raw));
  out.w_T = 1.0 / (4.0 * static_cast<double>(out.l));
  return out;
}

NoiseEstimate q0_from_ratio(double v) {
  NoiseEstimate out;
  out.v = v;
  if (v <= 0.0) {
    out.q0 = kQFloor;
    out.warning = "initial templates contain duplicates; q0 floored at 1e-6";
  } else if (v > 0.25) {
    out.q0 = 0.5;
    out.warning = "min distance exceeds n/2; q0 clamped to 0.5";
  } else {
    // Smaller root of q^2 - q + v = 0, written to avoid cancellation.
    out.q0 = std::max(2.0 * v / (1.0 + std::sqrt(1.0 - 4.0 * v)), kQFloor);
  }
  return out;
}

NoiseEstimate estimate_q0(std::span<const BinaryVector> initial_templates) {
  const auto closest = min_pairwise_distance(initial_templates);
  const double n = static_cast<double>(initial_templates.front().dim());
  return q0_from_ratio(static_cast<double>(closest.distance) / (2.0 * n));
}

SoftAssignment e_step(std::span<const BinaryVector> examples,
                      std::span<const BinaryVector> templates,
                      std::span<const double> weights, double q) {
  check_examples(examples);
  check_q(q);
  check_weights(weights, templates.size());
  if (templates.empty()) throw InsufficientInput("no templates");
  const auto n = examples.front().dim();
  for (const auto& t : templates)
    if (t.dim() != n) throw DimensionError("template dimension differs from examples");
  return e_step_impl(examples.size(), n, weights, q, [&](std::size_t j, std::size_t i) {
    return static_cast<double>(hamming_distance(examples[j], templates[i]));
  });
}

SoftAssignment e_step(std::span<const BinaryVector> examples,
                      std::span<const RealVector> templates,
                      std::span<const double> weights, double q) {
  check_examples(examples);
  check_q(q);
  check_weights(weights, templates.size());
  if (templates.empty()) throw InsufficientInput("no templates");
  const auto n = examples.front().dim();
  std::vector<double> totals;
  totals.reserve(templates.size());
  for (const auto& t : templates) {
    if (t.dim() != n) throw DimensionError("template dimension differs from examples");
    totals.push_back(t.total());
  }
  return e_step_impl(examples.size(), n, weights, q, [&](std::size_t j, std::size_t i) {
    return l1_distance_real(templates[i], totals[i], examples[j]);
  });
}

MStepResult m_step(std::span<const BinaryVector> examples,
                   const SoftAssignment& assignment,
                   std::span<const RealVector> previous) {
  check_examples(examples);
  const std::size_t m = examples.size();
  const std::size_t r = assignment.cols();
  const std::size_t n = examples.front().dim();
  if (assignment.rows() != m) throw DimensionError("assignment rows differ from example count");
  if (previous.size() != r) throw DimensionError("one previous template per column required");

  MStepResult out;
  out.weights.assign(r, 0.0);
  out.empty.assign(r, false);
  std::vector<std::vector<double>> sums(r, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = assignment.row(j);
    for (std::size_t i = 0; i < r; ++i) {
      const double p = row[i];
      out.weights[i] += p;
      if (p == 0.0) continue;
      auto& acc = sums[i];
      examples[j].for_each_set([&](std::size_t s) { acc[s] += p; });
    }
  }
  out.templates.reserve(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double mass = out.weights[i];
    out.weights[i] = mass / static_cast<double>(m);
    if (mass < kEmptyMass) {
      out.empty[i] = true;
      out.templates.push_back(previous[i]);
      continue;
    }
    for (double& v : sums[i]) v = std::min(v / mass, 1.0);
    out.templates.emplace_back(std::move(sums[i]));
  }
  return out;
}

std::vector<std::size_t> prune_by_weight(std::span<const double> weights, double w_T) {
  if (!(w_T > 0.0 && w_T < 1.0)) throw ParameterError("w_T must lie in (0, 1)");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] >= w_T) keep.push_back(i);
  if (keep.empty()) throw AllClustersStarved("every template fell below the weight threshold");
  return keep;
}

std::vector<std::size_t> farthest_first_select(std::span<const RealVector> templates,
                                               std::size_t k, std::size_t start) {
  if (k == 0) throw ParameterError("k must be positive");
  if (templates.size() < k)
    throw TooFewClusters(std::to_string(templates.size()) + " templates survived pruning, " +
                         std::to_string(k) + " required");
  if (start >= templates.size()) throw ParameterError("start index out of range");

  const std::size_t r = templates.size();
  std::vector<std::size_t> order{start};
  std::vector<bool> chosen(r, false);
  chosen[start] = true;
  std::vector<double> nearest(r, std::numeric_limits<double>::infinity());
  while (order.size() < k) {
    const auto& last = templates[order.back()];
    std::size_t best = r;
    double best_distance = -1.0;
    for (std::size_t c = 0; c < r; ++c) {
      if (chosen[c]) continue;
      nearest[c] = std::min(nearest[c], l1_distance(templates[c], last));
      if (nearest[c] > best_distance) {
        best_distance = nearest[c];
        best = c;
      }
    }
    chosen[best] = true;
    order.push_back(best);
  }
  return order;
}

FitResult two_round_em(std::span<const BinaryVector> examples, std::size_t k,
                       double w_min, double delta, std::uint64_t seed,
                       const TwoRoundOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  check_examples(examples);
  if (k == 0) throw ParameterError("k must be positive");
  if (options.rounds < 2) throw ParameterError("two-round EM needs at least 2 rounds");

  FitResult fit;
  auto& diag = fit.diagnostics;
  const auto count = choose_l(w_min, delta);
  diag.l = count.l;
  diag.w_T = count.w_T;
  const std::size_t m = examples.size();
  if (m < count.l)
    throw InsufficientData("two-round EM needs m >= l = " + std::to_string(count.l) +
                           ", got m = " + std::to_string(m));
  if (count.l < k)
    throw ParameterError("initial cluster count l is smaller than k");

  // Step 1: l distinct examples as initial templates.
  CounterRng pick_rng(derive_seed(seed, 0));
  diag.initial_indices = sample_distinct(m, count.l, pick_rng);
  std::vector<BinaryVector> initial;
  initial.reserve(count.l);
  for (auto j : diag.initial_indices) initial.push_back(examples[j]);

  // Step 2: uniform weights and the noise estimate.
  const auto noise = estimate_q0(initial);
  if (!noise.warning.empty()) diag.warnings.push_back(noise.warning);
  const double q0 = noise.q0;
  const std::vector<double> uniform_l(count.l, 1.0 / static_cast<double>(count.l));

  // Steps 3-4.
  const auto first = e_step(examples, initial, uniform_l, q0);
  auto round1 = m_step(examples, first, as_real(initial));
  diag.round1_weights = round1.weights;
  diag.iterations = 1;

  // Step 5.
  diag.survivors = prune_by_weight(round1.weights, count.w_T);
  for (std::size_t i = 0, s = 0; i < count.l; ++i) {
    if (s < diag.survivors.size() && diag.survivors[s] == i)
      ++s;
    else
      diag.pruned_indices.push_back(i);
  }
  if (diag.survivors.size() < k)
    throw TooFewClusters(std::to_string(diag.survivors.size()) +
                         " templates survived pruning, " + std::to_string(k) + " required");

  // Step 6.
  std::vector<RealVector> survivors;
  survivors.reserve(diag.survivors.size());
  for (auto i : diag.survivors) survivors.push_back(round1.templates[i]);
  std::size_t start = 0;
  if (options.deterministic_prune) {
    for (std::size_t s = 1; s < diag.survivors.size(); ++s)
      if (round1.weights[diag.survivors[s]] > round1.weights[diag.survivors[start]]) start = s;
  } else {
    CounterRng start_rng(derive_seed(seed, 1));
    start = static_cast<std::size_t>(start_rng.below(survivors.size()));
  }
  std::vector<RealVector> templates;
  templates.reserve(k);
  for (auto s : farthest_first_select(survivors, k, start)) {
    diag.selection_order.push_back(diag.survivors[s]);
    templates.push_back(survivors[s]);
  }
  if (options.round1_binarize)
    for (auto& t : templates) t = RealVector::from_binary(round_to_binary(t));

  // Steps 7-9, then any extra rounds with q1 = q0 held fixed.
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  SoftAssignment last;
  for (std::size_t round = 2; round <= options.rounds; ++round) {
    last = e_step(examples, templates, weights, q0);
    auto next = m_step(examples, last, templates);
    templates = std::move(next.templates);
    weights = std::move(next.weights);
    ++diag.iterations;
  }

  fit.templates = rounded(templates);
  fit.templates_real = std::move(templates);
  fit.weights = std::move(weights);
  fit.q0 = q0;
  fit.labels = last.hard_labels();
  fit.log_likelihood = log_likelihood(examples, fit.templates, fit.weights, q0);
  diag.wall_ms = elapsed_ms(started);
  return fit;
}

FitResult standard_em(std::span<const BinaryVector> examples, std::size_t k,
                      double q_known, std::uint64_t seed,
                      const StandardOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  check_examples(examples);
  check_q(q_known);
  if (k == 0) throw ParameterError("k must be positive");
  if (options.iterations < 1) throw ParameterError("iterations must be at least 1");
  if (options.restarts < 1) throw ParameterError("restarts must be at least 1");
  if (examples.size() < k)
    throw InsufficientData("standard EM needs m >= k = " + std::to_string(k));

  FitResult best;
  bool have_best = false;
  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    CounterRng rng(derive_seed(seed, restart));
    const auto picks = sample_distinct(examples.size(), k, rng);
    std::vector<RealVector> templates;
    templates.reserve(k);
    for (auto j : picks) templates.push_back(RealVector::from_binary(examples[j]));
    std::vector<double> weights(k, 1.0 / static_cast<double>(k));

    SoftAssignment last;
    for (std::size_t it = 0; it < options.iterations; ++it) {
      if (options.binarize) {
        const auto binary = rounded(templates);
        last = e_step(examples, binary, weights, q_known);
      } else {
        last = e_step(examples, templates, weights, q_known);
      }
      auto next = m_step(examples, last, templates);
      templates = std::move(next.templates);
      weights = std::move(next.weights);
    }

    FitResult fit;
    fit.templates = rounded(templates);
    fit.templates_real = std::move(templates);
    fit.weights = std::move(weights);
    fit.q0 = q_known;
    fit.labels = last.hard_labels();
    fit.log_likelihood = log_likelihood(examples, fit.templates, fit.weights, q_known);
    fit.diagnostics.initial_indices = picks;
    fit.diagnostics.iterations = options.iterations;
    fit.diagnostics.restart = restart;
    if (!have_best || fit.log_likelihood > best.log_likelihood) {
      best = std::move(fit);
      have_best = true;
    }
  }
  best.diagnostics.wall_ms = elapsed_ms(started);
  return best;
}

double log_likelihood(std::span<const BinaryVector> examples,
                      std::span<const BinaryVector> templates,
                      std::span<const double> weights, double q) {
  return e_step(examples, templates, weights, q).log_likelihood();
}

double log_likelihood(std::span<const BinaryVector> examples,
                      std::span<const RealVector> templates,
                      std::span<const double> weights, double q) {
  return e_step(examples, templates, weights, q).log_likelihood();
}

}  // namespace btem::em
