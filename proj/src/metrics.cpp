#include "btem/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "btem/error.hpp"

namespace btem::metrics {

namespace {

constexpr std::size_t kExhaustiveLimit = 10;

// counts[y][x] = #{j : cluster_labels[j] == y, true_labels[j] == x}
std::map<std::size_t, std::map<std::size_t, std::size_t>> contingency(
    std::span<const std::size_t> true_labels, std::span<const std::size_t> cluster_labels) {
  if (true_labels.empty()) throw InsufficientInput("no labels");
  if (true_labels.size() != cluster_labels.size())
    throw DimensionError("label sequences differ in length");
  std::map<std::size_t, std::map<std::size_t, std::size_t>> counts;
  for (std::size_t j = 0; j < true_labels.size(); ++j)
    ++counts[cluster_labels[j]][true_labels[j]];
  return counts;
}

}  // namespace

double conditional_purity(std::span<const std::size_t> true_labels,
                          std::span<const std::size_t> cluster_labels) {
  const auto counts = contingency(true_labels, cluster_labels);
  // sum_y p(y) max_x p(x|y) = sum_y max_x count(x, y) / N
  std::size_t hits = 0;
  for (const auto& [y, row] : counts) {
    std::size_t best = 0;
    for (const auto& [x, c] : row) best = std::max(best, c);
    hits += best;
  }
  return static_cast<double>(hits) / static_cast<double>(true_labels.size());
}

double conditional_entropy(std::span<const std::size_t> true_labels,
                           std::span<const std::size_t> cluster_labels) {
  const auto counts = contingency(true_labels, cluster_labels);
  const auto total = static_cast<double>(true_labels.size());
  double h = 0.0;
  for (const auto& [y, row] : counts) {
    std::size_t size = 0;
    for (const auto& [x, c] : row) size += c;
    const auto ny = static_cast<double>(size);
    double hy = 0.0;
    for (const auto& [x, c] : row) {
      const double p = static_cast<double>(c) / ny;
      hy -= p * std::log(p);
    }
    h += ny / total * hy;
  }
  return std::max(h, 0.0);
}

TemplateMatch match_templates(std::span<const BinaryVector> estimated,
                              std::span<const BinaryVector> truth) {
  if (estimated.size() != truth.size())
    throw DimensionError("estimated and true template counts differ");
  const std::size_t k = estimated.size();
  std::vector<std::vector<std::size_t>> cost(k, std::vector<std::size_t>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t t = 0; t < k; ++t) cost[i][t] = hamming_distance(estimated[i], truth[t]);

  TemplateMatch best;
  best.errors.assign(k, 0);
  if (k <= kExhaustiveLimit) {
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::size_t best_total = std::numeric_limits<std::size_t>::max();
    do {
      std::size_t total = 0;
      for (std::size_t i = 0; i < k; ++i) total += cost[i][perm[i]];
      if (total < best_total) {
        best_total = total;
        best.permutation = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    // Repeatedly take the globally closest unmatched pair.
    best.exact = false;
    best.permutation.assign(k, k);
    std::vector<bool> used(k, false);
    for (std::size_t step = 0; step < k; ++step) {
      std::size_t bi = k, bt = k, bc = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i < k; ++i) {
        if (best.permutation[i] != k) continue;
        for (std::size_t t = 0; t < k; ++t)
          if (!used[t] && cost[i][t] < bc) bi = i, bt = t, bc = cost[i][t];
      }
      best.permutation[bi] = bt;
      used[bt] = true;
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    best.errors[i] = cost[i][best.permutation[i]];
    best.total_error += best.errors[i];
  }
  return best;
}

RealVector cluster_mean(const LabeledDataset& data, std::size_t i) {
  std::vector<double> sum(data.dim, 0.0);
  std::size_t count = 0;
  for (std::size_t j = 0; j < data.size(); ++j) {
    if (data.labels[j] != i) continue;
    ++count;
    data.examples[j].for_each_set([&](std::size_t s) { sum[s] += 1.0; });
  }
  if (count == 0) throw InsufficientInput("component has no examples");
  for (double& v : sum) v /= static_cast<double>(count);
  return RealVector(std::move(sum));
}

std::vector<double> oracle_mean_error(const LabeledDataset& data,
                                      std::span<const BinaryVector> truth) {
  std::vector<double> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i].dim() != data.dim) throw DimensionError("template dimension differs from data");
    bool any = std::find(data.labels.begin(), data.labels.end(), i) != data.labels.end();
    out.push_back(any ? l1_distance_real(cluster_mean(data, i), truth[i])
                      : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

ClusterEvaluation evaluate(std::span<const BinaryVector> estimated,
                           std::span<const std::size_t> cluster_labels,
                           double log_likelihood, const LabeledDataset& data,
                           std::span<const BinaryVector> truth) {
  ClusterEvaluation ev;
  ev.purity = conditional_purity(data.labels, cluster_labels);
  ev.entropy = conditional_entropy(data.labels, cluster_labels);
  ev.log_likelihood = log_likelihood;
  ev.match = match_templates(estimated, truth);
  ev.exact_recovery = ev.match.exact_recovery();
  return ev;
}

}  // namespace btem::metrics
