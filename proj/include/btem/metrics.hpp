#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "btem/core.hpp"
#include "btem/sampler.hpp"

namespace btem::metrics {

/// Purity(X|Y) = sum_y p(y) max_x p(x|y), with X the true categories and Y
/// the cluster ids, probabilities estimated from counts.
double conditional_purity(std::span<const std::size_t> true_labels,
                          std::span<const std::size_t> cluster_labels);

/// H(X|Y) = -sum_y p(y) sum_x p(x|y) ln p(x|y), in nats; 0 ln 0 = 0.
double conditional_entropy(std::span<const std::size_t> true_labels,
                           std::span<const std::size_t> cluster_labels);

struct TemplateMatch {
  /// permutation[i] is the true template matched to estimated[i].
  std::vector<std::size_t> permutation;
  std::vector<std::size_t> errors;  ///< per estimated template
  std::size_t total_error = 0;
  bool exact = true;  ///< false when the greedy fallback was used (k > 10)
  bool exact_recovery() const noexcept { return total_error == 0; }
};

/// Minimum-total-distance assignment of estimated to true templates.
/// Exhaustive over permutations for k <= 10 (lowest permutation in
/// lexicographic order on ties), greedy nearest pairs beyond that.
TemplateMatch match_templates(std::span<const BinaryVector> estimated,
                              std::span<const BinaryVector> truth);

/// For each true component i, the l1 distance between the unrounded mean of
/// the examples generated by i and the template P_i. Components with no
/// examples report NaN.
std::vector<double> oracle_mean_error(const LabeledDataset& data,
                                      std::span<const BinaryVector> truth);

/// Unrounded mean of the examples whose label is i.
RealVector cluster_mean(const LabeledDataset& data, std::size_t i);

struct ClusterEvaluation {
  double purity = 0.0;
  double entropy = 0.0;
  double log_likelihood = 0.0;
  TemplateMatch match;
  bool exact_recovery = false;
};

/// Purity and entropy of `cluster_labels` against the dataset labels, plus
/// the template matching against `truth`.
ClusterEvaluation evaluate(std::span<const BinaryVector> estimated,
                           std::span<const std::size_t> cluster_labels,
                           double log_likelihood, const LabeledDataset& data,
                           std::span<const BinaryVector> truth);

}  // namespace btem::metrics
