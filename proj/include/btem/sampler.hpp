#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "btem/core.hpp"
#include "btem/rng.hpp"

namespace btem {

/// Mixture of k Bernoulli templates with common noise level q.
struct MixtureModel {
  std::vector<BinaryVector> templates;
  std::vector<double> weights;
  double q = 0.0;

  /// Throws ParameterError/DimensionError unless weights are positive and
  /// sum to 1 (within 1e-12), templates share one dimension, and
  /// 0 <= q < 1/2. q = 0 is accepted for noiseless test data.
  void validate() const;

  std::size_t k() const noexcept { return templates.size(); }
  std::size_t dim() const noexcept {
    return templates.empty() ? 0 : templates.front().dim();
  }
  double w_min() const;
  /// Minimum pairwise template distance divided by n; 1 when k == 1.
  double separation() const;
};

/// Examples with the hidden component index that generated each one.
struct LabeledDataset {
  std::size_t dim = 0;
  std::size_t k = 0;
  std::vector<BinaryVector> examples;
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return examples.size(); }
  /// Indices j with labels[j] == i.
  std::vector<std::size_t> members(std::size_t i) const;
};

/// Draws a component with probability w_i and flips each bit of its
/// template independently with probability q.
std::pair<BinaryVector, std::size_t> sample_example(const MixtureModel& model,
                                                    CounterRng& rng);

/// m independent examples; example j uses stream derive_seed(seed, j), so
/// the result does not depend on generation order.
LabeledDataset sample_dataset(const MixtureModel& model, std::size_t m,
                              std::uint64_t seed);

/// P1 = 0^n and P2 with its first floor(c n) components set.
std::vector<BinaryVector> make_line_templates(std::size_t n, double c);

/// k uniform random templates, redrawn as a set until every pairwise
/// distance is at least c_target * n. Gives up after 1000 attempts.
std::vector<BinaryVector> make_random_templates(std::size_t n, std::size_t k,
                                                double c_target,
                                                std::uint64_t seed);

/// Weights (w_min, (1 - w_min)/(k - 1), ...); w_min must not exceed 1/k.
std::vector<double> weights_with_minimum(std::size_t k, double w_min);

/// Text format: header line "n=<n> m=<m> k=<k>", then one line per example
/// "<label> <hex>" where hex is BinaryVector::to_hex().
void write_dataset(std::ostream& out, const LabeledDataset& data);
void write_dataset(const std::string& path, const LabeledDataset& data);
LabeledDataset read_dataset(std::istream& in);
LabeledDataset read_dataset(const std::string& path);

}  // namespace btem
