#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "btem/core.hpp"

namespace btem::em {

/// m x r matrix of posteriors p_i(x_j), stored row-major, plus the log of
/// each row's normalizer log sum_i w_i f_i(x_j).
class SoftAssignment {
 public:
  SoftAssignment() = default;
  SoftAssignment(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), posteriors_(rows * cols, 0.0),
        log_normalizers_(rows, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t j, std::size_t i) const noexcept {
    return posteriors_[j * cols_ + i];
  }
  double& operator()(std::size_t j, std::size_t i) noexcept {
    return posteriors_[j * cols_ + i];
  }
  std::span<const double> row(std::size_t j) const noexcept {
    return {posteriors_.data() + j * cols_, cols_};
  }
  std::span<double> row(std::size_t j) noexcept {
    return {posteriors_.data() + j * cols_, cols_};
  }

  std::span<const double> log_normalizers() const noexcept { return log_normalizers_; }
  std::span<double> log_normalizers() noexcept { return log_normalizers_; }

  /// Sum of the log normalizers: the observed-data log-likelihood.
  double log_likelihood() const noexcept;

  /// Index of the largest posterior in each row (lowest index on ties).
  std::vector<std::size_t> hard_labels() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> posteriors_;
  std::vector<double> log_normalizers_;
};

/// Initial cluster count and pruning threshold.
struct InitialCount {
  std::size_t l = 0;     ///< ceil((4 / w_min) ln(2 / (delta w_min)))
  double raw = 0.0;      ///< the formula before rounding up
  double w_T = 0.0;      ///< 1 / (4 l)
};

InitialCount choose_l(double w_min, double delta);

/// Smallest noise level admitted by estimate_q0.
inline constexpr double kQFloor = 1e-6;

struct NoiseEstimate {
  double q0 = 0.0;
  double v = 0.0;  ///< min pairwise distance / (2n)
  std::string warning;  ///< non-empty when q0 was clamped to 0.5 or floored
};

/// Root q0 <= 1/2 of q0 (1 - q0) = min_{i<j} D(T_i, T_j) / (2n).
/// No real root (v > 1/4) clamps to 0.5; v == 0 gives kQFloor.
NoiseEstimate estimate_q0(std::span<const BinaryVector> initial_templates);
/// Same rule applied to a precomputed v.
NoiseEstimate q0_from_ratio(double v);

/// Posteriors under a mixture of Bernoulli templates with noise q in (0, 1/2]:
/// log f_i(x) = D ln q + (n - D) ln(1 - q), normalized with a max shift.
SoftAssignment e_step(std::span<const BinaryVector> examples,
                      std::span<const BinaryVector> templates,
                      std::span<const double> weights, double q);
/// Real-valued templates use the l1 distance in the exponent.
SoftAssignment e_step(std::span<const BinaryVector> examples,
                      std::span<const RealVector> templates,
                      std::span<const double> weights, double q);

struct MStepResult {
  std::vector<double> weights;
  std::vector<RealVector> templates;
  std::vector<bool> empty;  ///< m w_i < 1e-12; template kept from `previous`
};

/// Column means of the posteriors and posterior-weighted means of the
/// examples. A column with total mass below 1e-12 keeps previous[i].
MStepResult m_step(std::span<const BinaryVector> examples,
                   const SoftAssignment& assignment,
                   std::span<const RealVector> previous);

/// Indices (in order) of templates with weight >= w_T.
/// Throws AllClustersStarved when nothing survives.
std::vector<std::size_t> prune_by_weight(std::span<const double> weights, double w_T);

/// Greedy farthest-first traversal over `templates` starting at index
/// `start`: repeatedly adds the candidate whose minimum l1 distance to the
/// selected set is largest (lowest index on ties). Returns k indices in
/// selection order; TooFewClusters when templates.size() < k.
std::vector<std::size_t> farthest_first_select(std::span<const RealVector> templates,
                                               std::size_t k, std::size_t start);

struct FitDiagnostics {
  std::size_t l = 0;
  double w_T = 0.0;
  std::vector<std::size_t> initial_indices;  ///< examples used as T^(0)
  std::vector<double> round1_weights;        ///< w^(1), one per initial template
  std::vector<std::size_t> pruned_indices;   ///< removed for w^(1) < w_T
  std::vector<std::size_t> survivors;        ///< kept by the weight threshold
  std::vector<std::size_t> selection_order;  ///< farthest-first picks (indices into T^(1))
  std::size_t iterations = 0;                ///< E/M pairs executed
  std::size_t restart = 0;                   ///< winning restart (standard EM)
  double wall_ms = 0.0;
  std::vector<std::string> warnings;
};

struct FitResult {
  std::vector<RealVector> templates_real;  ///< final estimates before rounding
  std::vector<BinaryVector> templates;     ///< rounded
  std::vector<double> weights;
  double q0 = 0.0;                         ///< noise level used by the fit
  std::vector<std::size_t> labels;         ///< argmax of the final posteriors
  double log_likelihood = 0.0;             ///< of the rounded model, see log_likelihood()
  FitDiagnostics diagnostics;
};

struct TwoRoundOptions {
  /// Total E/M rounds; 2 is the plain algorithm, r > 2 adds r - 2 rounds
  /// after the second M-step before rounding.
  std::size_t rounds = 2;
  /// Start farthest-first selection from the heaviest survivor instead of a
  /// random one.
  bool deterministic_prune = false;
  /// Round T^(1) to binary before the second E-step.
  bool round1_binarize = false;
};

/// Two-round EM with over-seeding, starvation pruning and farthest-first
/// selection. Deterministic given (examples, seed).
FitResult two_round_em(std::span<const BinaryVector> examples, std::size_t k,
                       double w_min, double delta, std::uint64_t seed,
                       const TwoRoundOptions& options = {});

struct StandardOptions {
  std::size_t iterations = 2;
  std::size_t restarts = 1;
  /// E-steps use rounded templates (classical EM for binary templates).
  bool binarize = false;
};

/// k random examples as initial templates, equal weights, `iterations` E/M
/// pairs with the known noise level; best log-likelihood over restarts.
FitResult standard_em(std::span<const BinaryVector> examples, std::size_t k,
                      double q_known, std::uint64_t seed,
                      const StandardOptions& options = {});

/// sum_j log sum_i w_i q^D_ij (1 - q)^(n - D_ij), via log-sum-exp.
double log_likelihood(std::span<const BinaryVector> examples,
                      std::span<const BinaryVector> templates,
                      std::span<const double> weights, double q);
double log_likelihood(std::span<const BinaryVector> examples,
                      std::span<const RealVector> templates,
                      std::span<const double> weights, double q);

}  // namespace btem::em
