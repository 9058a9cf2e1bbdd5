#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btem/core.hpp"
#include "btem/em.hpp"
#include "btem/sampler.hpp"
#include "btem/theory.hpp"

namespace btem::harness {

/// One algorithm to run at every grid point.
struct AlgorithmSpec {
  enum class Kind { TwoRound, Standard };
  Kind kind = Kind::TwoRound;
  em::TwoRoundOptions two_round;
  em::StandardOptions standard;

  /// CSV identifier: "two-round", "two-round-r10", "standard-i10-r5",
  /// suffixed with "-det"/"-bin" for the non-default switches.
  std::string id() const;
};

struct SuccessCriterion {
  enum class Kind { ExactRecovery, Purity };
  Kind kind = Kind::ExactRecovery;
  double threshold = 0.9;  ///< purity threshold for Kind::Purity
};

enum class TemplateKind { Line, Random };

/// A parsed sweep description. Every parameter of TheoryParams is either
/// fixed or a grid axis, never both.
struct ExperimentConfig {
  std::string name;
  theory::TheoryParams fixed;
  std::vector<std::pair<std::string, std::vector<double>>> grid;  ///< axis order = loop order
  std::vector<AlgorithmSpec> algorithms;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  SuccessCriterion success;
  TemplateKind templates = TemplateKind::Line;
  bool record_timing = false;
  std::string csv = "sweep.csv";
  std::string svg;      ///< optional chart file name
  std::string chart_x;  ///< x axis of the chart; first grid axis when empty
  std::string chart_y;  ///< when set, draws 90%-success frontiers over (x, y)
};

/// Parses the JSON schema documented in the README. Unknown keys, missing
/// parameters, duplicate definitions and trials == 0 raise ConfigError; the
/// message carries the line of the offending text.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Outcome of one seeded run at one grid point.
struct TrialRecord {
  bool success = false;
  bool fit_ok = false;         ///< false when the algorithm raised
  std::string failure;         ///< error message when !fit_ok
  double purity = 0.0;
  double entropy = 0.0;
  double log_likelihood = 0.0;
  double wall_ms = 0.0;
  std::size_t total_error = 0;
};

/// Seed of the grid point with these parameters. Depends on the values
/// only, so adding points to a grid leaves existing points unchanged.
std::uint64_t point_seed(std::uint64_t master, const theory::TheoryParams& p);

/// Ground truth used at a grid point: line templates for k == 2 (unless
/// random templates are requested), random templates of separation >= c
/// otherwise, weights (w_min, (1 - w_min)/(k-1), ...).
MixtureModel build_model(const theory::TheoryParams& p, TemplateKind kind,
                         std::uint64_t seed);

/// Samples a dataset, runs the algorithm and scores it. Algorithm errors
/// (starvation, too few clusters, too little data) count as failures.
TrialRecord run_trial(const theory::TheoryParams& p, const AlgorithmSpec& algo,
                      const SuccessCriterion& success, TemplateKind templates,
                      std::uint64_t master_seed, std::size_t trial);

struct SweepRecord {
  std::string algo;
  theory::TheoryParams params;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double purity_mean = 0.0, purity_std = 0.0;
  double entropy_mean = 0.0, entropy_std = 0.0;
  double loglik_mean = 0.0, loglik_std = 0.0;
  bool theory_ok = false;
  double wall_ms_mean = 0.0;  ///< NaN unless timing was recorded
};

/// All grid points of the config, in row-major order of the axes.
std::vector<theory::TheoryParams> grid_points(const ExperimentConfig& config);

/// Runs the full factorial sweep on `threads` workers. The result does not
/// depend on the worker count.
std::vector<SweepRecord> sweep_grid(const ExperimentConfig& config, std::size_t threads = 1);

/// Thread count from BTEM_THREADS when set and valid, else `fallback`.
std::size_t threads_from_env(std::size_t fallback);

/// Fixed column order, 9 significant digits.
inline constexpr const char* kCsvHeader =
    "algo,n,m,k,q,c,w_min,delta,epsilon,trials,successes,success_rate,"
    "purity_mean,purity_std,entropy_mean,entropy_std,loglik_mean,loglik_std,"
    "theory_ok,wall_ms_mean";

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);
void write_csv(const std::string& path, const std::vector<SweepRecord>& records);
std::vector<SweepRecord> read_csv(std::istream& in);
std::vector<SweepRecord> read_csv(const std::string& path);

}  // namespace btem::harness
