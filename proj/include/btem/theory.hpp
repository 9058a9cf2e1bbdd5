#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace btem::theory {

/// Problem constants entering the recovery guarantee.
struct TheoryParams {
  double n = 0;        ///< dimension
  double m = 0;        ///< number of examples
  double k = 0;        ///< number of templates
  double q = 0;        ///< noise level, (0, 1/2)
  double c = 0;        ///< separation, [0, 1]
  double w_min = 0;    ///< smallest mixture weight, (0, 1]
  double delta = 0.1;  ///< failure probability, (0, 1)
  double epsilon = 0.1;///< precision of the guarantee, (0, 1)

  /// Throws ParameterError when a field is out of range.
  void validate() const;
};

/// Sets a field by name ("n", "m", "k", "q", "c", "w_min", "delta",
/// "epsilon"); n, m and k are rounded to the nearest integer.
void set_param(TheoryParams& p, std::string_view name, double value);
double get_param(const TheoryParams& p, std::string_view name);

/// One inequality of the form lhs > bound (or >=).
struct Clause {
  std::string name;
  bool ok = false;
  double lhs = 0.0;
  double bound = 0.0;
  double slack = 0.0;  ///< lhs - bound
};

struct ConditionReport {
  double l = 0.0;    ///< initial cluster count used (rounded up)
  double w_T = 0.0;
  double B = 0.0;
  double E = 0.0;
  std::vector<Clause> theorem;    ///< cond1 .. cond4
  std::vector<Clause> technical;  ///< C1 .. C3
  bool theorem_ok = false;
  bool technical_ok = false;
  std::string reason;  ///< set when the theory does not apply (B <= 0)

  const Clause* find(std::string_view name) const;
};

/// (1/2)(1-2q) ln(1 / ((1-q)(4q + sqrt q))); NonpositiveB when the value
/// would be <= 0, which happens for q >= 0.2007842605...
double compute_B(double q);

/// min(1/4, c(1-2q)^2/2 / (c(1-2q)^2 + 2(1-q)(q + sqrt q)),
///     (3c(1-2q)/4 - 2q - 4 sqrt(6ql/n)) / (c(1-2q) + q + sqrt q)).
/// May be <= 0; callers treat that as a failed dimension condition.
double compute_E(double q, double c, double l, double n);

/// Evaluates the four conditions of the recovery guarantee and the three
/// technical conditions. A non-positive B yields an all-false report with
/// `reason` set instead of throwing.
ConditionReport theorem1_conditions(const TheoryParams& p);
/// Only the technical conditions C1-C3.
std::vector<Clause> technical_conditions(const TheoryParams& p);

/// True when every clause selected by `which` holds: "theorem", "technical",
/// "all", or a single clause name ("cond2", "C3", ...).
bool conditions_hold(const ConditionReport& r, std::string_view which);

struct BoundaryPoint {
  double x = 0.0;
  std::optional<double> y;  ///< smallest satisfying grid value; empty if none
};

/// For each value of `x_axis`, the smallest `y_axis` grid value at which the
/// selected conditions hold, found by scanning the whole y grid. `which` is
/// "theorem", "technical", "all" or a clause name.
std::vector<BoundaryPoint> domain_boundary(std::string_view x_axis,
                                           const std::vector<double>& x_grid,
                                           std::string_view y_axis,
                                           const std::vector<double>& y_grid,
                                           const TheoryParams& fixed,
                                           std::string_view which = "theorem");

}  // namespace btem::theory
