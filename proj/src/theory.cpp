#include "btem/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "btem/em.hpp"
#include "btem/error.hpp"

namespace btem::theory {

namespace {

constexpr double kHuge = std::numeric_limits<double>::max();

Clause make_clause(std::string name, double lhs, double bound, bool strict) {
  Clause c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.bound = bound;
  c.slack = lhs - bound;
  c.ok = strict ? lhs > bound : lhs >= bound;
  return c;
}

// sqrt(6ql/n), shared by several clauses.
double spread(const TheoryParams& p, double l) { return std::sqrt(6.0 * p.q * l / p.n); }

std::vector<Clause> technical_with(const TheoryParams& p, double l, double B) {
  const double s = 1.0 - 2.0 * p.q;
  std::vector<Clause> out;
  out.push_back(make_clause(
      "C1", p.n * p.c,
      std::log(16.0 * l / std::min(6.0 * p.n * p.q, 1.0)) / (B * s), true));
  out.push_back(make_clause("C2", p.m, std::max(16.0 * std::log(p.n), 8.0 * l), true));
  out.push_back(make_clause(
      "C3", p.c,
      std::max(1.0, 2.0 / (3.0 * s)) * (4.0 * p.q + 8.0 * spread(p, l)), true));
  return out;
}

bool all_ok(const std::vector<Clause>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Clause& c) { return c.ok; });
}

}  // namespace

void TheoryParams::validate() const {
  if (!(n >= 1)) throw ParameterError("n must be a positive integer");
  if (!(m >= 1)) throw ParameterError("m must be a positive integer");
  if (!(k >= 1)) throw ParameterError("k must be a positive integer");
  if (!(q > 0.0 && q < 0.5)) throw ParameterError("q must lie in (0, 1/2)");
  if (!(c >= 0.0 && c <= 1.0)) throw ParameterError("c must lie in [0, 1]");
  if (!(w_min > 0.0 && w_min <= 1.0)) throw ParameterError("w_min must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
}

void set_param(TheoryParams& p, std::string_view name, double value) {
  if (name == "n") p.n = std::round(value);
  else if (name == "m") p.m = std::round(value);
  else if (name == "k") p.k = std::round(value);
  else if (name == "q") p.q = value;
  else if (name == "c") p.c = value;
  else if (name == "w_min") p.w_min = value;
  else if (name == "delta") p.delta = value;
  else if (name == "epsilon") p.epsilon = value;
  else throw ParameterError("unknown parameter '" + std::string(name) + "'");
}

double get_param(const TheoryParams& p, std::string_view name) {
  if (name == "n") return p.n;
  if (name == "m") return p.m;
  if (name == "k") return p.k;
  if (name == "q") return p.q;
  if (name == "c") return p.c;
  if (name == "w_min") return p.w_min;
  if (name == "delta") return p.delta;
  if (name == "epsilon") return p.epsilon;
  throw ParameterError("unknown parameter '" + std::string(name) + "'");
}

const Clause* ConditionReport::find(std::string_view name) const {
  for (const auto* list : {&theorem, &technical})
    for (const auto& c : *list)
      if (c.name == name) return &c;
  return nullptr;
}

double compute_B(double q) {
  if (!(q > 0.0 && q < 0.5)) throw ParameterError("q must lie in (0, 1/2)");
  const double arg = (1.0 - q) * (4.0 * q + std::sqrt(q));
  if (arg >= 1.0)
    throw NonpositiveB("B <= 0 at q = " + std::to_string(q) +
                       ": noise too large for the recovery guarantee");
  return 0.5 * (1.0 - 2.0 * q) * std::log(1.0 / arg);
}

double compute_E(double q, double c, double l, double n) {
  const double s = 1.0 - 2.0 * q;
  const double rq = std::sqrt(q);
  const double second = c * s * s / 2.0 / (c * s * s + 2.0 * (1.0 - q) * (q + rq));
  const double third = (3.0 * c * s / 4.0 - 2.0 * q - 4.0 * std::sqrt(6.0 * q * l / n)) /
                       (c * s + q + rq);
  return std::min({0.25, second, third});
}

std::vector<Clause> technical_conditions(const TheoryParams& p) {
  p.validate();
  const double l = static_cast<double>(em::choose_l(p.w_min, p.delta).l);
  return technical_with(p, l, compute_B(p.q));
}

ConditionReport theorem1_conditions(const TheoryParams& p) {
  p.validate();
  ConditionReport r;
  const auto count = em::choose_l(p.w_min, p.delta);
  const double l = static_cast<double>(count.l);
  r.l = l;
  r.w_T = count.w_T;

  try {
    r.B = compute_B(p.q);
  } catch (const NonpositiveB& e) {
    r.reason = e.what();
    for (const char* name : {"cond1", "cond2", "cond3", "cond4"})
      r.theorem.push_back(make_clause(name, 0.0, kHuge, true));
    for (const char* name : {"C1", "C2", "C3"})
      r.technical.push_back(make_clause(name, 0.0, kHuge, true));
    return r;
  }
  r.E = compute_E(p.q, p.c, l, p.n);
  const double s = 1.0 - 2.0 * p.q;

  // Condition 1 fixes l; it holds by construction once l is rounded up.
  r.theorem.push_back(make_clause("cond1", l, count.raw, false));

  r.theorem.push_back(make_clause(
      "cond2", p.m,
      std::max({8.0 * l, 16.0 * std::log(p.n), 8.0 / p.w_min * std::log(12.0 * p.k / p.delta)}),
      false));

  const double sep1 = 4.0 / (p.n * r.B) * std::log(5.0 * p.n / (p.epsilon * p.w_min));
  const double sep2 = std::max(3.0 * s, 2.0) / (3.0 * s) * (4.0 * p.q + 8.0 * spread(p, l));
  const double sep3 = std::log(16.0 * l / std::min(6.0 * p.n * p.q, 1.0)) / (p.n * r.B * s);
  r.theorem.push_back(make_clause("cond3", p.c, std::max({sep1, sep2, sep3}), true));

  // The printed max(., ., ) has a trailing comma; it is the two-term max.
  const double dim1 =
      r.E > 0.0 ? 3.0 / (std::min(p.c, 0.5) * r.E * r.E) *
                      std::log(12.0 * (p.m + 1.0) * (p.m + 1.0) / p.delta)
                : kHuge;
  r.theorem.push_back(make_clause("cond4", p.n, std::max(dim1, 6.0 * p.k / p.delta), true));

  r.technical = technical_with(p, l, r.B);
  r.theorem_ok = all_ok(r.theorem);
  r.technical_ok = all_ok(r.technical);
  return r;
}

bool conditions_hold(const ConditionReport& r, std::string_view which) {
  if (which == "theorem") return r.theorem_ok;
  if (which == "technical") return r.technical_ok;
  if (which == "all") return r.theorem_ok && r.technical_ok;
  if (const auto* c = r.find(which)) return c->ok;
  throw ParameterError("unknown condition selector '" + std::string(which) + "'");
}

std::vector<BoundaryPoint> domain_boundary(std::string_view x_axis,
                                           const std::vector<double>& x_grid,
                                           std::string_view y_axis,
                                           const std::vector<double>& y_grid,
                                           const TheoryParams& fixed,
                                           std::string_view which) {
  if (!std::is_sorted(x_grid.begin(), x_grid.end()) ||
      !std::is_sorted(y_grid.begin(), y_grid.end()))
    throw ParameterError("boundary grids must be sorted ascending");
  std::vector<BoundaryPoint> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    BoundaryPoint point{x, std::nullopt};
    for (double y : y_grid) {
      TheoryParams p = fixed;
      set_param(p, x_axis, x);
      set_param(p, y_axis, y);
      if (conditions_hold(theorem1_conditions(p), which)) {
        point.y = y;
        break;
      }
    }
    out.push_back(point);
  }
  return out;
}

}  // namespace btem::theory
