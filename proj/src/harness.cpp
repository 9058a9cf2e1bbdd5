#include "btem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "btem/error.hpp"
#include "btem/metrics.hpp"
#include "btem/rng.hpp"

namespace btem::harness {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kParamNames[] = {"n", "m", "k", "q", "c", "w_min", "delta", "epsilon"};

// 1-based line of the first occurrence of `"key"` in the text, 0 if absent.
std::size_t line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

[[noreturn]] void config_error(const std::string& text, const std::string& key,
                               const std::string& message) {
  const auto line = line_of(text, key);
  throw ConfigError(line ? "config line " + std::to_string(line) + ": " + message
                         : "config: " + message);
}

void reject_unknown(const std::string& text, const json& obj,
                    std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) config_error(text, key, "unknown key '" + key + "' in " + where);
  }
}

double number_at(const std::string& text, const json& v, const std::string& key) {
  if (!v.is_number()) config_error(text, key, "'" + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> axis_values(const std::string& text, const std::string& key, const json& v) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(number_at(text, x, key));
  } else if (v.is_object()) {
    reject_unknown(text, v, {"from", "to", "step"}, "grid axis '" + key + "'");
    if (!v.contains("from") || !v.contains("to") || !v.contains("step"))
      config_error(text, key, "range axis '" + key + "' needs from, to and step");
    const double from = number_at(text, v["from"], key);
    const double to = number_at(text, v["to"], key);
    const double step = number_at(text, v["step"], key);
    if (!(step > 0.0) || to < from) config_error(text, key, "invalid range for '" + key + "'");
    // Index-based so accumulated rounding never drops the last value.
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(from + static_cast<double>(i) * step);
  } else {
    config_error(text, key, "grid axis '" + key + "' must be an array or a range object");
  }
  if (out.empty()) config_error(text, key, "grid axis '" + key + "' is empty");
  return out;
}

AlgorithmSpec parse_algorithm(const std::string& text, const json& v) {
  AlgorithmSpec a;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "two-round") return a;
    if (s == "standard") {
      a.kind = AlgorithmSpec::Kind::Standard;
      return a;
    }
    config_error(text, s, "unknown algorithm '" + s + "'");
  }
  if (!v.is_object() || !v.contains("type") || !v["type"].is_string())
    config_error(text, "algorithms", "algorithm entries need a string 'type'");
  const auto type = v["type"].get<std::string>();
  auto flag = [&](const char* key, bool& out) {
    if (!v.contains(key)) return;
    if (!v[key].is_boolean()) config_error(text, key, std::string("'") + key + "' must be boolean");
    out = v[key].get<bool>();
  };
  auto count = [&](const char* key, std::size_t& out) {
    if (!v.contains(key)) return;
    if (!v[key].is_number_integer() || v[key].get<long long>() < 1)
      config_error(text, key, std::string("'") + key + "' must be a positive integer");
    out = v[key].get<std::size_t>();
  };
  if (type == "two-round") {
    reject_unknown(text, v, {"type", "rounds", "deterministic_prune", "round1_binarize"},
                   "two-round algorithm");
    count("rounds", a.two_round.rounds);
    if (a.two_round.rounds < 2) config_error(text, "rounds", "'rounds' must be at least 2");
    flag("deterministic_prune", a.two_round.deterministic_prune);
    flag("round1_binarize", a.two_round.round1_binarize);
  } else if (type == "standard") {
    a.kind = AlgorithmSpec::Kind::Standard;
    reject_unknown(text, v, {"type", "iterations", "restarts", "binarize"}, "standard algorithm");
    count("iterations", a.standard.iterations);
    count("restarts", a.standard.restarts);
    flag("binarize", a.standard.binarize);
  } else {
    config_error(text, type, "unknown algorithm type '" + type + "'");
  }
  return a;
}

std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct Summary {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std = std::numeric_limits<double>::quiet_NaN();
};

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return s;
}

bool theory_flag(const theory::TheoryParams& p) {
  try {
    return theory::theorem1_conditions(p).theorem_ok;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::string AlgorithmSpec::id() const {
  std::string out;
  if (kind == Kind::TwoRound) {
    out = "two-round";
    if (two_round.rounds != 2) out += "-r" + std::to_string(two_round.rounds);
    if (two_round.deterministic_prune) out += "-det";
    if (two_round.round1_binarize) out += "-bin";
  } else {
    out = "standard-i" + std::to_string(standard.iterations) + "-r" +
          std::to_string(standard.restarts);
    if (standard.binarize) out += "-bin";
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n');
    throw ConfigError("config line " + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config line 1: top level must be an object");
  reject_unknown(text, doc,
                 {"name", "fixed", "grid", "algorithms", "trials", "seed", "success",
                  "templates", "timing", "output"},
                 "config");

  ExperimentConfig cfg;
  std::set<std::string> defined;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) config_error(text, "name", "'name' must be a string");
    cfg.name = doc["name"].get<std::string>();
  }
  if (doc.contains("fixed")) {
    const auto& fixed = doc["fixed"];
    if (!fixed.is_object()) config_error(text, "fixed", "'fixed' must be an object");
    for (const auto& [key, value] : fixed.items()) {
      if (std::find(std::begin(kParamNames), std::end(kParamNames), key) == std::end(kParamNames))
        config_error(text, key, "unknown parameter '" + key + "'");
      theory::set_param(cfg.fixed, key, number_at(text, value, key));
      defined.insert(key);
    }
  }
  if (doc.contains("grid")) {
    const auto& grid = doc["grid"];
    if (!grid.is_object()) config_error(text, "grid", "'grid' must be an object");
    for (const auto& [key, value] : grid.items()) {
      if (std::find(std::begin(kParamNames), std::end(kParamNames), key) == std::end(kParamNames))
        config_error(text, key, "unknown parameter '" + key + "'");
      if (!defined.insert(key).second)
        config_error(text, key, "parameter '" + key + "' defined more than once");
      cfg.grid.emplace_back(key, axis_values(text, key, value));
    }
  }
  // delta and epsilon default to 0.1; everything else must be given.
  for (const char* name : kParamNames) {
    if (defined.count(name)) continue;
    if (std::string(name) == "delta" || std::string(name) == "epsilon") continue;
    throw ConfigError(std::string("config: parameter '") + name + "' is not defined");
  }

  if (doc.contains("algorithms")) {
    const auto& algos = doc["algorithms"];
    if (!algos.is_array() || algos.empty())
      config_error(text, "algorithms", "'algorithms' must be a non-empty array");
    for (const auto& a : algos) cfg.algorithms.push_back(parse_algorithm(text, a));
  } else {
    cfg.algorithms.emplace_back();
  }
  if (doc.contains("trials")) {
    const auto& t = doc["trials"];
    if (!t.is_number_integer() || t.get<long long>() < 1)
      config_error(text, "trials", "'trials' must be a positive integer");
    cfg.trials = t.get<std::size_t>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      config_error(text, "seed", "'seed' must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("success")) {
    const auto& s = doc["success"];
    if (s.is_string() && s.get<std::string>() == "exact-recovery") {
      cfg.success.kind = SuccessCriterion::Kind::ExactRecovery;
    } else if (s.is_object()) {
      reject_unknown(text, s, {"purity"}, "success");
      if (!s.contains("purity")) config_error(text, "success", "'success' object needs 'purity'");
      cfg.success.kind = SuccessCriterion::Kind::Purity;
      cfg.success.threshold = number_at(text, s["purity"], "purity");
      if (!(cfg.success.threshold > 0.0 && cfg.success.threshold <= 1.0))
        config_error(text, "purity", "purity threshold must lie in (0, 1]");
    } else {
      config_error(text, "success", "'success' must be \"exact-recovery\" or {\"purity\": t}");
    }
  }
  if (doc.contains("templates")) {
    const auto& t = doc["templates"];
    if (t == "line") cfg.templates = TemplateKind::Line;
    else if (t == "random") cfg.templates = TemplateKind::Random;
    else config_error(text, "templates", "'templates' must be \"line\" or \"random\"");
  }
  if (doc.contains("timing")) {
    if (!doc["timing"].is_boolean()) config_error(text, "timing", "'timing' must be boolean");
    cfg.record_timing = doc["timing"].get<bool>();
  }
  if (doc.contains("output")) {
    const auto& out = doc["output"];
    if (!out.is_object()) config_error(text, "output", "'output' must be an object");
    reject_unknown(text, out, {"csv", "svg", "chart_x", "chart_y"}, "output");
    auto str = [&](const char* key, std::string& dst) {
      if (!out.contains(key)) return;
      if (!out[key].is_string()) config_error(text, key, std::string("'") + key + "' must be a string");
      dst = out[key].get<std::string>();
    };
    str("csv", cfg.csv);
    str("svg", cfg.svg);
    str("chart_x", cfg.chart_x);
    str("chart_y", cfg.chart_y);
    for (const auto* axis : {&cfg.chart_x, &cfg.chart_y})
      if (!axis->empty() &&
          std::none_of(cfg.grid.begin(), cfg.grid.end(),
                       [&](const auto& g) { return g.first == *axis; }))
        config_error(text, *axis, "chart axis '" + *axis + "' is not a grid axis");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::uint64_t point_seed(std::uint64_t master, const theory::TheoryParams& p) {
  std::uint64_t s = master;
  for (const char* name : kParamNames)
    s = derive_seed(s, std::bit_cast<std::uint64_t>(theory::get_param(p, name)));
  return s;
}

MixtureModel build_model(const theory::TheoryParams& p, TemplateKind kind, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(p.n);
  const auto k = static_cast<std::size_t>(p.k);
  MixtureModel model;
  if (kind == TemplateKind::Line && k == 2)
    model.templates = make_line_templates(n, p.c);
  else
    model.templates = make_random_templates(n, k, p.c, seed);
  model.weights = weights_with_minimum(k, p.w_min);
  model.q = p.q;
  return model;
}

TrialRecord run_trial(const theory::TheoryParams& p, const AlgorithmSpec& algo,
                      const SuccessCriterion& success, TemplateKind templates,
                      std::uint64_t master_seed, std::size_t trial) {
  const auto trial_seed = derive_seed(point_seed(master_seed, p), trial);
  const auto model = build_model(p, templates, derive_seed(trial_seed, 2));
  const auto data = sample_dataset(model, static_cast<std::size_t>(p.m), derive_seed(trial_seed, 0));
  const auto algo_seed = derive_seed(trial_seed, 1);
  const auto k = static_cast<std::size_t>(p.k);

  TrialRecord rec;
  em::FitResult fit;
  try {
    if (algo.kind == AlgorithmSpec::Kind::TwoRound)
      fit = em::two_round_em(data.examples, k, p.w_min, p.delta, algo_seed, algo.two_round);
    else
      fit = em::standard_em(data.examples, k, std::max(p.q, em::kQFloor), algo_seed,
                            algo.standard);
  } catch (const AllClustersStarved& e) {
    rec.failure = e.what();
    return rec;
  } catch (const TooFewClusters& e) {
    rec.failure = e.what();
    return rec;
  } catch (const InsufficientData& e) {
    rec.failure = e.what();
    return rec;
  }
  rec.fit_ok = true;
  const auto ev = metrics::evaluate(fit.templates, fit.labels, fit.log_likelihood, data,
                                    model.templates);
  rec.purity = ev.purity;
  rec.entropy = ev.entropy;
  rec.log_likelihood = ev.log_likelihood;
  rec.total_error = ev.match.total_error;
  rec.wall_ms = fit.diagnostics.wall_ms;
  rec.success = success.kind == SuccessCriterion::Kind::ExactRecovery
                    ? ev.exact_recovery
                    : ev.purity >= success.threshold;
  return rec;
}

std::vector<theory::TheoryParams> grid_points(const ExperimentConfig& config) {
  std::vector<theory::TheoryParams> points{config.fixed};
  for (const auto& [axis, values] : config.grid) {
    std::vector<theory::TheoryParams> next;
    next.reserve(points.size() * values.size());
    for (const auto& base : points)
      for (double v : values) {
        auto p = base;
        theory::set_param(p, axis, v);
        next.push_back(p);
      }
    points = std::move(next);
  }
  return points;
}

std::vector<SweepRecord> sweep_grid(const ExperimentConfig& config, std::size_t threads) {
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  const auto points = grid_points(config);
  const std::size_t per_point = config.algorithms.size() * config.trials;
  const std::size_t total = points.size() * per_point;
  std::vector<TrialRecord> results(total);

  // Task t = (point, algorithm, trial) in row-major order; every task writes
  // only its own slot, so the aggregate is independent of scheduling.
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t t = next.fetch_add(1); t < total && !failed; t = next.fetch_add(1)) {
      const auto point = t / per_point;
      const auto algo = (t % per_point) / config.trials;
      const auto trial = t % config.trials;
      try {
        results[t] = run_trial(points[point], config.algorithms[algo], config.success,
                               config.templates, config.seed, trial);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<SweepRecord> records;
  records.reserve(points.size() * config.algorithms.size());
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const bool ok = theory_flag(points[pi]);
    for (std::size_t ai = 0; ai < config.algorithms.size(); ++ai) {
      SweepRecord r;
      r.algo = config.algorithms[ai].id();
      r.params = points[pi];
      r.trials = config.trials;
      r.theory_ok = ok;
      std::vector<double> purity, entropy, loglik, wall;
      for (std::size_t ti = 0; ti < config.trials; ++ti) {
        const auto& t = results[pi * per_point + ai * config.trials + ti];
        if (t.success) ++r.successes;
        if (!t.fit_ok) continue;
        purity.push_back(t.purity);
        entropy.push_back(t.entropy);
        loglik.push_back(t.log_likelihood);
        wall.push_back(t.wall_ms);
      }
      r.success_rate = static_cast<double>(r.successes) / static_cast<double>(r.trials);
      const auto sp = summarize(purity), se = summarize(entropy), sl = summarize(loglik);
      r.purity_mean = sp.mean, r.purity_std = sp.std;
      r.entropy_mean = se.mean, r.entropy_std = se.std;
      r.loglik_mean = sl.mean, r.loglik_std = sl.std;
      r.wall_ms_mean = config.record_timing ? summarize(wall).mean
                                            : std::numeric_limits<double>::quiet_NaN();
      records.push_back(std::move(r));
    }
  }
  return records;
}

std::size_t threads_from_env(std::size_t fallback) {
  const char* env = std::getenv("BTEM_THREADS");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) return fallback;
  return static_cast<std::size_t>(v);
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    const auto& p = r.params;
    out << r.algo << ',' << fmt9(p.n) << ',' << fmt9(p.m) << ',' << fmt9(p.k) << ','
        << fmt9(p.q) << ',' << fmt9(p.c) << ',' << fmt9(p.w_min) << ',' << fmt9(p.delta)
        << ',' << fmt9(p.epsilon) << ',' << r.trials << ',' << r.successes << ','
        << fmt9(r.success_rate) << ',' << fmt9(r.purity_mean) << ',' << fmt9(r.purity_std)
        << ',' << fmt9(r.entropy_mean) << ',' << fmt9(r.entropy_std) << ','
        << fmt9(r.loglik_mean) << ',' << fmt9(r.loglik_std) << ',' << (r.theory_ok ? 1 : 0)
        << ',' << fmt9(r.wall_ms_mean) << '\n';
  }
}

void write_csv(const std::string& path, const std::vector<SweepRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_csv(out, records);
}

std::vector<SweepRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw DataError("csv: unexpected header");
  std::vector<SweepRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 20)
      throw DataError("csv line " + std::to_string(line_no) + ": expected 20 columns");
    auto num = [&](std::size_t i) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[i], &used);
        if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
        return v;
      } catch (const std::exception&) {
        throw DataError("csv line " + std::to_string(line_no) + ": bad number '" + cells[i] + "'");
      }
    };
    SweepRecord r;
    r.algo = cells[0];
    r.params.n = num(1), r.params.m = num(2), r.params.k = num(3), r.params.q = num(4);
    r.params.c = num(5), r.params.w_min = num(6), r.params.delta = num(7), r.params.epsilon = num(8);
    r.trials = static_cast<std::size_t>(num(9));
    r.successes = static_cast<std::size_t>(num(10));
    r.success_rate = num(11);
    r.purity_mean = num(12), r.purity_std = num(13);
    r.entropy_mean = num(14), r.entropy_std = num(15);
    r.loglik_mean = num(16), r.loglik_std = num(17);
    r.theory_ok = num(18) != 0.0;
    r.wall_ms_mean = num(19);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_csv(in);
}

}  // namespace btem::harness
