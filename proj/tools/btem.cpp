// Command-line front end: generate, fit, sweep, theory, render, metrics.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "btem/em.hpp"
#include "btem/error.hpp"
#include "btem/harness.hpp"
#include "btem/metrics.hpp"
#include "btem/sampler.hpp"
#include "btem/svg.hpp"
#include "btem/theory.hpp"

namespace {

using nlohmann::json;
using namespace btem;

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kInternal = 4 };

json clauses_json(const std::vector<theory::Clause>& cs) {
  json out = json::array();
  for (const auto& c : cs)
    out.push_back({{"name", c.name}, {"ok", c.ok}, {"lhs", c.lhs}, {"bound", c.bound},
                   {"slack", c.slack}});
  return out;
}

json report_json(const theory::ConditionReport& r) {
  json out{{"l", r.l},          {"w_T", r.w_T},
           {"B", r.B},          {"E", r.E},
           {"theorem", clauses_json(r.theorem)},
           {"technical", clauses_json(r.technical)},
           {"theorem_ok", r.theorem_ok},
           {"technical_ok", r.technical_ok}};
  if (!r.reason.empty()) out["reason"] = r.reason;
  return out;
}

// "n=4096,m=300,q=1e-4" -> fields of TheoryParams
theory::TheoryParams parse_params(const std::string& text) {
  theory::TheoryParams p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--params entries must look like name=value");
    double value = 0.0;
    try {
      value = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad value in --params entry '" + item + "'");
    }
    try {
      theory::set_param(p, item.substr(0, eq), value);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }
  return p;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list");
    }
  }
  return out;
}

std::vector<std::size_t> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::size_t> out;
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw DataError(path + ": bad label '" + tok + "'");
    }
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Two-round EM for mixtures of Bernoulli templates"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a labeled dataset to a file");
  std::size_t g_n = 1000, g_m = 300, g_k = 2;
  double g_q = 0.1, g_c = 0.5, g_wmin = 0.5;
  std::uint64_t g_seed = 1;
  std::string g_templates = "line", g_out, g_truth;
  gen->add_option("--n", g_n, "dimension")->capture_default_str();
  gen->add_option("--m", g_m, "number of examples")->capture_default_str();
  gen->add_option("--k", g_k, "number of templates")->capture_default_str();
  gen->add_option("--q", g_q, "noise level")->capture_default_str();
  gen->add_option("--c", g_c, "separation")->capture_default_str();
  gen->add_option("--w-min", g_wmin, "smallest mixture weight")->capture_default_str();
  gen->add_option("--templates", g_templates, "line | random")->capture_default_str();
  gen->add_option("--seed", g_seed)->capture_default_str();
  gen->add_option("--out", g_out, "dataset file")->required();
  gen->add_option("--truth-out", g_truth, "write the true templates, one hex line each");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit templates to a dataset file; prints JSON");
  std::string f_data, f_algo = "two-round", f_out;
  std::size_t f_k = 2, f_iterations = 2, f_restarts = 1, f_rounds = 2;
  double f_wmin = 0.5, f_delta = 0.1, f_q = 0.1;
  std::uint64_t f_seed = 1;
  bool f_det = false, f_bin = false;
  fit->add_option("--data", f_data, "dataset file")->required();
  fit->add_option("--algo", f_algo, "two-round | standard")
      ->check(CLI::IsMember({"two-round", "standard"}))
      ->capture_default_str();
  fit->add_option("--k", f_k)->capture_default_str();
  fit->add_option("--w-min", f_wmin, "two-round: assumed minimum weight")->capture_default_str();
  fit->add_option("--delta", f_delta, "two-round: confidence level")->capture_default_str();
  fit->add_option("--rounds", f_rounds, "two-round: total E/M rounds")->capture_default_str();
  fit->add_option("--q", f_q, "standard: known noise level")->capture_default_str();
  fit->add_option("--iterations", f_iterations, "standard: E/M pairs")->capture_default_str();
  fit->add_option("--restarts", f_restarts, "standard: random restarts")->capture_default_str();
  fit->add_option("--seed", f_seed)->capture_default_str();
  fit->add_flag("--deterministic-prune", f_det, "start farthest-first at the heaviest survivor");
  fit->add_flag("--round1-binarize", f_bin, "round templates before the second E-step");
  fit->add_option("--out", f_out, "write JSON here instead of stdout");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config");
  std::string s_config, s_out = ".";
  std::size_t s_threads = 1;
  sweep->add_option("--config", s_config)->required();
  sweep->add_option("--out", s_out, "output directory")->capture_default_str();
  sweep->add_option("--threads", s_threads, "worker threads (BTEM_THREADS overrides)")
      ->capture_default_str();

  // theory
  auto* th = app.add_subcommand("theory", "Evaluate the recovery conditions; prints JSON");
  std::string t_params, t_x, t_y, t_xs, t_ys, t_which = "theorem";
  th->add_option("--params", t_params, "comma list, e.g. n=4096,m=300,k=2,q=1e-4,c=1,w_min=0.5")
      ->required();
  th->add_option("--x", t_x, "boundary scan: x axis parameter");
  th->add_option("--xs", t_xs, "boundary scan: comma list of x values");
  th->add_option("--y", t_y, "boundary scan: y axis parameter");
  th->add_option("--ys", t_ys, "boundary scan: comma list of y values (ascending)");
  th->add_option("--which", t_which, "theorem | technical | all | clause name")
      ->capture_default_str();

  // render
  auto* ren = app.add_subcommand("render", "Draw a sketch template as SVG");
  std::string r_hex, r_data, r_out;
  std::size_t r_index = 0, r_grid = 9, r_alphabet = 18;
  ren->add_option("--hex", r_hex, "template as hex");
  ren->add_option("--data", r_data, "take the template from a dataset file");
  ren->add_option("--index", r_index, "example index in --data")->capture_default_str();
  ren->add_option("--grid", r_grid)->capture_default_str();
  ren->add_option("--alphabet", r_alphabet)->capture_default_str();
  ren->add_option("--out", r_out, "SVG file")->required();

  // metrics
  auto* met = app.add_subcommand("metrics", "Conditional purity and entropy of a clustering");
  std::string m_pred, m_truth;
  met->add_option("--pred", m_pred, "cluster labels, whitespace separated")->required();
  met->add_option("--truth", m_truth, "true labels, whitespace separated")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (gen->parsed()) {
    theory::TheoryParams p;
    p.n = static_cast<double>(g_n), p.m = static_cast<double>(g_m), p.k = static_cast<double>(g_k);
    p.q = g_q, p.c = g_c, p.w_min = g_wmin;
    if (g_templates != "random" && g_templates != "line")
      throw ConfigError("--templates must be line or random");
    const auto kind = g_templates == "random" ? harness::TemplateKind::Random
                                              : harness::TemplateKind::Line;
    const auto model = harness::build_model(p, kind, derive_seed(g_seed, 2));
    const auto data = sample_dataset(model, g_m, derive_seed(g_seed, 0));
    write_dataset(g_out, data);
    if (!g_truth.empty()) {
      std::ofstream out(g_truth);
      if (!out) throw DataError("cannot open " + g_truth);
      for (const auto& t : model.templates) out << t.to_hex() << '\n';
    }
    return kOk;
  }

  if (fit->parsed()) {
    const auto data = read_dataset(f_data);
    em::FitResult result;
    if (f_algo == "two-round") {
      em::TwoRoundOptions opt;
      opt.rounds = f_rounds;
      opt.deterministic_prune = f_det;
      opt.round1_binarize = f_bin;
      result = em::two_round_em(data.examples, f_k, f_wmin, f_delta, f_seed, opt);
    } else {
      em::StandardOptions opt;
      opt.iterations = f_iterations;
      opt.restarts = f_restarts;
      result = em::standard_em(data.examples, f_k, f_q, f_seed, opt);
    }
    json out;
    out["algo"] = f_algo;
    out["q0"] = result.q0;
    out["weights"] = result.weights;
    out["log_likelihood"] = result.log_likelihood;
    out["templates"] = json::array();
    for (const auto& t : result.templates) out["templates"].push_back(t.to_hex());
    out["labels"] = result.labels;
    const auto& d = result.diagnostics;
    out["diagnostics"] = {{"l", d.l},
                          {"w_T", d.w_T},
                          {"initial_indices", d.initial_indices},
                          {"round1_weights", d.round1_weights},
                          {"pruned_indices", d.pruned_indices},
                          {"selection_order", d.selection_order},
                          {"iterations", d.iterations},
                          {"restart", d.restart},
                          {"wall_ms", d.wall_ms},
                          {"warnings", d.warnings}};
    out["purity"] = metrics::conditional_purity(data.labels, result.labels);
    out["entropy"] = metrics::conditional_entropy(data.labels, result.labels);
    if (f_out.empty()) {
      std::cout << out.dump(2) << '\n';
    } else {
      std::ofstream f(f_out);
      if (!f) throw DataError("cannot open " + f_out);
      f << out.dump(2) << '\n';
    }
    return kOk;
  }

  if (sweep->parsed()) {
    const auto config = harness::parse_config(s_config);
    const auto threads = harness::threads_from_env(s_threads);
    const auto records = harness::sweep_grid(config, threads);
    std::filesystem::create_directories(s_out);
    const auto dir = std::filesystem::path(s_out);
    harness::write_csv((dir / config.csv).string(), records);
    if (!config.svg.empty()) {
      std::ofstream svg_out(dir / config.svg);
      if (!svg_out) throw DataError("cannot open " + (dir / config.svg).string());
      const auto x = config.chart_x.empty()
                         ? (config.grid.empty() ? std::string("m") : config.grid.front().first)
                         : config.chart_x;
      if (config.chart_y.empty())
        svg::write_rate_chart(svg_out, records, x);
      else
        svg::write_frontier_chart(svg_out, records, x, config.chart_y, 0.9);
    }
    std::cerr << records.size() << " records written to " << (dir / config.csv).string() << '\n';
    return kOk;
  }

  if (th->parsed()) {
    const auto p = parse_params(t_params);
    try {
      p.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    json out = report_json(theory::theorem1_conditions(p));
    if (!t_x.empty() || !t_y.empty()) {
      if (t_x.empty() || t_y.empty() || t_xs.empty() || t_ys.empty())
        throw ConfigError("boundary scan needs --x, --xs, --y and --ys");
      json curve = json::array();
      for (const auto& pt : theory::domain_boundary(t_x, parse_list(t_xs), t_y, parse_list(t_ys), p,
                                                    t_which))
        curve.push_back({{"x", pt.x}, {"y", pt.y ? json(*pt.y) : json(nullptr)}});
      out["boundary"] = {{"x", t_x}, {"y", t_y}, {"which", t_which}, {"points", curve}};
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
  }

  if (ren->parsed()) {
    BinaryVector sketch;
    const std::size_t dim = r_grid * r_grid * r_alphabet;
    if (!r_hex.empty()) {
      sketch = BinaryVector::from_hex(r_hex, dim);
    } else if (!r_data.empty()) {
      const auto data = read_dataset(r_data);
      if (r_index >= data.size()) throw DataError("--index out of range");
      sketch = data.examples[r_index];
    } else {
      throw ConfigError("render needs --hex or --data");
    }
    svg::render_sketch_svg(r_out, sketch, r_grid, r_alphabet);
    return kOk;
  }

  if (met->parsed()) {
    const auto pred = read_labels(m_pred);
    const auto truth = read_labels(m_truth);
    const double h = metrics::conditional_entropy(truth, pred);
    json out{{"purity", metrics::conditional_purity(truth, pred)},
             {"entropy_nats", h},
             {"entropy_bits", h / std::log(2.0)},
             {"count", truth.size()}};
    std::cout << out.dump(2) << '\n';
    return kOk;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const btem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const btem::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kConfigError;
  } catch (const btem::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const btem::DimensionError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const btem::InsufficientInput& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const btem::InsufficientData& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}
