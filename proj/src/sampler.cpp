#include "btem/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "btem/error.hpp"

namespace btem {

namespace {

constexpr int kMaxTemplateAttempts = 1000;

// Index of the component selected by a uniform draw u in [0,1).
std::size_t pick_component(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

void MixtureModel::validate() const {
  if (templates.empty()) throw ParameterError("mixture has no templates");
  if (weights.size() != templates.size())
    throw DimensionError("mixture needs one weight per template");
  for (const auto& t : templates)
    if (t.dim() != templates.front().dim())
      throw DimensionError("templates must share one dimension");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ParameterError("mixture weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ParameterError("mixture weights must sum to 1");
  if (!(q >= 0.0 && q < 0.5)) throw ParameterError("noise level must be in [0, 1/2)");
}

double MixtureModel::w_min() const {
  return *std::min_element(weights.begin(), weights.end());
}

double MixtureModel::separation() const {
  if (templates.size() < 2) return 1.0;
  return static_cast<double>(min_pairwise_distance(templates).distance) /
         static_cast<double>(dim());
}

std::vector<std::size_t> LabeledDataset::members(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (labels[j] == i) out.push_back(j);
  return out;
}

std::pair<BinaryVector, std::size_t> sample_example(const MixtureModel& model,
                                                    CounterRng& rng) {
  const std::size_t label = pick_component(model.weights, rng.uniform());
  BinaryVector x = model.templates[label];
  if (model.q > 0.0) {
    for (std::size_t s = 0; s < x.dim(); ++s)
      if (rng.bernoulli(model.q)) x.flip(s);
  }
  return {std::move(x), label};
}

LabeledDataset sample_dataset(const MixtureModel& model, std::size_t m,
                              std::uint64_t seed) {
  model.validate();
  if (m == 0) throw ParameterError("dataset size must be at least 1");
  LabeledDataset data;
  data.dim = model.dim();
  data.k = model.k();
  data.examples.reserve(m);
  data.labels.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    CounterRng rng(derive_seed(seed, j));
    auto [x, label] = sample_example(model, rng);
    data.examples.push_back(std::move(x));
    data.labels.push_back(label);
  }
  return data;
}

std::vector<BinaryVector> make_line_templates(std::size_t n, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ParameterError("separation c must lie in [0,1]");
  BinaryVector p1(n);
  BinaryVector p2(n);
  const auto ones = static_cast<std::size_t>(std::floor(c * static_cast<double>(n)));
  for (std::size_t s = 0; s < ones; ++s) p2.set(s, true);
  return {std::move(p1), std::move(p2)};
}

std::vector<BinaryVector> make_random_templates(std::size_t n, std::size_t k,
                                                double c_target,
                                                std::uint64_t seed) {
  if (k == 0) throw ParameterError("k must be positive");
  const double required = c_target * static_cast<double>(n);
  for (int attempt = 0; attempt < kMaxTemplateAttempts; ++attempt) {
    CounterRng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<BinaryVector> ts;
    ts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      BinaryVector t(n);
      for (std::size_t s = 0; s < n; ++s)
        if (rng() >> 63) t.set(s, true);
      ts.push_back(std::move(t));
    }
    if (k == 1 ||
        static_cast<double>(min_pairwise_distance(ts).distance) >= required)
      return ts;
  }
  throw SeparationUnachievable("no template set with separation >= " +
                               std::to_string(c_target) + " after " +
                               std::to_string(kMaxTemplateAttempts) + " attempts");
}

std::vector<double> weights_with_minimum(std::size_t k, double w_min) {
  if (k == 0) throw ParameterError("k must be positive");
  if (k == 1) return {1.0};
  if (!(w_min > 0.0) || w_min > 1.0 / static_cast<double>(k) + 1e-12)
    throw ParameterError("w_min must lie in (0, 1/k]");
  std::vector<double> w(k, (1.0 - w_min) / static_cast<double>(k - 1));
  w[0] = w_min;
  return w;
}

void write_dataset(std::ostream& out, const LabeledDataset& data) {
  out << "n=" << data.dim << " m=" << data.size() << " k=" << data.k << '\n';
  for (std::size_t j = 0; j < data.size(); ++j)
    out << data.labels[j] << ' ' << data.examples[j].to_hex() << '\n';
}

void write_dataset(const std::string& path, const LabeledDataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  write_dataset(out, data);
}

LabeledDataset read_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DataError("dataset: missing header line");
  LabeledDataset data;
  std::size_t m = 0;
  {
    std::istringstream hs(header);
    std::string tok;
    bool seen_n = false, seen_m = false, seen_k = false;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw DataError("dataset: bad header token '" + tok + "'");
      const auto key = tok.substr(0, eq);
      std::size_t value = 0;
      try {
        value = std::stoul(tok.substr(eq + 1));
      } catch (const std::exception&) {
        throw DataError("dataset: bad header value '" + tok + "'");
      }
      if (key == "n") data.dim = value, seen_n = true;
      else if (key == "m") m = value, seen_m = true;
      else if (key == "k") data.k = value, seen_k = true;
      else throw DataError("dataset: unknown header key '" + key + "'");
    }
    if (!seen_n || !seen_m || !seen_k)
      throw DataError("dataset: header must define n, m and k");
  }
  data.examples.reserve(m);
  data.labels.reserve(m);
  std::string line;
  std::size_t line_no = 1;
  while (data.size() < m && std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    long long label = -1;
    std::string hex;
    if (!(ls >> label >> hex) || label < 0 ||
        static_cast<std::size_t>(label) >= data.k)
      throw DataError("dataset: malformed example on line " + std::to_string(line_no));
    try {
      data.examples.push_back(BinaryVector::from_hex(hex, data.dim));
    } catch (const Error& e) {
      throw DataError("dataset: line " + std::to_string(line_no) + ": " + e.what());
    }
    data.labels.push_back(static_cast<std::size_t>(label));
  }
  if (data.size() != m)
    throw DataError("dataset: header announces " + std::to_string(m) +
                      " examples, found " + std::to_string(data.size()));
  return data;
}

LabeledDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path);
  return read_dataset(in);
}

}  // namespace btem
