#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "btem/error.hpp"
#include "btem/sampler.hpp"

using namespace btem;

namespace {

MixtureModel two_line_model(std::size_t n, double c, double q) {
  MixtureModel m;
  m.templates = make_line_templates(n, c);
  m.weights = {0.5, 0.5};
  m.q = q;
  return m;
}

}  // namespace

TEST_CASE("golden dataset for a fixed seed") {
  MixtureModel m{{BinaryVector::from_string("0000000000000000"),
                  BinaryVector::from_string("1111111100000000")},
                 {0.5, 0.5},
                 0.1};
  const auto d = sample_dataset(m, 3, 42);
  REQUIRE(d.size() == 3);
  CHECK(d.labels == std::vector<std::size_t>{1, 0, 1});
  CHECK(d.examples[0].to_string() == "0111111100001010");
  CHECK(d.examples[1].to_string() == "0010000000000000");
  CHECK(d.examples[2].to_string() == "1111111100000000");
}

TEST_CASE("prefix stability: example j does not depend on m") {
  const auto m = two_line_model(100, 0.3, 0.2);
  const auto small = sample_dataset(m, 10, 9);
  const auto large = sample_dataset(m, 50, 9);
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(small.examples[j] == large.examples[j]);
    CHECK(small.labels[j] == large.labels[j]);
  }
}

TEST_CASE("noise-free sampling reproduces the templates") {
  const auto m = two_line_model(50, 0.4, 0.0);
  const auto d = sample_dataset(m, 40, 1);
  for (std::size_t j = 0; j < d.size(); ++j) CHECK(d.examples[j] == m.templates[d.labels[j]]);
}

TEST_CASE("empirical flip rate and label frequencies") {
  MixtureModel m;
  m.templates = make_line_templates(500, 0.5);
  m.weights = {0.3, 0.7};
  m.q = 0.1;
  const auto d = sample_dataset(m, 2000, 123);
  double flips = 0.0;
  std::size_t ones = 0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    flips += static_cast<double>(hamming_distance(d.examples[j], m.templates[d.labels[j]]));
    ones += d.labels[j];
  }
  const double rate = flips / (2000.0 * 500.0);
  // 1e6 Bernoulli(0.1) flips: sigma = 3e-4
  CHECK(std::abs(rate - 0.1) < 0.0015);
  // 2000 Bernoulli(0.7) labels: sigma ~ 0.0102
  CHECK(std::abs(static_cast<double>(ones) / 2000.0 - 0.7) < 0.05);
  CHECK(d.members(1).size() == ones);
}

TEST_CASE("line templates have floor(c n) leading ones") {
  const auto t = make_line_templates(10, 0.35);
  CHECK(t[0].to_string() == "0000000000");
  CHECK(t[1].to_string() == "1110000000");
  CHECK(make_line_templates(1458, 0.02)[1].count() == 29);
  CHECK_THROWS_AS(make_line_templates(10, 1.5), ParameterError);
  CHECK_THROWS_AS(make_line_templates(10, -0.1), ParameterError);
}

TEST_CASE("random templates reach the requested separation") {
  const auto t = make_random_templates(64, 3, 0.3, 5);
  REQUIRE(t.size() == 3);
  CHECK(t[0].to_hex() == "b1f09491020d22e3");
  CHECK(t[1].to_hex() == "b367db13c38d6dec");
  CHECK(t[2].to_hex() == "b74e6e5c70246bbf");
  CHECK(static_cast<double>(min_pairwise_distance(t).distance) >= 0.3 * 64);
  CHECK_THROWS_AS(make_random_templates(8, 4, 1.0, 1), SeparationUnachievable);
}

TEST_CASE("model validation") {
  auto m = two_line_model(20, 0.5, 0.1);
  CHECK_NOTHROW(m.validate());
  CHECK(m.w_min() == 0.5);
  CHECK(m.separation() == doctest::Approx(0.5));

  auto bad = m;
  bad.weights = {0.6, 0.6};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = m;
  bad.weights = {1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = m;
  bad.q = 0.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = m;
  bad.templates[1] = BinaryVector(21);
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = m;
  bad.weights = {1.0};
  CHECK_THROWS_AS(bad.validate(), DimensionError);
}

TEST_CASE("weights with a prescribed minimum") {
  const auto w = weights_with_minimum(3, 0.2);
  CHECK(w[0] == 0.2);
  CHECK(w[1] == doctest::Approx(0.4));
  CHECK(w[2] == doctest::Approx(0.4));
  CHECK(weights_with_minimum(2, 0.4) == std::vector<double>{0.4, 0.6});
  CHECK_THROWS_AS(weights_with_minimum(2, 0.6), ParameterError);
  CHECK_THROWS_AS(weights_with_minimum(2, 0.0), ParameterError);
}

TEST_CASE("dataset file round trip") {
  const auto m = two_line_model(77, 0.5, 0.1);
  const auto d = sample_dataset(m, 25, 4);
  std::stringstream ss;
  write_dataset(ss, d);
  const auto back = read_dataset(ss);
  CHECK(back.dim == 77);
  CHECK(back.k == 2);
  CHECK(back.examples == d.examples);
  CHECK(back.labels == d.labels);
}

TEST_CASE("malformed dataset files raise DataError") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return read_dataset(in);
  };
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("n=8 m=1\n0 ff\n"), DataError);
  CHECK_THROWS_AS(parse("n=8 m=1 k=2 z=3\n0 ff\n"), DataError);
  CHECK_THROWS_AS(parse("n=8 m=2 k=2\n0 ff\n"), DataError);
  CHECK_THROWS_AS(parse("n=8 m=1 k=2\n0 fff\n"), DataError);
  CHECK_THROWS_AS(parse("n=8 m=1 k=2\nx ff\n"), DataError);
  CHECK_THROWS_AS(read_dataset(std::string("/nonexistent/file")), DataError);
  CHECK_NOTHROW(parse("n=8 m=1 k=2\n1 ff\n"));
}
