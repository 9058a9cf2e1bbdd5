#include <doctest.h>

#include <cmath>
#include <vector>

#include "btem/core.hpp"
#include "btem/error.hpp"
#include "btem/rng.hpp"

using namespace btem;

namespace {

std::size_t naive_hamming(const BinaryVector& a, const BinaryVector& b) {
  std::size_t d = 0;
  for (std::size_t s = 0; s < a.dim(); ++s) d += a.get(s) != b.get(s);
  return d;
}

double naive_l1(const RealVector& a, const BinaryVector& b) {
  double d = 0.0;
  for (std::size_t s = 0; s < a.dim(); ++s) d += std::abs(a[s] - (b.get(s) ? 1.0 : 0.0));
  return d;
}

BinaryVector random_vector(std::size_t n, CounterRng& rng) {
  BinaryVector v(n);
  for (std::size_t s = 0; s < n; ++s) v.set(s, rng.bernoulli(0.5));
  return v;
}

}  // namespace

TEST_CASE("hamming distance of small strings") {
  const auto a = BinaryVector::from_string("0101");
  const auto b = BinaryVector::from_string("0011");
  CHECK(hamming_distance(a, b) == 2);
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(BinaryVector::from_string("0000"), BinaryVector::from_string("1111")) ==
        4);
}

TEST_CASE("hamming distance matches bitwise count across word boundaries") {
  CounterRng rng(7);
  for (std::size_t n : {1u, 63u, 64u, 65u, 127u, 128u, 200u, 1458u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      CHECK(hamming_distance(a, b) == naive_hamming(a, b));
      CHECK(hamming_distance(a, b) == hamming_distance(b, a));
    }
  }
}

TEST_CASE("hamming distance rejects mismatched dimensions") {
  CHECK_THROWS_AS(hamming_distance(BinaryVector(3), BinaryVector(4)), DimensionError);
}

TEST_CASE("string and hex round trips") {
  const auto v = BinaryVector::from_string("1100000001");
  CHECK(v.dim() == 10);
  CHECK(v.count() == 3);
  CHECK(v.to_string() == "1100000001");
  // bit s sits at position s % 8 of byte s / 8
  CHECK(v.to_hex() == "0302");
  CHECK(BinaryVector::from_hex("0302", 10) == v);
  CHECK_THROWS_AS(BinaryVector::from_string("01x"), ParameterError);
  CHECK_THROWS_AS(BinaryVector::from_hex("03", 10), DimensionError);
  CHECK_THROWS_AS(BinaryVector::from_hex("0306", 10), ParameterError);  // padding bit
  CHECK_THROWS_AS(BinaryVector::from_hex("zz02", 10), ParameterError);

  CounterRng rng(3);
  for (std::size_t n : {1u, 8u, 9u, 64u, 100u, 1458u}) {
    const auto r = random_vector(n, rng);
    CHECK(BinaryVector::from_hex(r.to_hex(), n) == r);
    CHECK(BinaryVector::from_string(r.to_string()) == r);
  }
}

TEST_CASE("for_each_set visits set bits in increasing order") {
  auto v = BinaryVector(130);
  v.set(0, true);
  v.set(64, true);
  v.set(129, true);
  std::vector<std::size_t> seen;
  v.for_each_set([&](std::size_t s) { seen.push_back(s); });
  CHECK(seen == std::vector<std::size_t>{0, 64, 129});
  v.flip(64);
  CHECK(v.count() == 2);
}

TEST_CASE("real l1 distance to a binary vector") {
  const RealVector a(std::vector<double>{0.25, 0.5, 1.0, 0.0});
  const auto b = BinaryVector::from_string("1010");
  CHECK(l1_distance_real(a, b) == doctest::Approx(0.75 + 0.5 + 0.0 + 0.0));
  CHECK(l1_distance_real(a, a.total(), b) == doctest::Approx(1.25));

  CounterRng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.below(150);
    std::vector<double> vals(n);
    for (auto& x : vals) x = rng.uniform();
    const RealVector r(vals);
    const auto x = random_vector(n, rng);
    CHECK(l1_distance_real(r, x) == doctest::Approx(naive_l1(r, x)).epsilon(1e-12));
    CHECK(l1_distance(r, RealVector::from_binary(x)) ==
          doctest::Approx(naive_l1(r, x)).epsilon(1e-12));
  }
}

TEST_CASE("real vectors validate their range and round at one half") {
  CHECK_THROWS_AS(RealVector(std::vector<double>{0.5, 1.5}), ParameterError);
  CHECK_THROWS_AS(RealVector(std::vector<double>{-0.1}), ParameterError);
  const RealVector a(std::vector<double>{0.49, 0.5, 0.51, 0.0});
  CHECK(round_to_binary(a).to_string() == "0110");
  CHECK(RealVector::from_binary(BinaryVector::from_string("101")).total() == 2.0);
}

TEST_CASE("minimum pairwise distance picks the lexicographically first pair") {
  const std::vector<BinaryVector> vs{BinaryVector::from_string("0000"),
                                     BinaryVector::from_string("0011"),
                                     BinaryVector::from_string("1100"),
                                     BinaryVector::from_string("1111")};
  const auto r = min_pairwise_distance(vs);
  CHECK(r.distance == 2);
  CHECK(r.pair == std::pair<std::size_t, std::size_t>{0, 1});

  const std::vector<BinaryVector> one{BinaryVector(4)};
  CHECK_THROWS_AS(min_pairwise_distance(one), InsufficientInput);
}

TEST_CASE("counter rng is reproducible and streams are distinct") {
  CounterRng a(5), b(5), c(derive_seed(5, 1));
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  CHECK(c() != CounterRng(derive_seed(5, 0))());
  CounterRng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.below(7) < 7);
  }
}
