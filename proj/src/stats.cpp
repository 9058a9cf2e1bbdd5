#include "btem/stats.hpp"

#include <algorithm>
#include <cmath>

#include "btem/core.hpp"
#include "btem/error.hpp"
#include "btem/rng.hpp"

namespace btem::stats {

namespace {

void check_open(std::size_t n, double q) {
  if (n == 0) throw ParameterError("dimension must be at least 1");
  if (!(q > 0.0 && q < 0.5)) throw ParameterError("noise level must lie in (0, 1/2)");
}

double clip01(double p) { return std::clamp(p, 0.0, 1.0); }

double pair_variance(double n, double q) {
  return 2.0 * n * q * (1.0 - q) * (1.0 - 2.0 * q + 2.0 * q * q);
}

}  // namespace

DistanceMoments moments_sample_to_own_template(std::size_t n, double q) {
  check_open(n, q);
  const auto nd = static_cast<double>(n);
  return {nd * q, nd * q * (1.0 - q)};
}

DistanceMoments moments_sample_to_fixed_point(std::size_t n, double q, double d) {
  check_open(n, q);
  const auto nd = static_cast<double>(n);
  if (!(d >= 0.0 && d <= nd)) throw ParameterError("distance d must lie in [0, n]");
  return {nd * q + d * (1.0 - 2.0 * q), nd * q * (1.0 - q)};
}

DistanceMoments moments_same_template_pair(std::size_t n, double q) {
  check_open(n, q);
  const auto nd = static_cast<double>(n);
  return {2.0 * nd * q * (1.0 - q), pair_variance(nd, q)};
}

double nu(std::size_t n, double q, double d) {
  if (n == 0) throw ParameterError("dimension must be at least 1");
  if (!(q >= 0.0 && q < 0.5)) throw ParameterError("noise level must lie in [0, 1/2)");
  const auto nd = static_cast<double>(n);
  if (!(d >= 0.0 && d <= nd)) throw ParameterError("distance d must lie in [0, n]");
  const double s = 1.0 - 2.0 * q;
  return 2.0 * nd * q * (1.0 - q) + d * s * s;
}

DistanceMoments moments_cross_template_pair(std::size_t n, double q, double d) {
  check_open(n, q);
  return {nu(n, q, d), pair_variance(static_cast<double>(n), q)};
}

double tail_bound_own_template(std::size_t n, double q, double lambda) {
  check_open(n, q);
  if (!(lambda >= 1.0)) throw ParameterError("lambda must be at least 1");
  const double t = lambda - 1.0;
  return clip01(std::exp(-static_cast<double>(n) * q * t * t / 3.0));
}

double tail_bound_own_template_two_sided(std::size_t n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
  return clip01(2.0 * std::exp(-static_cast<double>(n) * eps * eps / 3.0));
}

double tail_bound_cross_pair(std::size_t n, double q, double d, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("epsilon must lie in (0,1)");
  const double v = nu(n, q, d);
  return clip01(2.0 * std::exp(-v * eps * eps / 3.0));
}

DistanceMoments mc_distance_moments(Scenario scenario, std::size_t n, double q,
                                    std::size_t d, std::size_t trials,
                                    std::uint64_t seed) {
  if (trials < 2) throw ParameterError("need at least 2 trials");
  if (n == 0) throw ParameterError("dimension must be at least 1");
  if (!(q >= 0.0 && q < 0.5)) throw ParameterError("noise level must lie in [0, 1/2)");
  if (d > n) throw ParameterError("distance d must lie in [0, n]");

  const BinaryVector p(n);
  BinaryVector other(n);
  for (std::size_t s = 0; s < d; ++s) other.set(s, true);

  auto noisy = [&](const BinaryVector& base, CounterRng& rng) {
    BinaryVector x = base;
    if (q > 0.0)
      for (std::size_t s = 0; s < n; ++s)
        if (rng.bernoulli(q)) x.flip(s);
    return x;
  };

  // Welford accumulation keeps the variance accurate for large trial counts.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(derive_seed(seed, t));
    std::size_t dist = 0;
    switch (scenario) {
      case Scenario::OwnTemplate:
        dist = hamming_distance(noisy(p, rng), p);
        break;
      case Scenario::SamePair:
        dist = hamming_distance(noisy(p, rng), noisy(p, rng));
        break;
      case Scenario::CrossPair:
        dist = hamming_distance(noisy(p, rng), noisy(other, rng));
        break;
    }
    const double x = static_cast<double>(dist);
    const double delta = x - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (x - mean);
  }
  return {mean, m2 / static_cast<double>(trials - 1)};
}

}  // namespace btem::stats
