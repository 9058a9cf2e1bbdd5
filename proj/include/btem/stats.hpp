#pragma once

#include <cstddef>
#include <cstdint>

namespace btem::stats {

/// Mean and variance of the distance D between two random points.
struct DistanceMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// Closed-form moments of D for Bernoulli noise of level q in dimension n.
// All of them require n >= 1 and q in (0, 1/2); ParameterError otherwise.

/// x ~ P, distance to P itself: mean nq, variance nq(1-q).
DistanceMoments moments_sample_to_own_template(std::size_t n, double q);

/// x ~ P, distance to a fixed point y with D(P, y) = d.
DistanceMoments moments_sample_to_fixed_point(std::size_t n, double q, double d);

/// Two independent samples of the same template.
DistanceMoments moments_same_template_pair(std::size_t n, double q);

/// Expected distance between samples of two templates at distance d:
/// 2nq(1-q) + d(1-2q)^2.
double nu(std::size_t n, double q, double d);

/// Samples of two templates at distance d; mean nu(n, q, d).
DistanceMoments moments_cross_template_pair(std::size_t n, double q, double d);

/// Upper bound exp(-nq(lambda-1)^2/3) on P(D(x,P) > lambda n q), lambda >= 1,
/// clipped to [0,1].
double tail_bound_own_template(std::size_t n, double q, double lambda);

/// Bound 2 exp(-n eps^2/3) on P(|D(x,P) - nq| > eps n sqrt(q)), clipped.
double tail_bound_own_template_two_sided(std::size_t n, double eps);

/// Bound 2 exp(-nu eps^2/3) on P(|D(x,y) - nu| > eps nu), clipped.
double tail_bound_cross_pair(std::size_t n, double q, double d, double eps);

enum class Scenario { OwnTemplate, SamePair, CrossPair };

/// Sample mean and (unbiased) variance of D over `trials` independent draws
/// of the scenario. Templates are 0^n and, for CrossPair, a vector with d
/// leading ones. Trial t uses stream derive_seed(seed, t). q = 0 is allowed.
DistanceMoments mc_distance_moments(Scenario scenario, std::size_t n, double q,
                                    std::size_t d, std::size_t trials,
                                    std::uint64_t seed);

}  // namespace btem::stats
