#pragma once

#include <stdexcept>
#include <string>

namespace btem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs disagree on dimension or count.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Not enough items to perform the operation (e.g. fewer than two vectors).
class InsufficientInput : public Error {
 public:
  using Error::Error;
};

/// Fewer examples than the algorithm needs (m < l or m < k).
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A numeric parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Random template generation could not reach the requested separation.
class SeparationUnachievable : public Error {
 public:
  using Error::Error;
};

/// Weight-threshold pruning removed every round-one template.
class AllClustersStarved : public Error {
 public:
  using Error::Error;
};

/// Fewer than k templates survived weight-threshold pruning.
class TooFewClusters : public Error {
 public:
  using Error::Error;
};

/// The separation constant B is not positive for this noise level.
class NonpositiveB : public Error {
 public:
  using Error::Error;
};

/// Malformed data file (dataset, label list, template).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace btem
