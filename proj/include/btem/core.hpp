#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace btem {

/// A point of {0,1}^n, bit-packed into 64-bit words.
///
/// Bit s lives in word s / 64 at position s % 64. Padding bits past dim()
/// are always zero, so word-wise popcount gives Hamming distance directly.
class BinaryVector {
 public:
  BinaryVector() = default;
  explicit BinaryVector(std::size_t dim);

  /// Builds from a string of '0'/'1' characters; component 0 first.
  static BinaryVector from_string(std::string_view bits);
  /// Lowercase hex, two digits per byte, bit s at position s % 8 of byte s / 8.
  static BinaryVector from_hex(std::string_view hex, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  bool get(std::size_t s) const noexcept {
    return (words_[s >> 6] >> (s & 63)) & 1U;
  }
  void set(std::size_t s, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (s & 63);
    if (value)
      words_[s >> 6] |= mask;
    else
      words_[s >> 6] &= ~mask;
  }
  void flip(std::size_t s) noexcept {
    words_[s >> 6] ^= std::uint64_t{1} << (s & 63);
  }

  std::size_t count() const noexcept;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::string to_string() const;
  std::string to_hex() const;

  /// Calls fn(s) for every set component, in increasing order.
  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int bit = __builtin_ctzll(word);
        fn(w * 64 + static_cast<std::size_t>(bit));
        word &= word - 1;
      }
    }
  }

  friend bool operator==(const BinaryVector&, const BinaryVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A point of [0,1]^n: an un-rounded template estimate or a mean.
class RealVector {
 public:
  RealVector() = default;
  explicit RealVector(std::size_t dim, double fill = 0.0);
  explicit RealVector(std::vector<double> values);
  static RealVector from_binary(const BinaryVector& v);

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t s) const noexcept { return values_[s]; }
  double& operator[](std::size_t s) noexcept { return values_[s]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Sum of all components.
  double total() const noexcept;

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> values_;
};

/// Number of differing components.
std::size_t hamming_distance(const BinaryVector& a, const BinaryVector& b);

/// Sum over s of |a(s) - b(s)|.
double l1_distance_real(const RealVector& a, const BinaryVector& b);
/// Same as above with a precomputed a.total(); O(popcount(b)) per call.
double l1_distance_real(const RealVector& a, double a_total,
                        const BinaryVector& b);
double l1_distance(const RealVector& a, const RealVector& b);

/// Component-wise nearest integer; exact ties at 0.5 round to 1.
BinaryVector round_to_binary(const RealVector& a);

struct PairDistance {
  std::size_t distance;
  std::pair<std::size_t, std::size_t> pair;
};

/// Minimum distance over unordered pairs i < j; ties resolved by the
/// lexicographically smallest (i, j).
PairDistance min_pairwise_distance(std::span<const BinaryVector> vs);

}  // namespace btem
