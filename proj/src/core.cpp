#include "btem/core.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "btem/error.hpp"

namespace btem {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

BinaryVector::BinaryVector(std::size_t dim)
    : dim_(dim), words_((dim + 63) / 64, 0) {}

BinaryVector BinaryVector::from_string(std::string_view bits) {
  BinaryVector v(bits.size());
  for (std::size_t s = 0; s < bits.size(); ++s) {
    if (bits[s] == '1')
      v.set(s, true);
    else if (bits[s] != '0')
      throw ParameterError("binary string may only contain '0' and '1'");
  }
  return v;
}

BinaryVector BinaryVector::from_hex(std::string_view hex, std::size_t dim) {
  const std::size_t bytes = (dim + 7) / 8;
  if (hex.size() != 2 * bytes)
    throw DimensionError("hex string has " + std::to_string(hex.size()) +
                         " digits, expected " + std::to_string(2 * bytes));
  BinaryVector v(dim);
  for (std::size_t b = 0; b < bytes; ++b) {
    const int hi = hex_value(hex[2 * b]);
    const int lo = hex_value(hex[2 * b + 1]);
    if (hi < 0 || lo < 0) throw ParameterError("invalid hex digit");
    const auto byte = static_cast<unsigned>(hi * 16 + lo);
    for (unsigned bit = 0; bit < 8; ++bit) {
      if (!((byte >> bit) & 1U)) continue;
      const std::size_t s = b * 8 + bit;
      if (s >= dim) throw ParameterError("hex string sets a padding bit");
      v.set(s, true);
    }
  }
  return v;
}

std::size_t BinaryVector::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::string BinaryVector::to_string() const {
  std::string out(dim_, '0');
  for (std::size_t s = 0; s < dim_; ++s)
    if (get(s)) out[s] = '1';
  return out;
}

std::string BinaryVector::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  const std::size_t bytes = (dim_ + 7) / 8;
  std::string out;
  out.reserve(2 * bytes);
  for (std::size_t b = 0; b < bytes; ++b) {
    const auto byte =
        static_cast<unsigned>((words_[b / 8] >> (8 * (b % 8))) & 0xffU);
    out.push_back(digits[byte >> 4]);
    out.push_back(digits[byte & 0xfU]);
  }
  return out;
}

RealVector::RealVector(std::size_t dim, double fill) : values_(dim, fill) {
  if (!(fill >= 0.0 && fill <= 1.0))
    throw ParameterError("RealVector components must lie in [0,1]");
}

RealVector::RealVector(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0))
      throw ParameterError("RealVector components must lie in [0,1]");
}

RealVector RealVector::from_binary(const BinaryVector& v) {
  RealVector out(v.dim());
  v.for_each_set([&](std::size_t s) { out[s] = 1.0; });
  return out;
}

double RealVector::total() const noexcept {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum;
}

std::size_t hamming_distance(const BinaryVector& a, const BinaryVector& b) {
  require_same_dim(a.dim(), b.dim(), "hamming_distance");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t d = 0;
  for (std::size_t i = 0; i < wa.size(); ++i)
    d += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  return d;
}

double l1_distance_real(const RealVector& a, const BinaryVector& b) {
  require_same_dim(a.dim(), b.dim(), "l1_distance_real");
  return l1_distance_real(a, a.total(), b);
}

double l1_distance_real(const RealVector& a, double a_total,
                        const BinaryVector& b) {
  require_same_dim(a.dim(), b.dim(), "l1_distance_real");
  // |a - 0| = a and |a - 1| = 1 - a = a + (1 - 2a).
  double d = a_total;
  b.for_each_set([&](std::size_t s) { d += 1.0 - 2.0 * a[s]; });
  return d;
}

double l1_distance(const RealVector& a, const RealVector& b) {
  require_same_dim(a.dim(), b.dim(), "l1_distance");
  double d = 0.0;
  for (std::size_t s = 0; s < a.dim(); ++s) d += std::abs(a[s] - b[s]);
  return d;
}

BinaryVector round_to_binary(const RealVector& a) {
  BinaryVector out(a.dim());
  for (std::size_t s = 0; s < a.dim(); ++s)
    if (a[s] >= 0.5) out.set(s, true);
  return out;
}

PairDistance min_pairwise_distance(std::span<const BinaryVector> vs) {
  if (vs.size() < 2)
    throw InsufficientInput("min_pairwise_distance needs at least 2 vectors");
  PairDistance best{std::numeric_limits<std::size_t>::max(), {0, 0}};
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      const auto d = hamming_distance(vs[i], vs[j]);
      if (d < best.distance) best = {d, {i, j}};
    }
  return best;
}

}  // namespace btem
