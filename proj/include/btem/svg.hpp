#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "btem/core.hpp"
#include "btem/harness.hpp"
#include "btem/theory.hpp"

namespace btem::svg {

/// Segment of the unit cell, endpoints in cell coordinates (y grows down).
struct Segment {
  double x1, y1, x2, y2;
};

/// The 18-stroke sketch alphabet, in bit order:
///   0-3   sides: top, right, bottom, left
///   4-5   diagonals: top-left to bottom-right, top-right to bottom-left
///   6-13  each corner to the two midpoints of the sides not touching it,
///         corners in order top-left, top-right, bottom-right, bottom-left
///   14-17 midpoint diamond: top-right, right-bottom, bottom-left, left-top
const std::array<Segment, 18>& sketch_alphabet();

/// Draws a g x g grid of cells; bit (row * g + col) * a + pattern set means
/// stroke `pattern` is drawn in that cell. Requires a == 18 and
/// template dim == g * g * a.
void render_sketch_svg(std::ostream& out, const BinaryVector& sketch, std::size_t grid,
                       std::size_t alphabet);
void render_sketch_svg(const std::string& path, const BinaryVector& sketch, std::size_t grid,
                       std::size_t alphabet);

/// One polyline per algorithm (and per distinct value of the other swept
/// parameters) of success rate against `x_axis`. When x_axis is "m" the
/// bound 1 - 12 k exp(-m w_min / 8) is drawn dashed.
void write_rate_chart(std::ostream& out, const std::vector<harness::SweepRecord>& records,
                      const std::string& x_axis);

/// For each algorithm, the smallest y with success rate >= threshold at every
/// x, plus the theory boundary over the same grid.
void write_frontier_chart(std::ostream& out, const std::vector<harness::SweepRecord>& records,
                          const std::string& x_axis, const std::string& y_axis,
                          double threshold);

}  // namespace btem::svg
