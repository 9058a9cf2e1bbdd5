#include "btem/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include "btem/error.hpp"

namespace btem::svg {

namespace {

constexpr double kCell = 24.0;  // pixels per sketch cell
constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 64.0, kRight = 170.0, kTop = 24.0, kBottom = 48.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axes {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * (kHeight - kTop - kBottom);
  }
};

void open_chart(std::ostream& out, const Axes& ax, const std::string& xlabel,
                const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kHeight - kBottom) << "\" x2=\""
      << num(kWidth - kRight) << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
  out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(kHeight - kBottom) << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = ax.x0 + (ax.x1 - ax.x0) * i / 4.0;
    const double fy = ax.y0 + (ax.y1 - ax.y0) * i / 4.0;
    out << "<text x=\"" << num(ax.px(fx)) << "\" y=\"" << num(kHeight - kBottom + 16)
        << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(ax.py(fy) + 4)
        << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + kWidth - kRight) / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((kTop + kHeight - kBottom) / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((kTop + kHeight - kBottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
  out << "</g>\n";
}

void polyline(std::ostream& out, const Axes& ax, const std::vector<std::pair<double, double>>& pts,
              const char* color, bool dashed, const std::string& label, std::size_t legend_row) {
  if (pts.empty()) return;
  out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << (i ? " " : "") << num(ax.px(pts[i].first)) << ',' << num(ax.py(pts[i].second));
  out << "\"/>\n";
  const double ly = kTop + 14.0 * static_cast<double>(legend_row);
  out << "<text x=\"" << num(kWidth - kRight + 10) << "\" y=\"" << num(ly + 4)
      << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" << color << "\">"
      << escape(label) << "</text>\n";
}

// Parameters other than `skip` that vary across the records, as a label.
std::string series_key(const harness::SweepRecord& r, const std::vector<std::string>& varying) {
  std::string key = r.algo;
  for (const auto& name : varying) key += " " + name + "=" + num(theory::get_param(r.params, name));
  return key;
}

std::vector<std::string> varying_params(const std::vector<harness::SweepRecord>& records,
                                        std::initializer_list<std::string> skip) {
  std::vector<std::string> out;
  for (const char* name : {"n", "m", "k", "q", "c", "w_min", "delta", "epsilon"}) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    std::set<double> values;
    for (const auto& r : records) values.insert(theory::get_param(r.params, name));
    if (values.size() > 1) out.emplace_back(name);
  }
  return out;
}

}  // namespace

const std::array<Segment, 18>& sketch_alphabet() {
  // Corners TL (0,0), TR (1,0), BR (1,1), BL (0,1); midpoints T (.5,0),
  // R (1,.5), B (.5,1), L (0,.5).
  static const std::array<Segment, 18> alphabet{{
      {0, 0, 1, 0},     {1, 0, 1, 1},     {1, 1, 0, 1},     {0, 1, 0, 0},
      {0, 0, 1, 1},     {1, 0, 0, 1},
      {0, 0, 1, 0.5},   {0, 0, 0.5, 1},   {1, 0, 0, 0.5},   {1, 0, 0.5, 1},
      {1, 1, 0.5, 0},   {1, 1, 0, 0.5},   {0, 1, 0.5, 0},   {0, 1, 1, 0.5},
      {0.5, 0, 1, 0.5}, {1, 0.5, 0.5, 1}, {0.5, 1, 0, 0.5}, {0, 0.5, 0.5, 0},
  }};
  return alphabet;
}

void render_sketch_svg(std::ostream& out, const BinaryVector& sketch, std::size_t grid,
                       std::size_t alphabet) {
  if (alphabet != 18) throw ParameterError("only the 18-stroke alphabet is supported");
  if (grid == 0) throw ParameterError("grid must be positive");
  if (sketch.dim() != grid * grid * alphabet)
    throw DimensionError("template has dimension " + std::to_string(sketch.dim()) +
                         ", expected " + std::to_string(grid * grid * alphabet));
  const double size = kCell * static_cast<double>(grid);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(size + 2) << "\" height=\""
      << num(size + 2) << "\" viewBox=\"-1 -1 " << num(size + 2) << ' ' << num(size + 2)
      << "\">\n";
  out << "<g class=\"grid\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
  for (std::size_t r = 0; r < grid; ++r)
    for (std::size_t c = 0; c < grid; ++c)
      out << "<rect x=\"" << num(kCell * c) << "\" y=\"" << num(kCell * r) << "\" width=\""
          << num(kCell) << "\" height=\"" << num(kCell) << "\"/>\n";
  out << "</g>\n";
  out << "<g class=\"strokes\" stroke=\"black\" stroke-width=\"1.5\" stroke-linecap=\"round\">\n";
  const auto& strokes = sketch_alphabet();
  sketch.for_each_set([&](std::size_t s) {
    const std::size_t cell = s / alphabet;
    const auto& seg = strokes[s % alphabet];
    const double ox = kCell * static_cast<double>(cell % grid);
    const double oy = kCell * static_cast<double>(cell / grid);
    out << "<line class=\"segment\" x1=\"" << num(ox + kCell * seg.x1) << "\" y1=\""
        << num(oy + kCell * seg.y1) << "\" x2=\"" << num(ox + kCell * seg.x2) << "\" y2=\""
        << num(oy + kCell * seg.y2) << "\"/>\n";
  });
  out << "</g>\n</svg>\n";
}

void render_sketch_svg(const std::string& path, const BinaryVector& sketch, std::size_t grid,
                       std::size_t alphabet) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  render_sketch_svg(out, sketch, grid, alphabet);
}

void write_rate_chart(std::ostream& out, const std::vector<harness::SweepRecord>& records,
                      const std::string& x_axis) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  const auto varying = varying_params(records, {x_axis});
  double x0 = INFINITY, x1 = -INFINITY;
  for (const auto& r : records) {
    const double x = theory::get_param(r.params, x_axis);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    series[series_key(r, varying)].emplace_back(x, r.success_rate);
  }
  if (records.empty()) x0 = 0, x1 = 1;
  const Axes ax{x0, x1, 0.0, 1.0};
  open_chart(out, ax, x_axis, "success rate");
  std::size_t row = 0;
  for (auto& [label, pts] : series) {
    std::sort(pts.begin(), pts.end());
    polyline(out, ax, pts, kPalette[row % std::size(kPalette)], false, label, row);
    ++row;
  }
  if (x_axis == "m" && !records.empty()) {
    // 1 - 12 k exp(-m w_min / 8) for the first record's k and w_min.
    const auto& p = records.front().params;
    std::vector<std::pair<double, double>> bound;
    for (int i = 0; i <= 50; ++i) {
      const double m = x0 + (x1 - x0) * i / 50.0;
      bound.emplace_back(m, std::clamp(1.0 - 12.0 * p.k * std::exp(-m * p.w_min / 8.0), 0.0, 1.0));
    }
    polyline(out, ax, bound, "#555555", true, "bound 1-12k exp(-m w_min/8)", row);
  }
  out << "</svg>\n";
}

void write_frontier_chart(std::ostream& out, const std::vector<harness::SweepRecord>& records,
                          const std::string& x_axis, const std::string& y_axis,
                          double threshold) {
  // frontier[label][x] = smallest y reaching the threshold
  std::map<std::string, std::map<double, std::optional<double>>> frontier;
  std::map<double, std::optional<double>> theory_front;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  auto lower = [](std::optional<double>& slot, double y) {
    if (!slot || y < *slot) slot = y;
  };
  for (const auto& r : records) {
    const double x = theory::get_param(r.params, x_axis);
    const double y = theory::get_param(r.params, y_axis);
    x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    auto& slot = frontier[r.algo][x];
    if (r.success_rate >= threshold) lower(slot, y);
    auto& tslot = theory_front[x];
    if (r.theory_ok) lower(tslot, y);
  }
  if (records.empty()) x0 = y0 = 0, x1 = y1 = 1;
  const Axes ax{x0, x1, y0, y1};
  open_chart(out, ax, x_axis, y_axis);
  std::size_t row = 0;
  auto draw = [&](const std::map<double, std::optional<double>>& f, const std::string& label,
                  const char* color, bool dashed) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : f)
      if (y) pts.emplace_back(x, *y);
    polyline(out, ax, pts, color, dashed, label, row++);
  };
  for (const auto& [label, f] : frontier)
    draw(f, label + " (" + num(100 * threshold) + "%)", kPalette[row % std::size(kPalette)], false);
  draw(theory_front, "theory conditions", "#555555", true);
  out << "</svg>\n";
}

}  // namespace btem::svg
