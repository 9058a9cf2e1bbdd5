#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "btem/error.hpp"
#include "btem/svg.hpp"

using namespace btem;

namespace {

std::size_t occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++count;
  return count;
}

harness::SweepRecord record(const std::string& algo, double m, double rate) {
  harness::SweepRecord r;
  r.algo = algo;
  r.params.n = 1458, r.params.m = m, r.params.k = 2, r.params.q = 0.1, r.params.c = 0.02;
  r.params.w_min = 0.4;
  r.success_rate = rate;
  r.theory_ok = m >= 200;
  return r;
}

}  // namespace

TEST_CASE("the sketch alphabet has 18 distinct strokes inside the unit cell") {
  const auto& a = svg::sketch_alphabet();
  std::set<std::tuple<double, double, double, double>> seen;
  for (const auto& s : a) {
    for (double v : {s.x1, s.y1, s.x2, s.y2}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK((s.x1 != s.x2 || s.y1 != s.y2));
    // undirected: normalise endpoint order
    auto key = std::make_tuple(s.x1, s.y1, s.x2, s.y2);
    if (std::tie(s.x2, s.y2) < std::tie(s.x1, s.y1)) key = std::make_tuple(s.x2, s.y2, s.x1, s.y1);
    seen.insert(key);
  }
  CHECK(seen.size() == 18);
}

TEST_CASE("one line element per set bit") {
  const std::size_t dim = 9 * 9 * 18;
  BinaryVector sketch(dim);
  for (std::size_t s : {0u, 17u, 18u, 700u, 1457u}) sketch.set(s, true);
  std::ostringstream out;
  svg::render_sketch_svg(out, sketch, 9, 18);
  const auto text = out.str();
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(occurrences(text, "<line class=\"segment\"") == 5);
  CHECK(occurrences(text, "<rect") >= 81);
  CHECK(text.find("</svg>") != std::string::npos);

  std::ostringstream empty;
  svg::render_sketch_svg(empty, BinaryVector(dim), 9, 18);
  CHECK(occurrences(empty.str(), "<line class=\"segment\"") == 0);
}

TEST_CASE("sketch rendering validates its shape") {
  std::ostringstream out;
  CHECK_THROWS_AS(svg::render_sketch_svg(out, BinaryVector(100), 9, 18), DimensionError);
  CHECK_THROWS_AS(svg::render_sketch_svg(out, BinaryVector(81 * 16), 9, 16), ParameterError);
  CHECK_THROWS_AS(svg::render_sketch_svg("/nonexistent/dir/x.svg", BinaryVector(1458), 9, 18),
                  DataError);
}

TEST_CASE("rate chart draws one series per algorithm plus the bound") {
  const std::vector<harness::SweepRecord> rs{record("two-round", 100, 0.5),
                                             record("standard", 100, 0.2),
                                             record("two-round", 200, 0.9),
                                             record("standard", 200, 0.4)};
  std::ostringstream out;
  svg::write_rate_chart(out, rs, "m");
  const auto text = out.str();
  CHECK(occurrences(text, "<polyline class=\"series\"") == 3);
  CHECK(occurrences(text, "stroke-dasharray") == 1);
  CHECK(text.find("two-round") != std::string::npos);
  CHECK(text.find("nan") == std::string::npos);

  std::ostringstream by_q;
  svg::write_rate_chart(by_q, rs, "q");
  CHECK(occurrences(by_q.str(), "stroke-dasharray") == 0);
}

TEST_CASE("frontier chart") {
  std::vector<harness::SweepRecord> rs;
  for (double m : {100.0, 200.0})
    for (double n : {500.0, 1000.0}) {
      auto r = record("two-round", m, n >= 1000 ? 1.0 : 0.1);
      r.params.n = n;
      rs.push_back(r);
    }
  std::ostringstream out;
  svg::write_frontier_chart(out, rs, "m", "n", 0.9);
  const auto text = out.str();
  CHECK(text.rfind("<svg", 0) == 0);
  CHECK(occurrences(text, "<polyline") >= 1);
  CHECK(text.find("nan") == std::string::npos);
}
