#include <doctest.h>

#include <cmath>

#include "diagen/render/svg.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace diagen;
using layout::Diagram;
using layout::ShapeKind;
using layout::SolvedShape;
using doctest::Approx;

namespace {

SolvedShape shape(ShapeKind kind) {
  SolvedShape s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(render::format_number(1.0) == "1");
  CHECK(render::format_number(1.25) == "1.25");
  CHECK(render::format_number(-0.0001) == "0");
  CHECK(render::format_number(2.00049) == "2");
  CHECK(render::format_number(-3.1416) == "-3.142");
}

TEST_CASE("xml_escape and file names") {
  CHECK(render::xml_escape("a<b & \"c\" 'd'>") == "a&lt;b &amp; &quot;c&quot; &apos;d&apos;&gt;");
  CHECK(render::svg_file_name("p00003", 7) == "p00003_7.svg");
}

TEST_CASE("every shape kind renders into a well-formed document") {
  Diagram d;
  d.canvas = {400, 300};
  SolvedShape c = shape(ShapeKind::Circle);
  c.cx = 10, c.cy = -20, c.r = 30, c.fill = "#abcdef";
  SolvedShape r = shape(ShapeKind::Rectangle);
  r.cx = 50, r.cy = 50, r.width = 40, r.height = 20;
  SolvedShape l = shape(ShapeKind::Line);
  l.x1 = 0, l.y1 = 0, l.x2 = 100, l.y2 = 0;
  SolvedShape a = shape(ShapeKind::Arrow);
  a.x1 = -50, a.y1 = -50, a.x2 = -10, a.y2 = -50;
  SolvedShape t = shape(ShapeKind::Text);
  t.text = "x < y & z";
  d.shapes = {c, r, l, a, t};

  const std::string svg = render::render_svg(d);
  std::string err;
  CHECK_MESSAGE(testing::xml_well_formed(svg, &err), err);
  CHECK(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
  CHECK(svg.find("viewBox=\"-200 -150 400 300\"") != std::string::npos);
  CHECK(svg.find("<circle cx=\"10\" cy=\"-20\" r=\"30\" fill=\"#abcdef\"") != std::string::npos);
  CHECK(svg.find("<rect x=\"30\" y=\"40\" width=\"40\" height=\"20\"") != std::string::npos);
  CHECK(svg.find("<line x1=\"0\" y1=\"0\" x2=\"100\" y2=\"0\"") != std::string::npos);
  CHECK(svg.find("<path d=\"M -50 -50 L -10 -50 M") != std::string::npos);
  CHECK(svg.find(">x &lt; y &amp; z</text>") != std::string::npos);
}

TEST_CASE("labels: centers for areas, offset normal for lines") {
  Diagram d;
  d.canvas = {600, 600};
  SolvedShape c = shape(ShapeKind::Circle);
  c.cx = 100, c.cy = 100, c.r = 10, c.label = "A", c.owners = {"A"};
  SolvedShape l = shape(ShapeKind::Line);
  l.x1 = -100, l.y1 = 0, l.x2 = 0, l.y2 = 0, l.label = "e";
  SolvedShape unlabeled = shape(ShapeKind::Circle);
  d.shapes = {c, l, unlabeled};
  const Diagram out = render::place_labels(d);
  REQUIRE(out.labels.size() == 2);
  CHECK(out.labels[0].x == 100);
  CHECK(out.labels[0].y == 100);
  CHECK(out.labels[0].owner == "A");
  // Normal (dy, -dx)/len of a rightward line points to -y.
  CHECK(out.labels[1].x == Approx(-50));
  CHECK(out.labels[1].y == Approx(-render::kLabelOffset));
}

TEST_CASE("property: placed labels keep their spacing and stay on the canvas") {
  testing::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Diagram d;
    d.canvas = {rng.uniform(200, 800), rng.uniform(200, 800)};
    const int n = rng.between(1, 12);
    for (int i = 0; i < n; ++i) {
      SolvedShape s = shape(ShapeKind::Circle);
      // Clustered so anchors collide often.
      s.cx = rng.uniform(-20, 20);
      s.cy = rng.uniform(-20, 20);
      s.r = 5;
      s.label = std::string(1, static_cast<char>('A' + i));
      d.shapes.push_back(s);
    }
    const Diagram out = render::place_labels(d);
    REQUIRE(out.labels.size() == static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      CHECK(std::abs(out.labels[i].x) <= d.canvas.width / 2);
      CHECK(std::abs(out.labels[i].y) <= d.canvas.height / 2);
      for (std::size_t j = 0; j < i; ++j) {
        const double dist = std::hypot(out.labels[i].x - out.labels[j].x, out.labels[i].y - out.labels[j].y);
        CHECK(dist >= render::kLabelSpacing - 1e-9);
      }
    }
  }
}

TEST_CASE("rendering is a pure function of the diagram") {
  Diagram d;
  SolvedShape c = shape(ShapeKind::Circle);
  c.r = 12.3456, c.label = "L";
  d.shapes = {c};
  const Diagram placed = render::place_labels(d);
  CHECK(render::render_svg(placed) == render::render_svg(placed));
  CHECK(render::render_svg(placed).find("r=\"12.346\"") != std::string::npos);
}
