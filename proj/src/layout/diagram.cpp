#include "diagen/layout/diagram.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "diagen/layout/compile.hpp"

namespace diagen::layout {

SolvedShape resolve_shape(const ShapeInstance& s, std::span<const double> x) {
  SolvedShape out;
  out.kind = s.kind;
  out.name = s.name;
  out.owners = s.owners;
  out.label = s.label;
  out.text = s.text;
  out.cx = s.cx.resolve(x);
  out.cy = s.cy.resolve(x);
  out.r = s.r.resolve(x);
  out.width = s.width.resolve(x);
  out.height = s.height.resolve(x);
  out.x1 = s.x1.resolve(x);
  out.y1 = s.y1.resolve(x);
  out.x2 = s.x2.resolve(x);
  out.y2 = s.y2.resolve(x);
  out.stroke_width = s.stroke_width.resolve(x);
  return out;
}

namespace {

std::string hsl_hex(double hue, double sat, double light) {
  const double c = (1.0 - std::abs(2.0 * light - 1.0)) * sat;
  const double hp = hue / 60.0;
  const double xx = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) r = c, g = xx;
  else if (hp < 2) r = xx, g = c;
  else if (hp < 3) g = c, b = xx;
  else if (hp < 4) g = xx, b = c;
  else if (hp < 5) r = xx, b = c;
  else r = c, b = xx;
  const double m = light - c / 2.0;
  auto byte = [&](double v) { return static_cast<int>(std::lround((v + m) * 255.0)); };
  return fmt::format("#{:02x}{:02x}{:02x}", byte(r), byte(g), byte(b));
}

}  // namespace

std::vector<std::string> sample_fills(const std::vector<ShapeInstance>& shapes, std::uint64_t seed) {
  std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::string> fills;
  fills.reserve(shapes.size());
  for (const ShapeInstance& s : shapes) {
    const double hue = unit_uniform(gen()) * 360.0;
    const bool filled = s.kind == ShapeKind::Circle || s.kind == ShapeKind::Rectangle;
    fills.push_back(filled ? hsl_hex(hue, 0.55, 0.78) : "#000000");
  }
  return fills;
}

Diagram layout_problem(const LayoutProblem& problem, std::uint64_t seed, const SolverSettings& settings,
                       std::string source_program) {
  Diagram d;
  d.canvas = problem.canvas;
  d.source_program = std::move(source_program);
  d.meta = solve_exterior(problem, sample_init(problem, seed), settings);
  d.meta.seed = seed;
  const std::vector<std::string> fills = sample_fills(problem.shapes, seed);
  for (std::size_t i = 0; i < problem.shapes.size(); ++i) {
    SolvedShape s = resolve_shape(problem.shapes[i], d.meta.params);
    s.fill = fills[i];
    d.shapes.push_back(std::move(s));
  }
  return d;
}

Diagram layout(const dsl::SubstanceProgram& program, const dsl::StyleSheet& style,
               const dsl::DomainSchema& schema, std::uint64_t seed, const SolverSettings& settings) {
  return layout_problem(compile(program, style, schema), seed, settings,
                        dsl::serialize_substance(program));
}

}  // namespace diagen::layout
