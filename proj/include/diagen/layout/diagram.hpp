#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/style.hpp"
#include "diagen/dsl/substance.hpp"
#include "diagen/layout/problem.hpp"
#include "diagen/layout/solver.hpp"

namespace diagen::layout {

/// A shape with every parameter resolved to a number.
struct SolvedShape {
  ShapeKind kind = ShapeKind::Circle;
  std::string name;
  std::vector<std::string> owners;
  std::optional<std::string> label;
  std::string text;
  double cx = 0, cy = 0, r = 0, width = 0, height = 0;
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0, stroke_width = 1.5;
  std::string fill = "#000000";
};

struct LabelAnchor {
  std::string text;
  double x = 0.0;
  double y = 0.0;
  std::string owner;
};

struct Diagram {
  std::vector<SolvedShape> shapes;
  std::vector<LabelAnchor> labels;  // filled by place_labels
  Canvas canvas;
  SolveResult meta;
  std::string source_program;  // canonical Substance text
};

SolvedShape resolve_shape(const ShapeInstance& shape, std::span<const double> x);

/// `#rrggbb` fill per shape: hue drawn from a stream derived from `seed`,
/// independent of the layout stream. Lines and text stay black.
std::vector<std::string> sample_fills(const std::vector<ShapeInstance>& shapes, std::uint64_t seed);

/// compile -> sample_init -> solve_exterior -> resolved shapes.
Diagram layout(const dsl::SubstanceProgram& program, const dsl::StyleSheet& style,
               const dsl::DomainSchema& schema, std::uint64_t seed, const SolverSettings& settings);

/// Same, for an already compiled problem.
Diagram layout_problem(const LayoutProblem& problem, std::uint64_t seed, const SolverSettings& settings,
                       std::string source_program = {});

}  // namespace diagen::layout
