#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/dsl/style.hpp"
#include "diagen/layout/autodiff.hpp"

namespace diagen::layout {

using dsl::Canvas;
using dsl::ShapeKind;

/// A shape parameter: either slot `slot` of the parameter vector, or the
/// fixed `value`.
struct ScalarRef {
  int slot = -1;
  double value = 0.0;

  bool is_free() const { return slot >= 0; }
  double resolve(std::span<const double> x) const {
    return slot >= 0 ? x[static_cast<std::size_t>(slot)] : value;
  }
  static ScalarRef fixed(double v) { return ScalarRef{-1, v}; }
  static ScalarRef free(int s) { return ScalarRef{s, 0.0}; }
};

/// How sample_init draws a slot.
enum class SlotRole : std::uint8_t { X, Y, Size };

struct ShapeInstance {
  ShapeKind kind = ShapeKind::Circle;
  std::string name;                 // e.g. "A.icon"
  std::vector<std::string> owners;  // Substance identifiers
  std::optional<std::string> label;
  std::string text;  // Text shapes only

  // Circle/Rectangle/Text: center. Circle: r. Rectangle: width, height.
  ScalarRef cx, cy, r, width, height;
  // Line/Arrow.
  ScalarRef x1, y1, x2, y2, stroke_width = ScalarRef::fixed(1.5);
};

/// Named accessors for the scalar parameters used by `kind`.
std::vector<std::pair<std::string_view, ScalarRef>> shape_params(const ShapeInstance& shape);

enum class TermKind : std::uint8_t {
  // penalties
  Disjoint,
  Contains,
  OnCanvas,
  MinSize,
  Equal,
  LessThan,
  // energies
  Near,
  Repel,
  EqualLength,
  CenterCanvas,
  // hand-built terms (tests, toy problems)
  Custom,
};

std::string_view to_string(TermKind kind);

/// Builds a custom term from the per-slot parameter nodes.
using TermBuilder = std::function<ad::Var(ad::Graph&, std::span<const ad::Var> params)>;

struct Term {
  TermKind kind = TermKind::Custom;
  std::vector<int> shapes;          // indices into LayoutProblem::shapes
  std::vector<ScalarRef> scalars;   // Equal / LessThan operands
  double amount = 0.0;              // padding, minimum size, or weight
  TermBuilder custom;
};

struct LayoutProblem {
  int param_count = 0;
  std::vector<SlotRole> slot_roles;  // size param_count
  std::vector<ShapeInstance> shapes;
  std::vector<Term> energies;
  std::vector<Term> penalties;
  Canvas canvas;

  int add_slot(SlotRole role) {
    slot_roles.push_back(role);
    return param_count++;
  }
};

/// Appends the computation of `term` to `graph`. Every evaluation path
/// (single-term evaluation and the full objective) goes through here.
ad::Var build_term(ad::Graph& graph, const LayoutProblem& problem, const Term& term,
                   std::span<const ad::Var> params);

double eval_penalty(const LayoutProblem& problem, const Term& term, std::span<const double> x);
double eval_energy(const LayoutProblem& problem, const Term& term, std::span<const double> x);

/// The unconstrained objective  sum E_i + c * sum P_i^2  compiled once into a
/// single graph. One instance per solve; not shareable across threads.
class Objective {
 public:
  explicit Objective(const LayoutProblem& problem);
  Objective(const Objective&) = delete;
  Objective& operator=(const Objective&) = delete;

  int size() const { return param_count_; }

  /// Value at stiffness `c`; fills `grad` (size m) with the exact gradient.
  double evaluate(std::span<const double> x, double c, std::span<double> grad);

  double total_energy(std::span<const double> x);
  double total_penalty(std::span<const double> x);

 private:
  int param_count_ = 0;
  ad::Graph graph_;
  std::vector<int> energy_nodes_;
  std::vector<int> penalty_nodes_;
  std::vector<std::pair<int, double>> seeds_;
};

/// Gradient of sum E_i + c * sum P_i^2 by reverse accumulation.
std::vector<double> gradient(const LayoutProblem& problem, std::span<const double> x, double c);

}  // namespace diagen::layout
