#pragma once

// Plain-double geometry used to check solved diagrams. Nothing here goes
// through the autodiff graph or the term builders.

#include <string>
#include <vector>

#include "diagen/layout/diagram.hpp"

namespace diagen::testing {

enum class GeoKind { Disjoint, Contains, OnCanvas, MinSize };

struct GeoConstraint {
  GeoKind kind = GeoKind::OnCanvas;
  int a = 0;  // outer shape for Contains
  int b = -1;
  double amount = 0.0;  // padding or minimum size
};

/// Largest violation of `c`, in canvas units (0 when satisfied).
double violation(const layout::Diagram& diagram, const GeoConstraint& c);

/// Human-readable description of every constraint violated by more than `tol`.
std::vector<std::string> oracle_failures(const layout::Diagram& diagram,
                                         const std::vector<GeoConstraint>& constraints, double tol);

/// The geometric constraints named by the penalty terms of a compiled problem
/// (kind, shape indices, amount). Equal/LessThan terms are skipped.
std::vector<GeoConstraint> constraints_of(const layout::LayoutProblem& problem);

/// Index of the shape owned by Substance identifier `id`, or -1.
int shape_owned_by(const layout::Diagram& diagram, const std::string& id);

}  // namespace diagen::testing
