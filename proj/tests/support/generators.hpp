#pragma once

// Hand-rolled random generators for the property suites. Every generator takes
// an explicit engine so failures replay from the printed seed.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "diagen/layout/diagram.hpp"
#include "diagen/qa/mcq.hpp"
#include "geometry_oracle.hpp"

namespace diagen::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + static_cast<double>(gen_() >> 11) * 0x1.0p-53 * (hi - lo);
  }
  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// --- shape programs over a small circles-and-boxes domain -------------------

const std::string& geo_domain_text();
const std::string& geo_style_text();  // contains/disjoint padding kGeoPad
inline constexpr double kGeoPad = 5.0;

struct GeoProgram {
  std::string source;
  std::vector<std::string> ids;
  std::vector<bool> round;                       // circle when true, box otherwise
  std::vector<std::pair<int, int>> inside;       // (inner, outer)
  std::vector<std::pair<int, int>> apart;

  /// Every constraint the program implies, as indices into `diagram.shapes`:
  /// explicit relations plus onCanvas and minSize(5) on every shape.
  std::vector<GeoConstraint> constraints(const layout::Diagram& diagram) const;
};

/// 3..10 shapes arranged in a containment forest of depth <= 3, at least one
/// Inside and one Apart relation, Apart only between shapes where neither
/// encloses the other.
GeoProgram random_geo_program(Rng& rng, int min_shapes = 3, int max_shapes = 10);

// --- raw layout problems ----------------------------------------------------

struct RandomProblem {
  layout::LayoutProblem problem;
  std::vector<double> x;  // a random evaluation point
  double stiffness = 10.0;
};

/// Mixed shapes (circles, boxes, lines, text) and every built-in term kind
/// that applies to them, with at most `max_params` free slots.
RandomProblem random_layout_problem(Rng& rng, int max_params = 20);

// --- Substance programs over the set-theory domain ---------------------------

/// Random set-theory program text drawn from a small alphabet of names so that
/// pairs frequently share statements.
std::string random_set_program(Rng& rng, int max_sets = 5, int max_relations = 5);

/// Same statements as `source`, one per line, shuffled with declarations kept
/// ahead of everything else.
std::string permute_lines(Rng& rng, const std::string& source);

// --- MCQ items -------------------------------------------------------------

/// Fields whose text stays on one line, has no surrounding whitespace and
/// avoids the field keywords, so they are representable in the format.
qa::McqFields random_mcq_fields(Rng& rng);

}  // namespace diagen::testing
