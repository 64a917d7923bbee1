#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "diagen/dsl/errors.hpp"
#include "diagen/layout/compile.hpp"
#include "diagen/layout/diagram.hpp"
#include "generators.hpp"
#include "geometry_oracle.hpp"

using namespace diagen;
using namespace diagen::layout;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct SetTheory {
  dsl::DomainSchema schema;
  dsl::StyleSheet style;
};

SetTheory set_theory() {
  const std::string dir = std::string(DIAGEN_DOMAIN_DIR) + "/set-theory/";
  SetTheory s;
  s.schema = dsl::parse_domain(slurp(dir + "sets.domain"));
  s.style = dsl::parse_style(slurp(dir + "sets.style"), s.schema);
  return s;
}

double central_difference(const LayoutProblem& p, std::vector<double> x, std::size_t k, double c) {
  auto value = [&](std::span<const double> at) {
    double f = 0.0;
    for (const Term& t : p.energies) f += eval_energy(p, t, at);
    for (const Term& t : p.penalties) f += c * std::pow(eval_penalty(p, t, at), 2);
    return f;
  };
  const double h = 1e-5;
  x[k] += h;
  const double up = value(x);
  x[k] -= 2 * h;
  return (up - value(x)) / (2 * h);
}

}  // namespace

TEST_CASE("autodiff: values and derivatives of each operation") {
  ad::Graph g;
  ad::Var x = g.param(0), y = g.param(1);
  ad::Var f = ad::square(x) * y + ad::sqrt(y) - x / y + ad::abs(x - 5.0) + ad::max0(x - 1.0) + ad::max(x, y) +
              ad::min(x, y) - (-x);
  const std::vector<double> at = {2.0, 4.0};
  g.forward(at);
  CHECK(f.value() == Approx(4 * 4 + 2 - 0.5 + 3 + 1 + 4 + 2 + 2));
  std::vector<double> grad(2, 0.0);
  const std::vector<std::pair<int, double>> seed = {{f.id(), 1.0}};
  g.backward(seed, grad);
  // df/dx = 2xy - 1/y - 1 + 1 + 0 + 1 + 1 ; df/dy = x^2 + 1/(2 sqrt y) + x/y^2 + 1
  CHECK(grad[0] == Approx(16 - 0.25 - 1 + 1 + 0 + 1 + 1));
  CHECK(grad[1] == Approx(4 + 0.25 + 2.0 / 16 + 1));
}

TEST_CASE("autodiff: backward accumulates and honours seed weights") {
  ad::Graph g;
  ad::Var x = g.param(0);
  ad::Var f = ad::square(x);
  const std::vector<double> at = {3.0};
  g.forward(at);
  std::vector<double> grad = {1.0};
  const std::vector<std::pair<int, double>> seed = {{f.id(), 2.0}};
  g.backward(seed, grad);
  CHECK(grad[0] == Approx(1 + 2 * 6));
}

TEST_CASE("property: reverse-mode gradient matches central differences per component") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    testing::Rng rng(900 + s);
    const testing::RandomProblem rp = testing::random_layout_problem(rng, 20);
    const std::vector<double> g = gradient(rp.problem, rp.x, rp.stiffness);
    REQUIRE(g.size() == rp.x.size());
    double scale = 1.0;
    for (double v : g) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double fd = central_difference(rp.problem, rp.x, k, rp.stiffness);
      INFO("seed " << s << " slot " << k);
      CHECK(std::abs(g[k] - fd) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("objective: value is sum E + c sum P^2 and gradient matches gradient()") {
  testing::Rng rng(4);
  const testing::RandomProblem rp = testing::random_layout_problem(rng, 20);
  Objective obj(rp.problem);
  std::vector<double> grad(rp.x.size());
  const double f = obj.evaluate(rp.x, 7.0, grad);
  double expect = 0.0, penalty = 0.0;
  for (const Term& t : rp.problem.energies) expect += eval_energy(rp.problem, t, rp.x);
  for (const Term& t : rp.problem.penalties) {
    const double v = eval_penalty(rp.problem, t, rp.x);
    expect += 7.0 * v * v;
    penalty += v;
  }
  CHECK(f == Approx(expect));
  CHECK(obj.total_penalty(rp.x) == Approx(penalty));
  const auto g2 = gradient(rp.problem, rp.x, 7.0);
  for (std::size_t k = 0; k < grad.size(); ++k) CHECK(grad[k] == Approx(g2[k]));
}

TEST_CASE("penalties vanish exactly on satisfied constraints") {
  LayoutProblem p;
  auto circle = [&](double cx, double cy, double r) {
    ShapeInstance s;
    s.kind = ShapeKind::Circle;
    s.cx = ScalarRef::fixed(cx), s.cy = ScalarRef::fixed(cy), s.r = ScalarRef::fixed(r);
    p.shapes.push_back(s);
  };
  circle(0, 0, 100);
  circle(20, 0, 30);
  circle(200, 0, 30);
  Term contains{TermKind::Contains, {0, 1}, {}, 10.0, {}};
  Term disjoint{TermKind::Disjoint, {1, 2}, {}, 10.0, {}};
  Term overlap{TermKind::Disjoint, {0, 1}, {}, 0.0, {}};
  const std::vector<double> none;
  CHECK(eval_penalty(p, contains, none) == 0.0);
  CHECK(eval_penalty(p, disjoint, none) == 0.0);
  // r1 + r2 - d = 110 for the nested pair, squared.
  CHECK(eval_penalty(p, overlap, none) == Approx(110.0 * 110.0));
}

TEST_CASE("L-BFGS minimizes the Rosenbrock function") {
  DiffFunction rosen = [](std::span<const double> x, std::span<double> g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  SolverSettings s;
  s.max_inner = 2000;
  int steps = 0;
  const LbfgsResult r = lbfgs_minimize(rosen, {-1.2, 1.0}, s, [&](int, double) { ++steps; });
  CHECK(r.x[0] == Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == Approx(1.0).epsilon(1e-5));
  CHECK(r.converged);
  CHECK(steps == r.iterations);
}

TEST_CASE("exterior schedule multiplies stiffness by gamma until feasible") {
  LayoutProblem p;
  p.add_slot(SlotRole::X);
  Term e, c;
  e.custom = [](ad::Graph&, std::span<const ad::Var> x) { return ad::square(x[0] - 3.0); };
  c.custom = [](ad::Graph&, std::span<const ad::Var> x) { return ad::max0(x[0] - 1.0); };
  p.energies.push_back(e);
  p.penalties.push_back(c);
  const SolveResult r = solve_exterior(p, {0.0}, SolverSettings{});
  // x_n = (3 + c_n) / (1 + c_n), so P_n = 2 / (1 + c_n) first drops below 1e-5 at c = 1e6.
  CHECK(r.stiffness == std::vector<double>{10, 100, 1e3, 1e4, 1e5, 1e6});
  CHECK(r.converged);
  CHECK(std::abs(r.params[0] - (3 + 1e6) / (1 + 1e6)) < 1e-9);
  CHECK(r.total_energy == Approx(std::pow(r.params[0] - 3, 2)));

  SolverSettings few;
  few.max_outer = 1;
  const SolveResult short_run = solve_exterior(p, {0.0}, few);
  CHECK_FALSE(short_run.converged);
  CHECK(short_run.outer_rounds == 2);
}

TEST_CASE("solver settings validation") {
  SolverSettings s;
  CHECK_NOTHROW(s.validate());
  s.gamma = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.armijo = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.lbfgs_memory = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sample_init respects slot roles and is deterministic") {
  const auto st = set_theory();
  const auto program = dsl::parse_substance("Set A, B, C\n", st.schema);
  const LayoutProblem p = compile(program, st.style, st.schema);
  const auto x = sample_init(p, 42);
  CHECK(x == sample_init(p, 42));
  CHECK(x != sample_init(p, 43));
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (p.slot_roles[i]) {
      case SlotRole::X: CHECK(std::abs(x[i]) <= p.canvas.width / 2); break;
      case SlotRole::Y: CHECK(std::abs(x[i]) <= p.canvas.height / 2); break;
      case SlotRole::Size:
        CHECK(x[i] >= 600.0 / 20);
        CHECK(x[i] <= 600.0 / 6);
        break;
    }
  }
  CHECK(unit_uniform(0) == 0.0);
  CHECK(unit_uniform(~0ULL) < 1.0);
}

TEST_CASE("compile: shapes, explicit and implicit terms") {
  const auto st = set_theory();
  const auto program = dsl::parse_substance("Set A, B, C\nIsSubset(A, B)\nDisjoint(B, C)\n", st.schema);
  const LayoutProblem p = compile(program, st.style, st.schema);
  REQUIRE(p.shapes.size() == 3);
  CHECK(p.param_count == 9);
  CHECK(p.shapes[0].owners == std::vector<std::string>{"A"});
  CHECK(p.shapes[0].name == "A.icon");
  int on_canvas = 0, min_size = 0, contains = 0, disjoint = 0;
  for (const Term& t : p.penalties) {
    on_canvas += t.kind == TermKind::OnCanvas;
    min_size += t.kind == TermKind::MinSize;
    if (t.kind == TermKind::Contains) {
      ++contains;
      CHECK(t.shapes == std::vector<int>{1, 0});
      CHECK(t.amount == 10.0);
    }
    disjoint += t.kind == TermKind::Disjoint;
  }
  CHECK(on_canvas == 3);
  CHECK(min_size == 6);  // implicit minSize(5) plus the style's minSize(20)
  CHECK(contains == 1);
  CHECK(disjoint == 1);
}

TEST_CASE("compile errors") {
  const auto schema = dsl::parse_domain("type P\npredicate Touch(P, P)\n");
  const auto program = dsl::parse_substance("P a, b\nTouch(a, b)\n", schema);
  auto kind_of = [&](const std::string& style) {
    try {
      compile(program, dsl::parse_style(style, schema), schema);
    } catch (const CompileError& e) {
      return e.kind();
    }
    FAIL("no compile error");
    return CompileError::Kind::BadArgument;
  };
  CHECK(kind_of("forall P x {\n  x.l = Line { start: (?, ?), end: (?, ?) }\n}\n"
                "forall P a; P b where Touch(a, b) {\n  ensure disjoint(a.l, b.l)\n}\n") ==
        CompileError::Kind::UnsupportedShape);
  CHECK(kind_of("forall P a; P b where Touch(a, b) {\n  ensure disjoint(a.icon, b.icon)\n}\n") ==
        CompileError::Kind::UnassignedField);
  // Unbound variables are already rejected by the style parser.
  CHECK_THROWS_AS(dsl::parse_style("forall P x {\n  x.icon = Circle { center: (?, ?), r: ? }\n  ensure minSize(y.icon)\n}\n",
                                   schema),
                  dsl::ParseError);
  CHECK(kind_of("forall P x {\n  x.icon = Circle { center: (?, ?), r: ? }\n}\n"
                "forall P x {\n  x.icon = Circle { center: (?, ?), r: ? }\n}\n") ==
        CompileError::Kind::DuplicateField);
}

TEST_CASE("layout satisfies the oracle and is reproducible per seed") {
  const auto st = set_theory();
  const auto program =
      dsl::parse_substance("Set A, B, C, D\nIsSubset(A, B)\nIsSubset(B, C)\nDisjoint(C, D)\n", st.schema);
  const LayoutProblem problem = compile(program, st.style, st.schema);
  const auto constraints = testing::constraints_of(problem);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Diagram d = layout::layout(program, st.style, st.schema, seed, {});
    REQUIRE(d.meta.converged);
    CHECK(d.meta.total_penalty <= 1e-5);
    CHECK(testing::oracle_failures(d, constraints, std::sqrt(1e-5)).empty());
    const Diagram again = layout::layout(program, st.style, st.schema, seed, {});
    CHECK(again.meta.params == d.meta.params);
    CHECK(d.shapes[0].fill == again.shapes[0].fill);
    CHECK(d.source_program == dsl::serialize_substance(program));
  }
}

TEST_CASE("geometric oracle detects violations") {
  Diagram d;
  d.canvas = {100, 100};
  SolvedShape a, b;
  a.kind = b.kind = ShapeKind::Circle;
  a.r = 10, b.r = 10, b.cx = 15;
  d.shapes = {a, b};
  CHECK(testing::violation(d, {testing::GeoKind::Disjoint, 0, 1, 0.0}) == Approx(5.0));
  CHECK(testing::violation(d, {testing::GeoKind::Contains, 0, 1, 0.0}) == Approx(15.0));
  d.shapes[1].cx = 45;
  CHECK(testing::violation(d, {testing::GeoKind::OnCanvas, 1, -1, 0.0}) == Approx(5.0));
  CHECK(testing::violation(d, {testing::GeoKind::MinSize, 0, -1, 12.0}) == Approx(2.0));
}
