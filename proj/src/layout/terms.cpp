#include <array>
#include <stdexcept>

#include <fmt/format.h>

#include "diagen/layout/problem.hpp"

namespace diagen::layout {

using ad::Var;

std::string_view to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Disjoint: return "disjoint";
    case TermKind::Contains: return "contains";
    case TermKind::OnCanvas: return "onCanvas";
    case TermKind::MinSize: return "minSize";
    case TermKind::Equal: return "equal";
    case TermKind::LessThan: return "lessThan";
    case TermKind::Near: return "near";
    case TermKind::Repel: return "repel";
    case TermKind::EqualLength: return "equalLength";
    case TermKind::CenterCanvas: return "centerCanvas";
    case TermKind::Custom: return "custom";
  }
  return "term";
}

std::vector<std::pair<std::string_view, ScalarRef>> shape_params(const ShapeInstance& s) {
  switch (s.kind) {
    case ShapeKind::Circle: return {{"cx", s.cx}, {"cy", s.cy}, {"r", s.r}};
    case ShapeKind::Rectangle:
      return {{"cx", s.cx}, {"cy", s.cy}, {"width", s.width}, {"height", s.height}};
    case ShapeKind::Line:
    case ShapeKind::Arrow:
      return {{"x1", s.x1}, {"y1", s.y1}, {"x2", s.x2}, {"y2", s.y2}, {"strokeWidth", s.stroke_width}};
    case ShapeKind::Text: return {{"cx", s.cx}, {"cy", s.cy}};
  }
  return {};
}

namespace {

bool is_line(ShapeKind k) { return k == ShapeKind::Line || k == ShapeKind::Arrow; }

struct Point {
  Var x;
  Var y;
};

/// Shape parameters lifted into the graph.
struct GShape {
  ShapeKind kind;
  Var cx, cy, r, w, h, x1, y1, x2, y2;
};

class TermGraph {
 public:
  TermGraph(ad::Graph& g, const LayoutProblem& p, std::span<const Var> params)
      : g_(g), p_(p), params_(params) {}

  Var ref(const ScalarRef& s) {
    return s.is_free() ? params_[static_cast<std::size_t>(s.slot)] : g_.constant(s.value);
  }

  GShape shape(int index) {
    const ShapeInstance& s = p_.shapes.at(static_cast<std::size_t>(index));
    GShape out{s.kind, {}, {}, {}, {}, {}, {}, {}, {}, {}};
    switch (s.kind) {
      case ShapeKind::Circle:
        out.cx = ref(s.cx), out.cy = ref(s.cy), out.r = ref(s.r);
        break;
      case ShapeKind::Rectangle:
        out.cx = ref(s.cx), out.cy = ref(s.cy), out.w = ref(s.width), out.h = ref(s.height);
        break;
      case ShapeKind::Line:
      case ShapeKind::Arrow:
        out.x1 = ref(s.x1), out.y1 = ref(s.y1), out.x2 = ref(s.x2), out.y2 = ref(s.y2);
        break;
      case ShapeKind::Text:
        out.cx = ref(s.cx), out.cy = ref(s.cy);
        break;
    }
    return out;
  }

  GShape canvas() {
    GShape c{ShapeKind::Rectangle, g_.constant(0.0), g_.constant(0.0), {}, g_.constant(p_.canvas.width),
             g_.constant(p_.canvas.height), {}, {}, {}, {}};
    return c;
  }

  static Point center(const GShape& s) {
    if (is_line(s.kind)) return {(s.x1 + s.x2) * 0.5, (s.y1 + s.y2) * 0.5};
    return {s.cx, s.cy};
  }

  static Var dist2(Point a, Point b) { return square(a.x - b.x) + square(a.y - b.y); }
  static Var dist(Point a, Point b) { return sqrt(dist2(a, b)); }
  static Var length(const GShape& l) { return dist({l.x1, l.y1}, {l.x2, l.y2}); }

  Var disjoint(const GShape& a, const GShape& b, double pad) {
    if (a.kind == ShapeKind::Circle && b.kind == ShapeKind::Circle) {
      return square(max0(a.r + b.r + pad - dist(center(a), center(b))));
    }
    if (a.kind == ShapeKind::Rectangle && b.kind == ShapeKind::Rectangle) {
      Var ox = (a.w + b.w) * 0.5 + pad - abs(a.cx - b.cx);
      Var oy = (a.h + b.h) * 0.5 + pad - abs(a.cy - b.cy);
      return square(max0(min(ox, oy)));
    }
    if (a.kind == ShapeKind::Circle && b.kind == ShapeKind::Rectangle) return circle_rect(a, b, pad);
    if (a.kind == ShapeKind::Rectangle && b.kind == ShapeKind::Circle) return circle_rect(b, a, pad);
    throw std::invalid_argument("disjoint is defined for circles and rectangles only");
  }

  // Signed distance from the circle center to the rectangle, against r + pad.
  Var circle_rect(const GShape& c, const GShape& rect, double pad) {
    Var qx = abs(c.cx - rect.cx) - rect.w * 0.5;
    Var qy = abs(c.cy - rect.cy) - rect.h * 0.5;
    Var outside = sqrt(square(max0(qx)) + square(max0(qy)));
    Var inside = min(max(qx, qy), g_.constant(0.0));
    return square(max0(c.r + pad - (outside + inside)));
  }

  Var contains(const GShape& outer, const GShape& inner, double pad) {
    // Inner shape as points with half-extents.
    struct Probe {
      Point p;
      Var ex, ey;
    };
    std::vector<Probe> probes;
    Var zero = g_.constant(0.0);
    switch (inner.kind) {
      case ShapeKind::Circle: probes.push_back({{inner.cx, inner.cy}, inner.r, inner.r}); break;
      case ShapeKind::Rectangle:
        probes.push_back({{inner.cx, inner.cy}, inner.w * 0.5, inner.h * 0.5});
        break;
      case ShapeKind::Line:
      case ShapeKind::Arrow:
        probes.push_back({{inner.x1, inner.y1}, zero, zero});
        probes.push_back({{inner.x2, inner.y2}, zero, zero});
        break;
      case ShapeKind::Text: probes.push_back({{inner.cx, inner.cy}, zero, zero}); break;
    }

    if (outer.kind == ShapeKind::Rectangle) {
      Var total = g_.constant(0.0);
      Var hw = outer.w * 0.5;
      Var hh = outer.h * 0.5;
      for (const Probe& q : probes) {
        const std::array<Var, 4> margins = {
            (q.p.x - q.ex - pad) - (outer.cx - hw),
            (outer.cx + hw) - (q.p.x + q.ex + pad),
            (q.p.y - q.ey - pad) - (outer.cy - hh),
            (outer.cy + hh) - (q.p.y + q.ey + pad),
        };
        for (const Var& m : margins) total = total + square(max0(-m));
      }
      return total;
    }
    if (outer.kind == ShapeKind::Circle) {
      const Point oc{outer.cx, outer.cy};
      if (inner.kind == ShapeKind::Circle) {
        return square(max0(dist(oc, {inner.cx, inner.cy}) + inner.r + pad - outer.r));
      }
      std::vector<Point> points;
      if (inner.kind == ShapeKind::Rectangle) {
        Var hw = inner.w * 0.5;
        Var hh = inner.h * 0.5;
        points = {{inner.cx - hw, inner.cy - hh},
                  {inner.cx + hw, inner.cy - hh},
                  {inner.cx - hw, inner.cy + hh},
                  {inner.cx + hw, inner.cy + hh}};
      } else {
        for (const Probe& q : probes) points.push_back(q.p);
      }
      Var total = g_.constant(0.0);
      for (const Point& pt : points) total = total + square(max0(dist(oc, pt) + pad - outer.r));
      return total;
    }
    throw std::invalid_argument("contains needs a circle or rectangle as the outer shape");
  }

  Var min_size(const GShape& s, double smin) {
    switch (s.kind) {
      case ShapeKind::Circle: return square(max0(smin - s.r));
      case ShapeKind::Rectangle: return square(max0(smin - s.w)) + square(max0(smin - s.h));
      case ShapeKind::Line:
      case ShapeKind::Arrow: return square(max0(smin - length(s)));
      case ShapeKind::Text: return g_.constant(0.0);
    }
    return g_.constant(0.0);
  }

  Var build(const Term& t) {
    auto shape_at = [&](std::size_t i) { return shape(t.shapes.at(i)); };
    switch (t.kind) {
      case TermKind::Disjoint: return disjoint(shape_at(0), shape_at(1), t.amount);
      case TermKind::Contains: return contains(shape_at(0), shape_at(1), t.amount);
      case TermKind::OnCanvas: return contains(canvas(), shape_at(0), 0.0);
      case TermKind::MinSize: return min_size(shape_at(0), t.amount);
      case TermKind::Equal: return square(ref(t.scalars.at(0)) - ref(t.scalars.at(1)));
      case TermKind::LessThan: return square(max0(ref(t.scalars.at(0)) - ref(t.scalars.at(1))));
      case TermKind::Near:
        return t.amount * dist2(center(shape_at(0)), center(shape_at(1)));
      case TermKind::Repel:
        return t.amount / (dist2(center(shape_at(0)), center(shape_at(1))) + 1.0);
      case TermKind::EqualLength: return square(length(shape_at(0)) - length(shape_at(1)));
      case TermKind::CenterCanvas: {
        Point c = center(shape_at(0));
        return square(c.x) + square(c.y);
      }
      case TermKind::Custom:
        if (!t.custom) throw std::invalid_argument("custom term without a builder");
        return t.custom(g_, params_);
    }
    throw std::invalid_argument(fmt::format("unhandled term kind {}", to_string(t.kind)));
  }

 private:
  ad::Graph& g_;
  const LayoutProblem& p_;
  std::span<const Var> params_;
};

std::vector<Var> param_nodes(ad::Graph& g, int m) {
  std::vector<Var> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out.push_back(g.param(i));
  return out;
}

double eval_single(const LayoutProblem& problem, const Term& term, std::span<const double> x) {
  ad::Graph g;
  const std::vector<Var> params = param_nodes(g, problem.param_count);
  Var root = build_term(g, problem, term, params);
  g.forward(x);
  return root.value();
}

}  // namespace

Var build_term(ad::Graph& graph, const LayoutProblem& problem, const Term& term,
               std::span<const Var> params) {
  return TermGraph(graph, problem, params).build(term);
}

double eval_penalty(const LayoutProblem& problem, const Term& term, std::span<const double> x) {
  return eval_single(problem, term, x);
}

double eval_energy(const LayoutProblem& problem, const Term& term, std::span<const double> x) {
  return eval_single(problem, term, x);
}

Objective::Objective(const LayoutProblem& problem) : param_count_(problem.param_count) {
  const std::vector<Var> params = param_nodes(graph_, param_count_);
  for (const Term& t : problem.energies) {
    energy_nodes_.push_back(build_term(graph_, problem, t, params).id());
  }
  for (const Term& t : problem.penalties) {
    penalty_nodes_.push_back(build_term(graph_, problem, t, params).id());
  }
  seeds_.reserve(energy_nodes_.size() + penalty_nodes_.size());
}

double Objective::evaluate(std::span<const double> x, double c, std::span<double> grad) {
  graph_.forward(x);
  seeds_.clear();
  double energy = 0.0;
  double penalty_sq = 0.0;
  for (int id : energy_nodes_) {
    energy += graph_.value(id);
    seeds_.emplace_back(id, 1.0);
  }
  for (int id : penalty_nodes_) {
    const double p = graph_.value(id);
    penalty_sq += p * p;
    seeds_.emplace_back(id, 2.0 * c * p);
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  graph_.backward(seeds_, grad);
  return energy + c * penalty_sq;
}

double Objective::total_energy(std::span<const double> x) {
  graph_.forward(x);
  double total = 0.0;
  for (int id : energy_nodes_) total += graph_.value(id);
  return total;
}

double Objective::total_penalty(std::span<const double> x) {
  graph_.forward(x);
  double total = 0.0;
  for (int id : penalty_nodes_) total += graph_.value(id);
  return total;
}

std::vector<double> gradient(const LayoutProblem& problem, std::span<const double> x, double c) {
  Objective objective(problem);
  std::vector<double> grad(static_cast<std::size_t>(problem.param_count), 0.0);
  objective.evaluate(x, c, grad);
  return grad;
}

}  // namespace diagen::layout
