#include "diagen/layout/compile.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace diagen::layout {

using dsl::Expr;
using dsl::StyleRule;

namespace {

using Binding = std::vector<std::pair<std::string, std::string>>;  // rule var -> identifier

struct DeclInfo {
  std::size_t statement;
  std::string type;
  std::string id;
};

std::string join_path(const std::vector<std::string>& path) { return fmt::format("{}", fmt::join(path, ".")); }

class Compiler {
 public:
  Compiler(const dsl::SubstanceProgram& program, const dsl::StyleSheet& style,
           const dsl::DomainSchema& schema)
      : program_(program), style_(style), schema_(schema), labels_(dsl::label_map(program)) {
    problem_.canvas = style.canvas;
    for (std::size_t i = 0; i < program.statements.size(); ++i) {
      if (const auto* d = std::get_if<dsl::Decl>(&program.statements[i].node)) {
        decls_.push_back({i, d->type, d->id});
        types_.emplace(d->id, d->type);
      }
    }
  }

  LayoutProblem run() {
    for (std::size_t s = 0; s < program_.statements.size(); ++s) {
      for (std::size_t r = 0; r < style_.rules.size(); ++r) {
        for (const Binding& b : matches(style_.rules[r], s)) apply(style_.rules[r], r, b);
      }
    }
    add_implicit_terms();
    assign_labels();
    return std::move(problem_);
  }

 private:
  // ---- matching -------------------------------------------------------------

  bool type_fits(const std::string& id, const std::string& var_type) const {
    auto it = types_.find(id);
    return it != types_.end() && schema_.is_subtype(it->second, var_type);
  }

  std::vector<Binding> matches(const StyleRule& rule, std::size_t s) const {
    const dsl::Statement& stmt = program_.statements[s];
    std::vector<Binding> out;
    if (rule.where) {
      const dsl::WhereClause& w = *rule.where;
      std::vector<std::string> targets;  // parallel to the variables named by the clause
      std::vector<std::string> names;
      if (w.kind == dsl::WhereClause::Kind::Predicate) {
        const auto* app = std::get_if<dsl::PredApp>(&stmt.node);
        if (app == nullptr || app->predicate != w.name || app->args.size() != w.args.size()) return out;
        names = w.args;
        targets = app->args;
      } else {
        const auto* bind = std::get_if<dsl::FuncBind>(&stmt.node);
        if (bind == nullptr || bind->function != w.name || bind->args.size() != w.args.size()) return out;
        names = w.args;
        targets = bind->args;
        names.insert(names.begin(), w.bound);
        targets.insert(targets.begin(), bind->id);
      }
      Binding binding;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const dsl::RuleVar* v = rule.find_var(names[i]);
        if (v == nullptr || !type_fits(targets[i], v->type)) return out;
        auto prior = std::find_if(binding.begin(), binding.end(),
                                  [&](const auto& p) { return p.first == names[i]; });
        if (prior != binding.end()) {
          if (prior->second != targets[i]) return out;
          continue;
        }
        binding.emplace_back(names[i], targets[i]);
      }
      // Report bindings in rule-variable order.
      Binding ordered;
      for (const dsl::RuleVar& v : rule.vars) {
        auto it = std::find_if(binding.begin(), binding.end(), [&](const auto& p) { return p.first == v.name; });
        ordered.push_back(*it);
      }
      out.push_back(std::move(ordered));
      return out;
    }

    // Type-only selector: tuples of distinct declarations whose latest member
    // is this statement. Variables of the same type take declarations in
    // increasing order, so each unordered group is matched once.
    if (!std::holds_alternative<dsl::Decl>(stmt.node)) return out;
    std::vector<std::size_t> chosen;  // indices into decls_
    enumerate(rule, s, chosen, out);
    return out;
  }

  void enumerate(const StyleRule& rule, std::size_t anchor, std::vector<std::size_t>& chosen,
                 std::vector<Binding>& out) const {
    const std::size_t k = chosen.size();
    if (k == rule.vars.size()) {
      const bool has_anchor = std::any_of(chosen.begin(), chosen.end(),
                                          [&](std::size_t d) { return decls_[d].statement == anchor; });
      if (!has_anchor) return;
      Binding b;
      for (std::size_t i = 0; i < k; ++i) b.emplace_back(rule.vars[i].name, decls_[chosen[i]].id);
      out.push_back(std::move(b));
      return;
    }
    const dsl::RuleVar& var = rule.vars[k];
    for (std::size_t d = 0; d < decls_.size() && decls_[d].statement <= anchor; ++d) {
      if (!schema_.is_subtype(decls_[d].type, var.type)) continue;
      if (std::find(chosen.begin(), chosen.end(), d) != chosen.end()) continue;
      bool ordered = true;
      for (std::size_t i = 0; i < k; ++i) {
        if (rule.vars[i].type == var.type && chosen[i] > d) ordered = false;
      }
      if (!ordered) continue;
      chosen.push_back(d);
      enumerate(rule, anchor, chosen, out);
      chosen.pop_back();
    }
  }

  // ---- application ----------------------------------------------------------

  struct Scope {
    const StyleRule& rule;
    std::size_t rule_index;
    const Binding& binding;
    std::map<std::string, int> locals;

    std::optional<std::string> ident(const std::string& var) const {
      for (const auto& [v, id] : binding) {
        if (v == var) return id;
      }
      return std::nullopt;
    }
  };

  void apply(const StyleRule& rule, std::size_t rule_index, const Binding& binding) {
    Scope scope{rule, rule_index, binding, {}};
    for (const dsl::Assignment& a : rule.assignments) create_shape(scope, a);
    for (const dsl::TermCall& c : rule.constraints) problem_.penalties.push_back(term(scope, c));
    for (const dsl::TermCall& c : rule.objectives) problem_.energies.push_back(term(scope, c));
  }

  std::string require_ident(const Scope& scope, const std::string& var) const {
    std::optional<std::string> id = scope.ident(var);
    if (!id) {
      throw CompileError(CompileError::Kind::UnmatchedVariable,
                         fmt::format("variable '{}' is not bound by this match", var));
    }
    return *id;
  }

  void create_shape(Scope& scope, const dsl::Assignment& a) {
    ShapeInstance shape;
    shape.kind = a.shape.kind;
    if (a.target.size() == 2) {
      const std::string id = require_ident(scope, a.target[0]);
      shape.name = fmt::format("{}.{}", id, a.target[1]);
      shape.owners = {id};
      if (fields_.count({id, a.target[1]}) > 0) {
        throw CompileError(CompileError::Kind::DuplicateField,
                           fmt::format("{} is assigned by more than one rule application", shape.name));
      }
    } else {
      std::vector<std::string> ids;
      for (const auto& [var, id] : scope.binding) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
      }
      shape.name = fmt::format("{}({})", a.target[0], fmt::join(ids, ","));
      shape.owners = ids;
    }

    const dsl::ShapeTemplate& t = a.shape;
    auto vec_prop = [&](std::string_view prop, ScalarRef& x, ScalarRef& y) {
      if (const Expr* e = t.find(prop)) {
        std::tie(x, y) = vector_expr(scope, *e, shape.name, prop);
      } else {
        x = ScalarRef::free(problem_.add_slot(SlotRole::X));
        y = ScalarRef::free(problem_.add_slot(SlotRole::Y));
      }
    };
    auto scalar_prop = [&](std::string_view prop, ScalarRef& out, std::optional<double> fallback) {
      if (const Expr* e = t.find(prop)) {
        out = scalar_expr(scope, *e, shape.name, prop);
      } else if (fallback) {
        out = ScalarRef::fixed(*fallback);
      } else {
        out = ScalarRef::free(problem_.add_slot(SlotRole::Size));
      }
    };

    switch (shape.kind) {
      case ShapeKind::Circle:
        vec_prop("center", shape.cx, shape.cy);
        scalar_prop("r", shape.r, std::nullopt);
        break;
      case ShapeKind::Rectangle:
        vec_prop("center", shape.cx, shape.cy);
        scalar_prop("width", shape.width, std::nullopt);
        scalar_prop("height", shape.height, std::nullopt);
        break;
      case ShapeKind::Line:
      case ShapeKind::Arrow:
        vec_prop("start", shape.x1, shape.y1);
        vec_prop("end", shape.x2, shape.y2);
        scalar_prop("strokeWidth", shape.stroke_width, kDefaultStrokeWidth);
        break;
      case ShapeKind::Text:
        vec_prop("center", shape.cx, shape.cy);
        if (const Expr* e = t.find("string")) {
          shape.text = string_expr(scope, *e, shape.name);
        } else if (shape.owners.size() == 1) {
          shape.text = label_of(shape.owners.front()).value_or(shape.owners.front());
        }
        break;
    }

    const int index = static_cast<int>(problem_.shapes.size());
    problem_.shapes.push_back(std::move(shape));
    if (a.target.size() == 2) {
      fields_.emplace(std::make_pair(require_ident(scope, a.target[0]), a.target[1]), index);
    } else {
      scope.locals[a.target[0]] = index;
    }
  }

  std::optional<std::string> label_of(const std::string& id) const {
    for (const auto& [ident, text] : labels_) {
      if (ident == id) return text;
    }
    return std::nullopt;
  }

  // Resolves the shape part of a path; returns the shape index and how many
  // path components it consumed.
  std::pair<int, std::size_t> shape_of(const Scope& scope, const Expr& e) const {
    if (e.kind != Expr::Kind::Path) {
      throw CompileError(CompileError::Kind::BadArgument, "expected a shape reference");
    }
    const std::string& head = e.path.front();
    if (auto it = scope.locals.find(head); it != scope.locals.end()) return {it->second, 1};
    if (scope.rule.find_var(head) == nullptr) {
      throw CompileError(CompileError::Kind::UnassignedField,
                         fmt::format("'{}' is referenced before assignment", head));
    }
    const std::string id = require_ident(scope, head);
    if (e.path.size() < 2) {
      throw CompileError(CompileError::Kind::BadArgument,
                         fmt::format("'{}' must name a field", head));
    }
    auto it = fields_.find({id, e.path[1]});
    if (it == fields_.end()) {
      throw CompileError(CompileError::Kind::UnassignedField,
                         fmt::format("{}.{} is referenced before assignment", id, e.path[1]));
    }
    return {it->second, 2};
  }

  int shape_arg(const Scope& scope, const Expr& e) const {
    auto [index, used] = shape_of(scope, e);
    if (used != e.path.size()) {
      throw CompileError(CompileError::Kind::BadArgument,
                         fmt::format("'{}' is a property, not a shape", join_path(e.path)));
    }
    return index;
  }

  /// Vector-valued property (center/start/end) of an existing shape.
  std::optional<std::pair<ScalarRef, ScalarRef>> vector_of(const ShapeInstance& s,
                                                          std::string_view prop) const {
    const bool line = s.kind == ShapeKind::Line || s.kind == ShapeKind::Arrow;
    if (prop == "center" && !line) return std::make_pair(s.cx, s.cy);
    if (prop == "start" && line) return std::make_pair(s.x1, s.y1);
    if (prop == "end" && line) return std::make_pair(s.x2, s.y2);
    return std::nullopt;
  }

  std::optional<ScalarRef> scalar_of(const ShapeInstance& s, std::string_view prop) const {
    switch (s.kind) {
      case ShapeKind::Circle:
        if (prop == "r") return s.r;
        break;
      case ShapeKind::Rectangle:
        if (prop == "width") return s.width;
        if (prop == "height") return s.height;
        break;
      case ShapeKind::Line:
      case ShapeKind::Arrow:
        if (prop == "strokeWidth") return s.stroke_width;
        break;
      case ShapeKind::Text: break;
    }
    return std::nullopt;
  }

  std::pair<ScalarRef, ScalarRef> vector_expr(const Scope& scope, const Expr& e,
                                              const std::string& owner, std::string_view prop) {
    switch (e.kind) {
      case Expr::Kind::Free:
        return {ScalarRef::free(problem_.add_slot(SlotRole::X)),
                ScalarRef::free(problem_.add_slot(SlotRole::Y))};
      case Expr::Kind::Vec:
        return {coordinate(scope, e.items[0], SlotRole::X, owner, prop),
                coordinate(scope, e.items[1], SlotRole::Y, owner, prop)};
      case Expr::Kind::Path: {
        auto [index, used] = shape_of(scope, e);
        if (used + 1 == e.path.size()) {
          const ShapeInstance& s = problem_.shapes[static_cast<std::size_t>(index)];
          if (auto v = vector_of(s, e.path[used])) return *v;
        }
        break;
      }
      default: break;
    }
    throw CompileError(CompileError::Kind::BadArgument,
                       fmt::format("{}.{} needs a point: '(x, y)', '?' or a shape point", owner, prop));
  }

  ScalarRef coordinate(const Scope& scope, const Expr& e, SlotRole role, const std::string& owner,
                       std::string_view prop) {
    if (e.kind == Expr::Kind::Free) return ScalarRef::free(problem_.add_slot(role));
    return scalar_expr(scope, e, owner, prop);
  }

  ScalarRef scalar_expr(const Scope& scope, const Expr& e, const std::string& owner,
                        std::string_view prop) {
    switch (e.kind) {
      case Expr::Kind::Number: return ScalarRef::fixed(e.number);
      case Expr::Kind::Free: return ScalarRef::free(problem_.add_slot(SlotRole::Size));
      case Expr::Kind::Path: return scalar_path(scope, e);
      default: break;
    }
    throw CompileError(CompileError::Kind::BadArgument,
                       fmt::format("{}.{} needs a number, '?' or a scalar property", owner, prop));
  }

  ScalarRef scalar_path(const Scope& scope, const Expr& e) const {
    if (e.path.front() == "canvas") {
      return ScalarRef::fixed(e.path[1] == "width" ? problem_.canvas.width : problem_.canvas.height);
    }
    auto [index, used] = shape_of(scope, e);
    const ShapeInstance& s = problem_.shapes[static_cast<std::size_t>(index)];
    const std::size_t rest = e.path.size() - used;
    if (rest == 1) {
      if (auto v = scalar_of(s, e.path[used])) return *v;
    } else if (rest == 2) {
      if (auto v = vector_of(s, e.path[used])) {
        if (e.path[used + 1] == "x") return v->first;
        if (e.path[used + 1] == "y") return v->second;
      }
    }
    throw CompileError(CompileError::Kind::BadArgument,
                       fmt::format("'{}' is not a scalar property of a {}", join_path(e.path),
                                   dsl::to_string(s.kind)));
  }

  std::string string_expr(const Scope& scope, const Expr& e, const std::string& owner) const {
    if (e.kind == Expr::Kind::String) return e.text;
    if (e.kind == Expr::Kind::Path && e.path.size() == 2 && e.path[1] == "label" &&
        scope.rule.find_var(e.path[0]) != nullptr) {
      const std::string id = require_ident(scope, e.path[0]);
      return label_of(id).value_or(id);
    }
    throw CompileError(CompileError::Kind::BadArgument,
                       fmt::format("{}.string needs a string literal or v.label", owner));
  }

  double number_arg(const Expr& e, std::string_view term) const {
    if (e.kind != Expr::Kind::Number) {
      throw CompileError(CompileError::Kind::BadArgument,
                         fmt::format("optional argument of '{}' must be a number", term));
    }
    return e.number;
  }

  Term term(const Scope& scope, const dsl::TermCall& call) {
    Term t;
    const std::string& n = call.name;
    auto shape_kind = [&](int index) { return problem_.shapes[static_cast<std::size_t>(index)].kind; };
    auto require = [&](bool ok, std::string_view what) {
      if (!ok) {
        throw CompileError(CompileError::Kind::UnsupportedShape,
                           fmt::format("'{}' {}", n, what));
      }
    };
    auto is_area = [](ShapeKind k) { return k == ShapeKind::Circle || k == ShapeKind::Rectangle; };
    auto is_line = [](ShapeKind k) { return k == ShapeKind::Line || k == ShapeKind::Arrow; };

    if (n == "disjoint" || n == "contains") {
      t.kind = n == "disjoint" ? TermKind::Disjoint : TermKind::Contains;
      t.shapes = {shape_arg(scope, call.args[0]), shape_arg(scope, call.args[1])};
      if (call.args.size() > 2) t.amount = number_arg(call.args[2], n);
      if (t.kind == TermKind::Disjoint) {
        require(is_area(shape_kind(t.shapes[0])) && is_area(shape_kind(t.shapes[1])),
                "is defined for circles and rectangles only");
      } else {
        require(is_area(shape_kind(t.shapes[0])), "needs a circle or rectangle as the outer shape");
      }
    } else if (n == "onCanvas") {
      t.kind = TermKind::OnCanvas;
      t.shapes = {shape_arg(scope, call.args[0])};
    } else if (n == "minSize") {
      t.kind = TermKind::MinSize;
      t.shapes = {shape_arg(scope, call.args[0])};
      t.amount = call.args.size() > 1 ? number_arg(call.args[1], n) : kMinShapeSize;
      require(shape_kind(t.shapes[0]) != ShapeKind::Text, "does not apply to text");
    } else if (n == "equal" || n == "lessThan") {
      t.kind = n == "equal" ? TermKind::Equal : TermKind::LessThan;
      for (const Expr& e : call.args) {
        if (e.kind == Expr::Kind::Number) {
          t.scalars.push_back(ScalarRef::fixed(e.number));
        } else if (e.kind == Expr::Kind::Path) {
          t.scalars.push_back(scalar_path(scope, e));
        } else {
          throw CompileError(CompileError::Kind::BadArgument,
                             fmt::format("'{}' compares numbers or scalar properties", n));
        }
      }
    } else if (n == "near" || n == "repel") {
      t.kind = n == "near" ? TermKind::Near : TermKind::Repel;
      t.shapes = {shape_arg(scope, call.args[0]), shape_arg(scope, call.args[1])};
      t.amount = call.args.size() > 2 ? number_arg(call.args[2], n) : 1.0;
    } else if (n == "equalLength") {
      t.kind = TermKind::EqualLength;
      t.shapes = {shape_arg(scope, call.args[0]), shape_arg(scope, call.args[1])};
      require(is_line(shape_kind(t.shapes[0])) && is_line(shape_kind(t.shapes[1])),
              "is defined for lines and arrows only");
    } else if (n == "centerCanvas") {
      t.kind = TermKind::CenterCanvas;
      t.shapes = {shape_arg(scope, call.args[0])};
    } else {
      throw CompileError(CompileError::Kind::BadArgument, fmt::format("unknown term '{}'", n));
    }
    return t;
  }

  void add_implicit_terms() {
    for (std::size_t i = 0; i < problem_.shapes.size(); ++i) {
      const int index = static_cast<int>(i);
      problem_.penalties.push_back(Term{TermKind::OnCanvas, {index}, {}, 0.0, {}});
      const ShapeKind k = problem_.shapes[i].kind;
      if (k == ShapeKind::Circle || k == ShapeKind::Rectangle) {
        problem_.penalties.push_back(Term{TermKind::MinSize, {index}, {}, kMinShapeSize, {}});
      }
    }
  }

  void assign_labels() {
    for (const auto& [id, text] : labels_) {
      for (ShapeInstance& s : problem_.shapes) {
        if (s.kind != ShapeKind::Text && s.owners.size() == 1 && s.owners.front() == id) {
          s.label = text;
          break;
        }
      }
    }
  }

  const dsl::SubstanceProgram& program_;
  const dsl::StyleSheet& style_;
  const dsl::DomainSchema& schema_;
  std::vector<std::pair<std::string, std::string>> labels_;
  std::vector<DeclInfo> decls_;
  std::map<std::string, std::string> types_;
  std::map<std::pair<std::string, std::string>, int> fields_;
  LayoutProblem problem_;
};

}  // namespace

LayoutProblem compile(const dsl::SubstanceProgram& program, const dsl::StyleSheet& style,
                      const dsl::DomainSchema& schema) {
  return Compiler(program, style, schema).run();
}

}  // namespace diagen::layout
