#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/errors.hpp"

namespace diagen::dsl {

enum class ShapeKind { Circle, Rectangle, Line, Arrow, Text };

std::string_view to_string(ShapeKind kind);
std::optional<ShapeKind> shape_kind_from(std::string_view name);

/// Property names accepted by a shape kind, in canonical order.
const std::vector<std::string_view>& shape_properties(ShapeKind kind);

/// Right-hand side of a shape property or a term argument.
struct Expr {
  enum class Kind {
    Number,  // 12.5
    Free,    // ?  (an optimized parameter)
    Vec,     // (e, e)
    Path,    // a.icon, a.icon.center, canvas.width, a.label
    String,  // "text"
  };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  std::vector<std::string> path;
  std::vector<Expr> items;
  SourcePos pos;
};

struct RuleVar {
  std::string type;
  std::string name;
  SourcePos pos;
};

/// `where P(a, b)` or `where x := F(a)`.
struct WhereClause {
  enum class Kind { Predicate, Function };
  Kind kind = Kind::Predicate;
  std::string name;
  std::vector<std::string> args;
  std::string bound;  // Function only
  SourcePos pos;
};

struct ShapeTemplate {
  ShapeKind kind = ShapeKind::Circle;
  std::vector<std::pair<std::string, Expr>> props;
  SourcePos pos;

  const Expr* find(std::string_view prop) const;
};

/// `v.field = Shape{...}` (target has two parts) or `name = Shape{...}`.
struct Assignment {
  std::vector<std::string> target;
  ShapeTemplate shape;
  SourcePos pos;
};

/// `ensure name(args)` or `encourage name(args)`.
struct TermCall {
  std::string name;
  std::vector<Expr> args;
  SourcePos pos;
};

struct StyleRule {
  std::vector<RuleVar> vars;
  std::optional<WhereClause> where;
  std::vector<Assignment> assignments;
  std::vector<TermCall> constraints;
  std::vector<TermCall> objectives;
  SourcePos pos;

  const RuleVar* find_var(std::string_view name) const;
};

struct Canvas {
  double width = 600.0;
  double height = 600.0;
};

struct StyleSheet {
  Canvas canvas;
  std::vector<StyleRule> rules;
};

/// Names and argument-count ranges of the built-in terms.
struct TermSignature {
  std::string_view name;
  std::size_t min_args;
  std::size_t max_args;
};
const std::vector<TermSignature>& constraint_signatures();
const std::vector<TermSignature>& objective_signatures();

StyleSheet parse_style(std::string_view source, const DomainSchema& schema);

}  // namespace diagen::dsl
