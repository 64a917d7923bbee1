#include "diagen/dsl/style.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "lexer.hpp"

namespace diagen::dsl {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Circle: return "Circle";
    case ShapeKind::Rectangle: return "Rectangle";
    case ShapeKind::Line: return "Line";
    case ShapeKind::Arrow: return "Arrow";
    case ShapeKind::Text: return "Text";
  }
  return "Shape";
}

std::optional<ShapeKind> shape_kind_from(std::string_view name) {
  for (ShapeKind k : {ShapeKind::Circle, ShapeKind::Rectangle, ShapeKind::Line, ShapeKind::Arrow,
                      ShapeKind::Text}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

const std::vector<std::string_view>& shape_properties(ShapeKind kind) {
  static const std::vector<std::string_view> kCircle = {"center", "r"};
  static const std::vector<std::string_view> kRect = {"center", "width", "height"};
  static const std::vector<std::string_view> kLine = {"start", "end", "strokeWidth"};
  static const std::vector<std::string_view> kText = {"center", "string"};
  switch (kind) {
    case ShapeKind::Circle: return kCircle;
    case ShapeKind::Rectangle: return kRect;
    case ShapeKind::Line:
    case ShapeKind::Arrow: return kLine;
    case ShapeKind::Text: return kText;
  }
  return kCircle;
}

const Expr* ShapeTemplate::find(std::string_view prop) const {
  auto it = std::find_if(props.begin(), props.end(), [&](const auto& p) { return p.first == prop; });
  return it == props.end() ? nullptr : &it->second;
}

const RuleVar* StyleRule::find_var(std::string_view name) const {
  auto it = std::find_if(vars.begin(), vars.end(), [&](const RuleVar& v) { return v.name == name; });
  return it == vars.end() ? nullptr : &*it;
}

const std::vector<TermSignature>& constraint_signatures() {
  static const std::vector<TermSignature> kSigs = {
      {"disjoint", 2, 3}, {"contains", 2, 3}, {"onCanvas", 1, 1},
      {"minSize", 1, 2},  {"equal", 2, 2},    {"lessThan", 2, 2},
  };
  return kSigs;
}

const std::vector<TermSignature>& objective_signatures() {
  static const std::vector<TermSignature> kSigs = {
      {"near", 2, 3}, {"repel", 2, 3}, {"equalLength", 2, 2}, {"centerCanvas", 1, 1},
  };
  return kSigs;
}

namespace {

const TermSignature* find_signature(const std::vector<TermSignature>& sigs, std::string_view name) {
  auto it = std::find_if(sigs.begin(), sigs.end(), [&](const TermSignature& s) { return s.name == name; });
  return it == sigs.end() ? nullptr : &*it;
}

class StyleParser {
 public:
  StyleParser(std::string_view text, const DomainSchema& schema)
      : ts_(detail::tokenize(text, /*keep_newlines=*/false)), schema_(schema) {}

  StyleSheet run() {
    StyleSheet sheet;
    bool canvas_seen = false;
    while (!ts_.at_end()) {
      const Token& head = ts_.expect_identifier("at start of style block");
      if (head.text == "canvas") {
        if (canvas_seen) {
          throw ParseError(ErrorKind::DuplicateName, head.pos, "canvas block given twice");
        }
        canvas_seen = true;
        sheet.canvas = canvas_block();
      } else if (head.text == "forall") {
        sheet.rules.push_back(rule(head.pos));
      } else {
        ts_.fail(head, fmt::format("expected 'forall' or 'canvas', found '{}'", head.text));
      }
    }
    return sheet;
  }

 private:
  Canvas canvas_block() {
    Canvas canvas;
    ts_.expect_symbol("{", "after 'canvas'");
    while (!ts_.accept_symbol("}")) {
      const Token& key = ts_.expect_identifier("in canvas block");
      ts_.expect_symbol("=", fmt::format("after '{}'", key.text));
      const Token& value = ts_.next();
      if (value.kind != TokenKind::Number) {
        ts_.fail(value, fmt::format("expected number for canvas {}", key.text));
      }
      if (!(value.number > 0.0)) {
        throw ParseError(ErrorKind::InvalidCanvas, value.pos,
                         fmt::format("canvas {} must be positive, got {}", key.text, value.text));
      }
      if (key.text == "width") {
        canvas.width = value.number;
      } else if (key.text == "height") {
        canvas.height = value.number;
      } else {
        throw ParseError(ErrorKind::UnknownProperty, key.pos,
                         fmt::format("canvas has no property '{}'", key.text));
      }
      ts_.accept_symbol(";");
    }
    return canvas;
  }

  StyleRule rule(SourcePos pos) {
    StyleRule r;
    r.pos = pos;
    // forall T a; T b [where ...] {
    while (true) {
      const Token& type = ts_.expect_identifier("as selector type");
      if (schema_.find_type(type.text) == nullptr) {
        throw ParseError(ErrorKind::UndeclaredType, type.pos,
                         fmt::format("type '{}' is not declared", type.text));
      }
      do {
        const Token& name = ts_.expect_identifier(fmt::format("after type '{}'", type.text));
        if (name.text == "canvas" || is_reserved_word(name.text)) {
          ts_.fail(name, fmt::format("'{}' is a reserved word", name.text));
        }
        if (r.find_var(name.text) != nullptr) {
          throw ParseError(ErrorKind::DuplicateName, name.pos,
                           fmt::format("selector variable '{}' declared twice", name.text));
        }
        r.vars.push_back({type.text, name.text, name.pos});
      } while (ts_.accept_symbol(","));
      if (!ts_.accept_symbol(";")) break;
    }
    if (ts_.peek().is_word("where")) {
      ts_.next();
      r.where = where_clause(r);
    }
    ts_.expect_symbol("{", "to open rule body");
    while (!ts_.accept_symbol("}")) {
      body_item(r);
      ts_.accept_symbol(";");
    }
    return r;
  }

  WhereClause where_clause(const StyleRule& r) {
    WhereClause w;
    const Token& first = ts_.expect_identifier("after 'where'");
    w.pos = first.pos;
    std::vector<const Token*> arg_tokens;
    auto read_args = [&] {
      ts_.expect_symbol("(", fmt::format("after '{}'", w.name));
      if (ts_.accept_symbol(")")) return;
      do {
        arg_tokens.push_back(&ts_.expect_identifier("as selector argument"));
      } while (ts_.accept_symbol(","));
      ts_.expect_symbol(")", "after selector arguments");
    };

    std::vector<std::string> params;
    if (ts_.accept_symbol(":=")) {
      w.kind = WhereClause::Kind::Function;
      w.bound = first.text;
      const Token& fn = ts_.expect_identifier("after ':='");
      w.name = fn.text;
      w.pos = fn.pos;
      const FunctionDecl* decl = schema_.find_function(fn.text);
      if (decl == nullptr) {
        throw ParseError(ErrorKind::UnknownFunction, fn.pos,
                         fmt::format("function '{}' is not declared", fn.text));
      }
      params = decl->params;
      read_args();
      const RuleVar* bound = r.find_var(w.bound);
      if (bound == nullptr) {
        throw ParseError(ErrorKind::UndeclaredIdentifier, first.pos,
                         fmt::format("'{}' is not a selector variable", w.bound));
      }
      check_compatible(*bound, decl->result, first.pos);
    } else {
      w.kind = WhereClause::Kind::Predicate;
      w.name = first.text;
      const PredicateDecl* decl = schema_.find_predicate(first.text);
      if (decl == nullptr) {
        throw ParseError(ErrorKind::UnknownPredicate, first.pos,
                         fmt::format("predicate '{}' is not declared", first.text));
      }
      params = decl->params;
      read_args();
    }

    if (arg_tokens.size() != params.size()) {
      throw ParseError(ErrorKind::ArityMismatch, w.pos,
                       fmt::format("'{}' expects {} argument(s), got {}", w.name, params.size(),
                                   arg_tokens.size()));
    }
    for (std::size_t i = 0; i < arg_tokens.size(); ++i) {
      const RuleVar* v = r.find_var(arg_tokens[i]->text);
      if (v == nullptr) {
        throw ParseError(ErrorKind::UndeclaredIdentifier, arg_tokens[i]->pos,
                         fmt::format("'{}' is not a selector variable", arg_tokens[i]->text));
      }
      check_compatible(*v, params[i], arg_tokens[i]->pos);
      w.args.push_back(arg_tokens[i]->text);
    }
    // Matching is anchored at the statement, so each variable must be bound by it.
    for (const RuleVar& v : r.vars) {
      const bool bound = v.name == w.bound ||
                         std::find(w.args.begin(), w.args.end(), v.name) != w.args.end();
      if (!bound) {
        throw ParseError(ErrorKind::UndeclaredIdentifier, v.pos,
                         fmt::format("selector variable '{}' is not bound by the where clause", v.name));
      }
    }
    return w;
  }

  void check_compatible(const RuleVar& v, const std::string& param, SourcePos pos) const {
    if (!schema_.is_subtype(v.type, param) && !schema_.is_subtype(param, v.type)) {
      throw ParseError(ErrorKind::TypeMismatch, pos,
                       fmt::format("selector variable '{}' of type {} can never match {}", v.name,
                                   v.type, param));
    }
  }

  void body_item(StyleRule& r) {
    const Token& head = ts_.expect_identifier("in rule body");
    if (head.text == "ensure" || head.text == "encourage") {
      const bool is_constraint = head.text == "ensure";
      const Token& name = ts_.expect_identifier(fmt::format("after '{}'", head.text));
      const auto& sigs = is_constraint ? constraint_signatures() : objective_signatures();
      const TermSignature* sig = find_signature(sigs, name.text);
      if (sig == nullptr) {
        throw ParseError(is_constraint ? ErrorKind::UnknownConstraint : ErrorKind::UnknownObjective,
                         name.pos,
                         fmt::format("unknown {} '{}'", is_constraint ? "constraint" : "objective",
                                     name.text));
      }
      TermCall call{name.text, {}, name.pos};
      ts_.expect_symbol("(", fmt::format("after '{}'", name.text));
      if (!ts_.accept_symbol(")")) {
        do {
          call.args.push_back(expr(r));
        } while (ts_.accept_symbol(","));
        ts_.expect_symbol(")", "after term arguments");
      }
      if (call.args.size() < sig->min_args || call.args.size() > sig->max_args) {
        const std::string expected = sig->min_args == sig->max_args
                                         ? fmt::format("{}", sig->min_args)
                                         : fmt::format("{} to {}", sig->min_args, sig->max_args);
        throw ParseError(ErrorKind::ArityMismatch, name.pos,
                         fmt::format("'{}' expects {} argument(s), got {}", name.text, expected,
                                     call.args.size()));
      }
      (is_constraint ? r.constraints : r.objectives).push_back(std::move(call));
      return;
    }

    Assignment a;
    a.pos = head.pos;
    a.target.push_back(head.text);
    if (ts_.accept_symbol(".")) {
      if (r.find_var(head.text) == nullptr) {
        throw ParseError(ErrorKind::UndeclaredIdentifier, head.pos,
                         fmt::format("'{}' is not a selector variable", head.text));
      }
      a.target.push_back(ts_.expect_identifier("as field name").text);
    } else if (r.find_var(head.text) != nullptr) {
      ts_.fail(head, fmt::format("cannot assign to selector variable '{}' directly", head.text));
    }
    if (a.target.back() == "label") {
      ts_.fail(head, "'label' is a reserved field");
    }
    ts_.expect_symbol("=", "in assignment");
    a.shape = shape_template(r);
    r.assignments.push_back(std::move(a));
  }

  ShapeTemplate shape_template(const StyleRule& r) {
    const Token& kind = ts_.expect_identifier("as shape kind");
    const std::optional<ShapeKind> k = shape_kind_from(kind.text);
    if (!k) {
      throw ParseError(ErrorKind::UnknownShape, kind.pos,
                       fmt::format("unknown shape kind '{}'", kind.text));
    }
    ShapeTemplate shape{*k, {}, kind.pos};
    ts_.expect_symbol("{", fmt::format("after '{}'", kind.text));
    while (!ts_.accept_symbol("}")) {
      const Token& prop = ts_.expect_identifier("as shape property");
      const auto& allowed = shape_properties(*k);
      if (std::find(allowed.begin(), allowed.end(), prop.text) == allowed.end()) {
        throw ParseError(ErrorKind::UnknownProperty, prop.pos,
                         fmt::format("{} has no property '{}'", kind.text, prop.text));
      }
      if (shape.find(prop.text) != nullptr) {
        throw ParseError(ErrorKind::DuplicateName, prop.pos,
                         fmt::format("property '{}' given twice", prop.text));
      }
      ts_.expect_symbol(":", fmt::format("after '{}'", prop.text));
      shape.props.emplace_back(prop.text, expr(r));
      if (!ts_.accept_symbol(",")) ts_.accept_symbol(";");
    }
    return shape;
  }

  Expr expr(const StyleRule& r) {
    const Token& t = ts_.next();
    Expr e;
    e.pos = t.pos;
    switch (t.kind) {
      case TokenKind::Number:
        e.kind = Expr::Kind::Number;
        e.number = t.number;
        return e;
      case TokenKind::String:
        e.kind = Expr::Kind::String;
        e.text = t.text;
        return e;
      case TokenKind::Identifier: {
        e.kind = Expr::Kind::Path;
        e.path.push_back(t.text);
        while (ts_.accept_symbol(".")) {
          e.path.push_back(ts_.expect_identifier("after '.'").text);
        }
        if (e.path.front() == "canvas") {
          if (e.path.size() != 2 || (e.path[1] != "width" && e.path[1] != "height")) {
            throw ParseError(ErrorKind::UnknownProperty, t.pos,
                             "only canvas.width and canvas.height can be referenced");
          }
        } else if (r.find_var(e.path.front()) != nullptr) {
          if (e.path.size() < 2) {
            ts_.fail(t, fmt::format("selector variable '{}' must be followed by a field", t.text));
          }
        } else if (!has_local(r, e.path.front())) {
          throw ParseError(ErrorKind::UndeclaredIdentifier, t.pos,
                           fmt::format("'{}' is not a selector variable or local shape", t.text));
        }
        return e;
      }
      case TokenKind::Symbol:
        if (t.text == "?") {
          e.kind = Expr::Kind::Free;
          return e;
        }
        if (t.text == "(") {
          e.kind = Expr::Kind::Vec;
          e.items.push_back(expr(r));
          ts_.expect_symbol(",", "between vector components");
          e.items.push_back(expr(r));
          ts_.expect_symbol(")", "after vector");
          return e;
        }
        break;
      default:
        break;
    }
    ts_.fail(t, fmt::format("expected expression, found {}", detail::describe(t)));
  }

  static bool has_local(const StyleRule& r, std::string_view name) {
    return std::any_of(r.assignments.begin(), r.assignments.end(), [&](const Assignment& a) {
      return a.target.size() == 1 && a.target.front() == name;
    });
  }

  TokenStream ts_;
  const DomainSchema& schema_;
};

}  // namespace

StyleSheet parse_style(std::string_view source, const DomainSchema& schema) {
  const std::string text = detail::normalize_newlines(source);
  return StyleParser(text, schema).run();
}

}  // namespace diagen::dsl
