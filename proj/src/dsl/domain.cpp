#include "diagen/dsl/domain.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lexer.hpp"

namespace diagen::dsl {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

const TypeDecl* DomainSchema::find_type(std::string_view name) const {
  auto it = std::find_if(types.begin(), types.end(), [&](const TypeDecl& t) { return t.name == name; });
  return it == types.end() ? nullptr : &*it;
}

const PredicateDecl* DomainSchema::find_predicate(std::string_view name) const {
  auto it = std::find_if(predicates.begin(), predicates.end(),
                         [&](const PredicateDecl& p) { return p.name == name; });
  return it == predicates.end() ? nullptr : &*it;
}

const FunctionDecl* DomainSchema::find_function(std::string_view name) const {
  auto it = std::find_if(functions.begin(), functions.end(),
                         [&](const FunctionDecl& f) { return f.name == name; });
  return it == functions.end() ? nullptr : &*it;
}

bool DomainSchema::is_subtype(std::string_view sub, std::string_view super) const {
  // Cycles are rejected at parse time, so the chain is finite.
  std::string_view current = sub;
  for (std::size_t guard = 0; guard <= types.size(); ++guard) {
    if (current == super) return true;
    const TypeDecl* decl = find_type(current);
    if (decl == nullptr || !decl->supertype) return false;
    current = *decl->supertype;
  }
  return false;
}

std::string DomainSchema::to_text() const {
  std::string out;
  for (const TypeDecl& t : types) {
    out += t.supertype ? fmt::format("type {} <: {}\n", t.name, *t.supertype)
                       : fmt::format("type {}\n", t.name);
  }
  for (const PredicateDecl& p : predicates) {
    out += fmt::format("predicate {}({})\n", p.name, fmt::join(p.params, ", "));
  }
  for (const FunctionDecl& f : functions) {
    out += fmt::format("function {}({}) -> {}\n", f.name, fmt::join(f.params, ", "), f.result);
  }
  return out;
}

bool is_reserved_word(std::string_view word) {
  static const std::set<std::string_view> kReserved = {
      "type", "predicate", "function", "Label", "AutoLabel", "All",
      "forall", "where", "ensure", "encourage", "canvas"};
  return kReserved.count(word) > 0;
}

namespace {

struct TypeRef {
  std::string name;
  SourcePos pos;
};

std::vector<TypeRef> parse_param_list(TokenStream& ts, std::string_view owner) {
  std::vector<TypeRef> params;
  ts.expect_symbol("(", fmt::format("after '{}'", owner));
  if (ts.accept_symbol(")")) return params;
  while (true) {
    const Token& t = ts.expect_identifier(fmt::format("as parameter type of '{}'", owner));
    params.push_back({t.text, t.pos});
    if (ts.accept_symbol(")")) break;
    ts.expect_symbol(",", "between parameter types");
  }
  return params;
}

}  // namespace

DomainSchema parse_domain(std::string_view source) {
  const std::string text = detail::normalize_newlines(source);
  TokenStream ts(detail::tokenize(text, /*keep_newlines=*/true));
  DomainSchema schema;
  // Every type reference is checked once the whole file is read, so
  // declarations may appear in any order.
  std::vector<TypeRef> references;

  while (!ts.at_end()) {
    ts.skip_newlines();
    if (ts.at_end()) break;
    const Token& keyword = ts.expect_identifier("at start of declaration");
    if (keyword.text == "type") {
      const Token& name = ts.expect_identifier("after 'type'");
      if (is_reserved_word(name.text)) {
        ts.fail(name, fmt::format("'{}' is a reserved word", name.text));
      }
      if (schema.find_type(name.text) != nullptr) {
        throw ParseError(ErrorKind::DuplicateName, name.pos,
                         fmt::format("type '{}' declared twice", name.text));
      }
      TypeDecl decl{name.text, std::nullopt, name.pos};
      if (ts.accept_symbol("<:")) {
        const Token& super = ts.expect_identifier("after '<:'");
        decl.supertype = super.text;
        references.push_back({super.text, super.pos});
      }
      schema.types.push_back(std::move(decl));
    } else if (keyword.text == "predicate") {
      const Token& name = ts.expect_identifier("after 'predicate'");
      if (is_reserved_word(name.text)) {
        ts.fail(name, fmt::format("'{}' is a reserved word", name.text));
      }
      if (schema.find_predicate(name.text) != nullptr) {
        throw ParseError(ErrorKind::DuplicateName, name.pos,
                         fmt::format("predicate '{}' declared twice", name.text));
      }
      PredicateDecl decl{name.text, {}, name.pos};
      for (TypeRef& ref : parse_param_list(ts, name.text)) {
        decl.params.push_back(ref.name);
        references.push_back(std::move(ref));
      }
      schema.predicates.push_back(std::move(decl));
    } else if (keyword.text == "function") {
      const Token& name = ts.expect_identifier("after 'function'");
      if (is_reserved_word(name.text)) {
        ts.fail(name, fmt::format("'{}' is a reserved word", name.text));
      }
      if (schema.find_function(name.text) != nullptr) {
        throw ParseError(ErrorKind::DuplicateName, name.pos,
                         fmt::format("function '{}' declared twice", name.text));
      }
      FunctionDecl decl{name.text, {}, "", name.pos};
      for (TypeRef& ref : parse_param_list(ts, name.text)) {
        decl.params.push_back(ref.name);
        references.push_back(std::move(ref));
      }
      ts.expect_symbol("->", "before function result type");
      const Token& result = ts.expect_identifier("as function result type");
      decl.result = result.text;
      references.push_back({result.text, result.pos});
      schema.functions.push_back(std::move(decl));
    } else {
      ts.fail(keyword, fmt::format("expected 'type', 'predicate' or 'function', found '{}'",
                                   keyword.text));
    }
    ts.expect_line_end("after declaration");
  }

  for (const TypeRef& ref : references) {
    if (schema.find_type(ref.name) == nullptr) {
      throw ParseError(ErrorKind::UndeclaredType, ref.pos,
                       fmt::format("type '{}' is not declared", ref.name));
    }
  }
  for (const TypeDecl& t : schema.types) {
    std::set<std::string> seen{t.name};
    const TypeDecl* current = &t;
    while (current->supertype) {
      if (!seen.insert(*current->supertype).second) {
        throw ParseError(ErrorKind::CyclicSubtype, t.pos,
                         fmt::format("subtype chain of '{}' is cyclic", t.name));
      }
      current = schema.find_type(*current->supertype);
    }
  }
  return schema;
}

}  // namespace diagen::dsl
