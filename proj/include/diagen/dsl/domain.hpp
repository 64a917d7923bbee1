#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diagen/dsl/errors.hpp"

namespace diagen::dsl {

struct TypeDecl {
  std::string name;
  std::optional<std::string> supertype;
  SourcePos pos;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> params;
  SourcePos pos;
};

struct FunctionDecl {
  std::string name;
  std::vector<std::string> params;
  std::string result;
  SourcePos pos;
};

/// The concept schema a Substance program and Style sheet are checked against.
struct DomainSchema {
  std::vector<TypeDecl> types;
  std::vector<PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;

  const TypeDecl* find_type(std::string_view name) const;
  const PredicateDecl* find_predicate(std::string_view name) const;
  const FunctionDecl* find_function(std::string_view name) const;

  /// Reflexive, transitive `<:` relation.
  bool is_subtype(std::string_view sub, std::string_view super) const;

  /// Canonical `.domain` text (one declaration per line, declaration order).
  std::string to_text() const;
};

/// Words that cannot be used as type names because they start Substance
/// statements.
bool is_reserved_word(std::string_view word);

DomainSchema parse_domain(std::string_view source);

}  // namespace diagen::dsl
