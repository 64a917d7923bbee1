#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "diagen/dsl/domain.hpp"
#include "diagen/dsl/errors.hpp"

namespace diagen::dsl {

/// `T x`
struct Decl {
  std::string type;
  std::string id;
  friend bool operator==(const Decl&, const Decl&) = default;
};

/// `P(x1, ..., xk)`
struct PredApp {
  std::string predicate;
  std::vector<std::string> args;
  friend bool operator==(const PredApp&, const PredApp&) = default;
};

/// `x := F(y1, ...)`
struct FuncBind {
  std::string id;
  std::string function;
  std::vector<std::string> args;
  friend bool operator==(const FuncBind&, const FuncBind&) = default;
};

/// `Label x "text"`
struct LabelStmt {
  std::string id;
  std::string text;
  friend bool operator==(const LabelStmt&, const LabelStmt&) = default;
};

struct Statement {
  std::variant<Decl, PredApp, FuncBind, LabelStmt> node;
  SourcePos pos;  // not part of structural equality

  friend bool operator==(const Statement& a, const Statement& b) { return a.node == b.node; }
};

struct SubstanceProgram {
  std::vector<Statement> statements;
  bool autolabel = false;

  bool empty() const { return statements.empty() && !autolabel; }
  friend bool operator==(const SubstanceProgram&, const SubstanceProgram&) = default;
};

/// Parses and type-checks a Substance program against `schema`. Statement
/// order is preserved; `T a, b` and `T x := F(...)` expand to one statement
/// per declaration/binding.
SubstanceProgram parse_substance(std::string_view source, const DomainSchema& schema);

/// True when `line` is syntactically a single Substance statement (no schema
/// check). Blank and comment-only lines are not statements.
bool is_statement_syntax(std::string_view line);

/// Canonical text: one statement per line, single spaces, no trailing
/// newline. `AutoLabel All` is emitted last when set.
std::string serialize_substance(const SubstanceProgram& program);

std::string serialize_statement(const Statement& statement);

/// Canonical lines, lexicographically sorted.
std::vector<std::string> statement_lines(const SubstanceProgram& program);

/// Identifier -> display text, in declaration order. With AutoLabel every
/// declared identifier is labeled with its own name unless an explicit Label
/// statement overrides it.
std::vector<std::pair<std::string, std::string>> label_map(const SubstanceProgram& program);

/// Declared identifiers with their types, in declaration order.
std::vector<Decl> declarations(const SubstanceProgram& program);

}  // namespace diagen::dsl
