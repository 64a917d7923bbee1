#include "diagen/dsl/substance.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "lexer.hpp"

namespace diagen::dsl {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

namespace {

struct IdentRef {
  std::string name;
  SourcePos pos;
};

std::vector<IdentRef> parse_args(TokenStream& ts, std::string_view owner) {
  std::vector<IdentRef> args;
  ts.expect_symbol("(", fmt::format("after '{}'", owner));
  if (ts.accept_symbol(")")) return args;
  while (true) {
    const Token& t = ts.expect_identifier(fmt::format("as argument of '{}'", owner));
    args.push_back({t.text, t.pos});
    if (ts.accept_symbol(")")) break;
    ts.expect_symbol(",", "between arguments");
  }
  return args;
}

std::vector<std::string> names_of(const std::vector<IdentRef>& refs) {
  std::vector<std::string> out;
  out.reserve(refs.size());
  for (const IdentRef& r : refs) out.push_back(r.name);
  return out;
}

/// Syntax-level statement as read from one line, before type checking.
struct RawStatement {
  Statement statement;
  SourcePos head_pos;                // position of the predicate/function/type name
  std::vector<IdentRef> arg_refs;    // PredApp / FuncBind arguments
  SourcePos id_pos;                  // declared or bound identifier
};

class SubstanceReader {
 public:
  explicit SubstanceReader(TokenStream& ts) : ts_(ts) {}

  /// Reads one line. Returns false on AutoLabel (which yields no statement).
  bool read_line(std::vector<RawStatement>& out, bool& autolabel) {
    const Token& first = ts_.expect_identifier("at start of statement");
    if (first.text == "AutoLabel") {
      const Token& scope = ts_.expect_identifier("after 'AutoLabel'");
      if (scope.text != "All") ts_.fail(scope, "only 'AutoLabel All' is supported");
      ts_.expect_line_end("after 'AutoLabel All'");
      autolabel = true;
      return false;
    }
    if (first.text == "Label") {
      const Token& id = ts_.expect_identifier("after 'Label'");
      if (ts_.peek().kind != TokenKind::String) {
        ts_.fail(ts_.peek(), fmt::format("expected quoted label text, found {}",
                                         detail::describe(ts_.peek())));
      }
      const Token& text = ts_.next();
      ts_.expect_line_end("after label text");
      out.push_back({Statement{LabelStmt{id.text, text.text}, first.pos}, first.pos, {}, id.pos});
      return true;
    }
    if (ts_.peek().is_symbol("(")) {
      std::vector<IdentRef> args = parse_args(ts_, first.text);
      ts_.expect_line_end("after predicate application");
      out.push_back({Statement{PredApp{first.text, names_of(args)}, first.pos}, first.pos,
                     std::move(args), first.pos});
      return true;
    }
    if (ts_.peek().is_symbol(":=")) {
      ts_.next();
      read_binding(first, out);
      return true;
    }
    // Declaration: `T a[, b ...]` or `T x := F(...)`.
    const Token& type = first;
    while (true) {
      const Token& id = ts_.expect_identifier(fmt::format("after type '{}'", type.text));
      out.push_back({Statement{Decl{type.text, id.text}, type.pos}, type.pos, {}, id.pos});
      if (ts_.peek().is_symbol(":=")) {
        ts_.next();
        read_binding(id, out);
        return true;
      }
      if (!ts_.accept_symbol(",")) break;
    }
    ts_.expect_line_end("after declaration");
    return true;
  }

 private:
  void read_binding(const Token& id, std::vector<RawStatement>& out) {
    const Token& fn = ts_.expect_identifier("after ':='");
    std::vector<IdentRef> args = parse_args(ts_, fn.text);
    ts_.expect_line_end("after function application");
    out.push_back({Statement{FuncBind{id.text, fn.text, names_of(args)}, id.pos}, fn.pos,
                   std::move(args), id.pos});
  }

  TokenStream& ts_;
};

std::vector<RawStatement> read_all(std::string_view source, bool& autolabel) {
  const std::string text = detail::normalize_newlines(source);
  TokenStream ts(detail::tokenize(text, /*keep_newlines=*/true));
  SubstanceReader reader(ts);
  std::vector<RawStatement> raw;
  while (true) {
    ts.skip_newlines();
    if (ts.at_end()) break;
    reader.read_line(raw, autolabel);
  }
  return raw;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace

SubstanceProgram parse_substance(std::string_view source, const DomainSchema& schema) {
  SubstanceProgram program;
  std::vector<RawStatement> raw = read_all(source, program.autolabel);

  std::map<std::string, std::string, std::less<>> declared;  // id -> type
  auto type_of = [&](const IdentRef& ref) -> const std::string& {
    auto it = declared.find(ref.name);
    if (it == declared.end()) {
      throw ParseError(ErrorKind::UndeclaredIdentifier, ref.pos,
                       fmt::format("identifier '{}' is used before it is declared", ref.name));
    }
    return it->second;
  };
  auto check_args = [&](const std::vector<IdentRef>& args, const std::vector<std::string>& params,
                        std::string_view owner, SourcePos head) {
    if (args.size() != params.size()) {
      throw ParseError(ErrorKind::ArityMismatch, head,
                       fmt::format("'{}' expects {} argument(s), got {}", owner, params.size(),
                                   args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      const std::string& actual = type_of(args[i]);
      if (!schema.is_subtype(actual, params[i])) {
        throw ParseError(ErrorKind::TypeMismatch, args[i].pos,
                         fmt::format("argument {} of '{}' must be {}, but '{}' is {}", i + 1,
                                     owner, params[i], args[i].name, actual));
      }
    }
  };

  for (RawStatement& r : raw) {
    std::visit(
        [&](auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Decl>) {
            if (schema.find_type(node.type) == nullptr) {
              throw ParseError(ErrorKind::UndeclaredType, r.head_pos,
                               fmt::format("type '{}' is not declared", node.type));
            }
            if (declared.count(node.id) > 0) {
              throw ParseError(ErrorKind::DuplicateName, r.id_pos,
                               fmt::format("identifier '{}' declared twice", node.id));
            }
            declared.emplace(node.id, node.type);
          } else if constexpr (std::is_same_v<T, PredApp>) {
            const PredicateDecl* pred = schema.find_predicate(node.predicate);
            if (pred == nullptr) {
              throw ParseError(ErrorKind::UnknownPredicate, r.head_pos,
                               fmt::format("predicate '{}' is not declared", node.predicate));
            }
            // Undeclared identifiers are reported before arity problems.
            for (const IdentRef& a : r.arg_refs) type_of(a);
            check_args(r.arg_refs, pred->params, node.predicate, r.head_pos);
          } else if constexpr (std::is_same_v<T, FuncBind>) {
            const FunctionDecl* fn = schema.find_function(node.function);
            if (fn == nullptr) {
              throw ParseError(ErrorKind::UnknownFunction, r.head_pos,
                               fmt::format("function '{}' is not declared", node.function));
            }
            const std::string& target = type_of(IdentRef{node.id, r.id_pos});
            for (const IdentRef& a : r.arg_refs) type_of(a);
            check_args(r.arg_refs, fn->params, node.function, r.head_pos);
            if (!schema.is_subtype(fn->result, target)) {
              throw ParseError(ErrorKind::TypeMismatch, r.id_pos,
                               fmt::format("'{}' returns {}, which cannot be bound to '{}' of type {}",
                                           node.function, fn->result, node.id, target));
            }
          } else {
            type_of(IdentRef{node.id, r.id_pos});
          }
        },
        r.statement.node);
    program.statements.push_back(std::move(r.statement));
  }
  return program;
}

bool is_statement_syntax(std::string_view line) {
  try {
    bool autolabel = false;
    std::vector<RawStatement> raw = read_all(line, autolabel);
    if (raw.empty() && !autolabel) return false;
    for (const RawStatement& r : raw) {
      if (const auto* d = std::get_if<Decl>(&r.statement.node); d && is_reserved_word(d->type)) {
        return false;
      }
    }
    return true;
  } catch (const ParseError&) {
    return false;
  }
}

std::string serialize_statement(const Statement& statement) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, Decl>) {
          return fmt::format("{} {}", node.type, node.id);
        } else if constexpr (std::is_same_v<T, PredApp>) {
          return fmt::format("{}({})", node.predicate, fmt::join(node.args, ", "));
        } else if constexpr (std::is_same_v<T, FuncBind>) {
          return fmt::format("{} := {}({})", node.id, node.function, fmt::join(node.args, ", "));
        } else {
          return fmt::format("Label {} {}", node.id, quote(node.text));
        }
      },
      statement.node);
}

std::string serialize_substance(const SubstanceProgram& program) {
  std::vector<std::string> lines;
  lines.reserve(program.statements.size() + 1);
  for (const Statement& s : program.statements) lines.push_back(serialize_statement(s));
  if (program.autolabel) lines.emplace_back("AutoLabel All");
  return fmt::format("{}", fmt::join(lines, "\n"));
}

std::vector<std::string> statement_lines(const SubstanceProgram& program) {
  std::vector<std::string> lines;
  lines.reserve(program.statements.size() + 1);
  for (const Statement& s : program.statements) lines.push_back(serialize_statement(s));
  if (program.autolabel) lines.emplace_back("AutoLabel All");
  std::sort(lines.begin(), lines.end());
  return lines;
}

std::vector<std::pair<std::string, std::string>> label_map(const SubstanceProgram& program) {
  std::vector<std::pair<std::string, std::string>> labels;
  auto find = [&](const std::string& id) {
    return std::find_if(labels.begin(), labels.end(), [&](const auto& p) { return p.first == id; });
  };
  if (program.autolabel) {
    for (const Statement& s : program.statements) {
      if (const auto* d = std::get_if<Decl>(&s.node)) labels.emplace_back(d->id, d->id);
    }
  }
  for (const Statement& s : program.statements) {
    const auto* l = std::get_if<LabelStmt>(&s.node);
    if (l == nullptr) continue;
    if (auto it = find(l->id); it != labels.end()) {
      it->second = l->text;
    } else {
      labels.emplace_back(l->id, l->text);
    }
  }
  // Keep declaration order even when explicit labels arrive out of order.
  std::vector<std::pair<std::string, std::string>> ordered;
  for (const Decl& d : declarations(program)) {
    if (auto it = find(d.id); it != labels.end()) ordered.push_back(*it);
  }
  return ordered;
}

std::vector<Decl> declarations(const SubstanceProgram& program) {
  std::vector<Decl> out;
  for (const Statement& s : program.statements) {
    if (const auto* d = std::get_if<Decl>(&s.node)) out.push_back(*d);
  }
  return out;
}

}  // namespace diagen::dsl
