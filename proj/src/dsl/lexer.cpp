#include "lexer.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

namespace diagen::dsl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::DuplicateName: return "duplicate name";
    case ErrorKind::UndeclaredType: return "undeclared type";
    case ErrorKind::UndeclaredIdentifier: return "undeclared identifier";
    case ErrorKind::UnknownPredicate: return "unknown predicate";
    case ErrorKind::UnknownFunction: return "unknown function";
    case ErrorKind::ArityMismatch: return "arity mismatch";
    case ErrorKind::TypeMismatch: return "type mismatch";
    case ErrorKind::CyclicSubtype: return "cyclic subtype";
    case ErrorKind::UnknownShape: return "unknown shape";
    case ErrorKind::UnknownProperty: return "unknown property";
    case ErrorKind::UnknownConstraint: return "unknown constraint";
    case ErrorKind::UnknownObjective: return "unknown objective";
    case ErrorKind::InvalidCanvas: return "invalid canvas";
  }
  return "error";
}

ParseError::ParseError(ErrorKind kind, SourcePos pos, std::string message)
    : std::runtime_error(
          fmt::format("{}:{}: {}: {}", pos.line, pos.column, to_string(kind), message)),
      kind_(kind),
      pos_(pos),
      message_(std::move(message)) {}

namespace detail {

std::string normalize_newlines(std::string_view source) {
  std::string out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (source[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < source.size() && source[i + 1] == '\n') ++i;
    } else {
      out.push_back(source[i]);
    }
  }
  return out;
}

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view src, bool keep_newlines) : src_(src), keep_newlines_(keep_newlines) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '\n') {
        if (keep_newlines_ && !out.empty() && out.back().kind != TokenKind::Newline) {
          out.push_back(Token{TokenKind::Newline, "\n", 0.0, here()});
        }
        advance();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\f' || c == '\v') {
        advance();
        continue;
      }
      if (c == '-' && peek(1) == '-') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      if (is_ident_start(c)) {
        out.push_back(identifier());
      } else if (is_digit(c) || (c == '.' && is_digit(peek(1))) ||
                 (c == '-' && (is_digit(peek(1)) || (peek(1) == '.' && is_digit(peek(2)))))) {
        out.push_back(number());
      } else if (c == '"') {
        out.push_back(string_literal());
      } else {
        out.push_back(symbol());
      }
    }
    if (keep_newlines_ && !out.empty() && out.back().kind != TokenKind::Newline) {
      out.push_back(Token{TokenKind::Newline, "\n", 0.0, here()});
    }
    out.push_back(Token{TokenKind::End, "", 0.0, here()});
    return out;
  }

 private:
  char peek(std::size_t ahead) const {
    return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
  }
  SourcePos here() const { return SourcePos{line_, col_}; }
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  Token identifier() {
    Token t{TokenKind::Identifier, "", 0.0, here()};
    while (i_ < src_.size() && is_ident_char(src_[i_])) {
      t.text.push_back(src_[i_]);
      advance();
    }
    return t;
  }

  Token number() {
    Token t{TokenKind::Number, "", 0.0, here()};
    if (src_[i_] == '-') {
      t.text.push_back('-');
      advance();
    }
    while (i_ < src_.size() && (is_digit(src_[i_]) || src_[i_] == '.')) {
      t.text.push_back(src_[i_]);
      advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
      t.text.push_back(src_[i_]);
      advance();
      t.text.push_back(src_[i_]);
      advance();
      while (i_ < src_.size() && is_digit(src_[i_])) {
        t.text.push_back(src_[i_]);
        advance();
      }
    }
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, t.number);
    if (ec != std::errc{} || ptr != last) {
      throw ParseError(ErrorKind::Syntax, t.pos, fmt::format("malformed number '{}'", t.text));
    }
    return t;
  }

  Token string_literal() {
    Token t{TokenKind::String, "", 0.0, here()};
    advance();  // opening quote
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') {
        throw ParseError(ErrorKind::Syntax, t.pos, "unterminated string literal");
      }
      const char c = src_[i_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        const char e = peek(1);
        const char decoded = e == 'n' ? '\n' : e == 't' ? '\t' : e;
        if (e != '"' && e != '\\' && e != 'n' && e != 't') {
          throw ParseError(ErrorKind::Syntax, here(),
                           fmt::format("unknown escape '\\{}'", e == '\0' ? ' ' : e));
        }
        t.text.push_back(decoded);
        advance();
        advance();
        continue;
      }
      t.text.push_back(c);
      advance();
    }
    return t;
  }

  Token symbol() {
    static constexpr std::string_view kTwoChar[] = {":=", "<:", "->"};
    Token t{TokenKind::Symbol, "", 0.0, here()};
    for (std::string_view two : kTwoChar) {
      if (src_.substr(i_, 2) == two) {
        t.text = std::string(two);
        advance();
        advance();
        return t;
      }
    }
    static constexpr std::string_view kSingle = "(){},;.=:?<>";
    const char c = src_[i_];
    if (kSingle.find(c) == std::string_view::npos) {
      throw ParseError(ErrorKind::Syntax, t.pos,
                       fmt::format("unexpected character '{}'", std::string(1, c)));
    }
    t.text = std::string(1, c);
    advance();
    return t;
  }

  std::string_view src_;
  bool keep_newlines_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, bool keep_newlines) {
  return Lexer(source, keep_newlines).run();
}

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::Identifier: return fmt::format("identifier '{}'", token.text);
    case TokenKind::Number: return fmt::format("number '{}'", token.text);
    case TokenKind::String: return "string literal";
    case TokenKind::Symbol: return fmt::format("'{}'", token.text);
    case TokenKind::Newline: return "end of line";
    case TokenKind::End: return "end of input";
  }
  return "token";
}

const Token& TokenStream::peek(std::size_t ahead) const {
  const std::size_t i = std::min(index_ + ahead, tokens_.size() - 1);
  return tokens_[i];
}

const Token& TokenStream::next() {
  const Token& t = tokens_[index_];
  if (index_ + 1 < tokens_.size()) ++index_;
  return t;
}

bool TokenStream::accept_symbol(std::string_view s) {
  if (peek().is_symbol(s)) {
    next();
    return true;
  }
  return false;
}

const Token& TokenStream::expect_symbol(std::string_view s, std::string_view context) {
  if (!peek().is_symbol(s)) {
    fail(peek(), fmt::format("expected '{}' {}, found {}", s, context, describe(peek())));
  }
  return next();
}

const Token& TokenStream::expect_identifier(std::string_view context) {
  if (peek().kind != TokenKind::Identifier) {
    fail(peek(), fmt::format("expected identifier {}, found {}", context, describe(peek())));
  }
  return next();
}

void TokenStream::expect_line_end(std::string_view context) {
  if (!at_line_end()) {
    fail(peek(), fmt::format("unexpected {} {}", describe(peek()), context));
  }
  if (peek().kind == TokenKind::Newline) next();
}

void TokenStream::skip_newlines() {
  while (peek().kind == TokenKind::Newline) next();
}

void TokenStream::fail(const Token& at, std::string message) const {
  throw ParseError(ErrorKind::Syntax, at.pos, std::move(message));
}

}  // namespace detail
}  // namespace diagen::dsl
