#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diagen/dsl/errors.hpp"

namespace diagen::dsl::detail {

enum class TokenKind { Identifier, Number, String, Symbol, Newline, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier/symbol spelling, or decoded string contents
  double number = 0.0;
  SourcePos pos;

  bool is_symbol(std::string_view s) const { return kind == TokenKind::Symbol && text == s; }
  bool is_word(std::string_view s) const { return kind == TokenKind::Identifier && text == s; }
};

/// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view source);

/// Tokenizes all three languages. `--` starts a comment that runs to end of
/// line. Newline tokens are emitted only when `keep_newlines` is set; runs of
/// blank lines collapse into one.
std::vector<Token> tokenize(std::string_view source, bool keep_newlines);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool at_line_end() const {
    return peek().kind == TokenKind::Newline || peek().kind == TokenKind::End;
  }

  bool accept_symbol(std::string_view s);
  const Token& expect_symbol(std::string_view s, std::string_view context);
  const Token& expect_identifier(std::string_view context);
  void expect_line_end(std::string_view context);
  void skip_newlines();

  [[noreturn]] void fail(const Token& at, std::string message) const;

 private:
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

std::string describe(const Token& token);

}  // namespace diagen::dsl::detail
