#pragma once

#include <stinc/frontend/ast.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace stinc {

struct Token {
  enum class Kind { Ident, Number, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int col = 0;
};

// Splits source text into tokens, dropping comments and whitespace.
// Throws SyntaxError on unterminated strings/comments or stray characters.
std::vector<Token> tokenize(std::string_view text);

// Parses the supported contract-language subset (see docs/grammar.md).
// Throws SyntaxError for malformed input and UnsupportedFeature for
// constructs outside the subset (inline assembly, enums, ...).
ast::SourceUnit parse_source(std::string_view text);

// Renders a unit back to source text. Re-parsing the output yields a unit
// that is ast::equal to the input.
std::string print_source(const ast::SourceUnit &unit);

} // namespace stinc
