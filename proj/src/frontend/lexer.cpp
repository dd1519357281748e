#include <stinc/error.hpp>
#include <stinc/frontend/parser.hpp>

#include <array>
#include <cctype>

namespace stinc {

namespace {

constexpr std::array<std::string_view, 27> kMultiPunct = {
    ">>=", "<<=", "**", "=>", "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=",  "-=",  "*=", "/=", "%=", "|=", "&=", "^=", "<<", ">>", "->", ":=",
    "..",  "::",  "**"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

} // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      int sl = line, sc = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/'))
        advance(1);
      if (i + 1 >= src.size())
        throw SyntaxError(sl, sc, "unterminated block comment");
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j]))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      if (c == '0' && j + 1 < src.size() && (src[j + 1] == 'x' || src[j + 1] == 'X')) {
        j += 2;
        while (j < src.size() && (std::isxdigit(static_cast<unsigned char>(src[j])) || src[j] == '_'))
          ++j;
      } else {
        while (j < src.size() &&
               (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == 'e' || src[j] == 'E'))
          ++j;
      }
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t j = i + 1;
      std::string val;
      while (j < src.size() && src[j] != c) {
        if (src[j] == '\n')
          throw SyntaxError(line, col, "unterminated string literal");
        if (src[j] == '\\' && j + 1 < src.size()) {
          val.push_back(src[j + 1]);
          j += 2;
          continue;
        }
        val.push_back(src[j]);
        ++j;
      }
      if (j >= src.size())
        throw SyntaxError(line, col, "unterminated string literal");
      t.kind = Token::Kind::String;
      t.text = std::move(val);
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (auto p : kMultiPunct) {
      if (src.substr(i, p.size()) == p) {
        t.kind = Token::Kind::Punct;
        t.text = std::string(p);
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (matched) {
      out.push_back(std::move(t));
      continue;
    }
    static constexpr std::string_view single = "{}()[];,.=+-*/%<>!&|^~?:";
    if (single.find(c) == std::string_view::npos)
      throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    t.kind = Token::Kind::Punct;
    t.text = std::string(1, c);
    advance(1);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

} // namespace stinc
