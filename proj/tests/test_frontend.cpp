#include "unit_util.hpp"

#include <stinc/error.hpp>

#include <gtest/gtest.h>

using namespace stinc;

TEST(Lexer, DropsComments) {
  auto toks = tokenize("uint x; // c\n/* d\n */ x = 0x10;");
  std::vector<std::string> texts;
  for (auto &t : toks)
    texts.push_back(t.text);
  ASSERT_GE(toks.size(), 7u);
  EXPECT_EQ(texts[0], "uint");
  EXPECT_EQ(toks[3].line, 3);
}

TEST(Lexer, UnterminatedString) { EXPECT_THROW(tokenize("string s = \"abc"), SyntaxError); }

TEST(Parser, RoundTripCorpus) {
  auto files = oracle::figure_files();
  for (auto &f : oracle::fixture_files())
    files.push_back(f);
  ASSERT_FALSE(files.empty());
  for (auto &f : files) {
    auto u = parse_source(oracle::read_file(f));
    auto u2 = parse_source(print_source(u));
    EXPECT_TRUE(ast::equal(u, u2)) << f;
  }
}

TEST(Parser, MissingSemicolon) {
  EXPECT_THROW(parse_source("contract A { uint x function f() public {} }"), SyntaxError);
}

TEST(Parser, AssemblyUnsupported) {
  EXPECT_THROW(parse_source("contract A { function f() public { assembly { let x := 1 } } }"), UnsupportedFeature);
}

TEST(Lower, ModifierInlined) {
  auto p = lower(parse_source(R"(contract A {
  address owner; uint x;
  modifier onlyOwner() { require(msg.sender == owner); _; }
  function set(uint v) public onlyOwner { x = v; }
})"));
  int f = p.find_func("set");
  ASSERT_GE(f, 0);
  bool req = false, store = false;
  for (int s : p.funcs[f].stmts) {
    req |= p.stmts[s].kind == ir::Kind::Require;
    if (p.stmts[s].kind == ir::Kind::Store && p.stmts[s].var == "x") {
      store = true;
      EXPECT_TRUE(req) << "guard must come first";
    }
  }
  EXPECT_TRUE(req && store);
}

TEST(Lower, InternalCallInlined) {
  auto p = lower(parse_source(R"(contract A {
  uint x;
  function bump() internal { x = x + 1; }
  function f() public { bump(); bump(); }
})"));
  EXPECT_LT(p.find_func("bump"), 0);
  int n = 0;
  for (int s : p.funcs[p.find_func("f")].stmts)
    n += p.stmts[s].kind == ir::Kind::Store;
  EXPECT_EQ(n, 2);
}

TEST(Lower, Recursion) {
  EXPECT_THROW(lower(parse_source(R"(contract A {
  function g(uint n) internal { if (n > 0) g(n - 1); }
  function f() public { g(3); }
})")),
               RecursionUnsupported);
}

TEST(Lower, UnknownIdentifier) {
  EXPECT_THROW(lower(parse_source("contract A { function f() public { y = 1; } }")), UnknownIdentifier);
}

TEST(Lower, InheritanceFlattened) {
  auto p = lower(parse_source(R"(contract B { uint b; function fb() public { b = 1; } }
contract C is B { uint c; function fc() public { c = b; } })"));
  EXPECT_EQ(p.name, "C");
  EXPECT_GE(p.find_func("fb"), 0);
  EXPECT_GE(p.find_func("fc"), 0);
  EXPECT_EQ(p.vars.size(), 2u);
}

TEST(Lower, ExternalCallKinds) {
  auto p = lower(parse_source(R"(contract A {
  function f(address a) public {
    a.call.value(1)("");
    a.transfer(2);
    a.send(3);
  }
})"));
  std::vector<ir::ExtKind> kinds;
  for (auto &s : p.stmts)
    if (s.kind == ir::Kind::ExtCall)
      kinds.push_back(s.ext.kind);
  EXPECT_EQ(kinds, (std::vector<ir::ExtKind>{ir::ExtKind::CallValue, ir::ExtKind::Transfer, ir::ExtKind::Send}));
}
