#include <stinc/solver.hpp>
#include <stinc/term.hpp>

#include <gtest/gtest.h>

#include <cstdlib>

using namespace stinc::sym;

TEST(Terms, HashConsing) {
  Terms tm;
  T x = tm.var("x");
  EXPECT_EQ(tm.binop("+", x, tm.bv(1)), tm.binop("+", x, tm.bv(1)));
  EXPECT_EQ(tm.var("x"), x);
}

TEST(Terms, ConstantFolding) {
  Terms tm;
  EXPECT_EQ(tm.const_val(tm.binop("*", tm.bv(6), tm.bv(7))), u256(42));
  EXPECT_EQ(tm.const_val(tm.binop("-", tm.bv(0), tm.bv(1))), ~u256(0));
  EXPECT_EQ(tm.const_val(tm.binop("/", tm.bv(5), tm.bv(0))), u256(0));
  EXPECT_TRUE(tm.is_true(tm.binop("<", tm.bv(1), tm.bv(2))));
}

TEST(Terms, EvalWraps) {
  Terms tm;
  T x = tm.var("x");
  Model m;
  m.vars[x] = ~u256(0);
  EXPECT_EQ(tm.eval(tm.binop("+", x, tm.bv(2)), m), u256(1));
}

TEST(Terms, Substitute) {
  Terms tm;
  T x = tm.var("x"), y = tm.var("y");
  T e = tm.binop("+", x, y);
  T r = tm.substitute(e, [&](T t) -> std::optional<T> {
    if (t == x)
      return tm.bv(3);
    return std::nullopt;
  });
  Model m;
  m.vars[y] = 4;
  EXPECT_EQ(tm.eval(r, m), u256(7));
}

TEST(Solver, BuiltinBasics) {
  Terms tm;
  auto s = make_builtin_solver();
  T x = tm.var("x");
  Model m;
  EXPECT_EQ(s->check(tm, tm.eq(tm.binop("+", x, tm.bv(1)), tm.bv(5)), &m), SatResult::Sat);
  EXPECT_EQ(m.vars[x], u256(4));
  EXPECT_EQ(s->check(tm, tm.land(tm.eq(x, tm.bv(1)), tm.eq(x, tm.bv(2)))), SatResult::Unsat);
  EXPECT_EQ(s->check(tm, tm.lor(tm.eq(x, tm.bv(1)), tm.eq(x, tm.bv(2)))), SatResult::Sat);
}

TEST(Solver, BuiltinNeverGuessesUnsat) {
  Terms tm;
  auto s = make_builtin_solver();
  T x = tm.var("x"), y = tm.var("y");
  // x*y == 391 has the solution 17*23
  auto r = s->check(tm, tm.land(tm.eq(tm.binop("*", x, y), tm.bv(391)), tm.binop(">", x, tm.bv(1))));
  EXPECT_NE(r, SatResult::Unsat);
}

TEST(Solver, SmtLibScript) {
  Terms tm;
  T x = tm.var("x");
  auto s = to_smtlib(tm, tm.eq(x, tm.bv(3)));
  EXPECT_NE(s.find("(declare-fun"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
}

TEST(Solver, ExternalAgrees) {
  if (std::system("command -v z3 >/dev/null 2>&1") != 0)
    GTEST_SKIP() << "z3 not installed";
  Terms tm;
  auto s = make_external_solver();
  T x = tm.var("x"), y = tm.var("y");
  T f = tm.land({tm.eq(tm.binop("^", x, y), tm.bv(5)), tm.binop(">", x, tm.bv(10)), tm.binop("<", y, x)});
  EXPECT_EQ(s->check(tm, f), SatResult::Sat);
  EXPECT_EQ(s->check(tm, tm.land(tm.binop("<", x, tm.bv(3)), tm.binop(">", x, tm.bv(5)))), SatResult::Unsat);
}
