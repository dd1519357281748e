#include "unit_util.hpp"

#include <stinc/error.hpp>

#include <gtest/gtest.h>

using namespace stinc;

namespace {
const char *kBranch = R"(contract A {
  uint x; uint y;
  function f(uint a) public {
    if (a > 1) {
      x = 1;
    } else {
      y = 2;
    }
    x = 3;
  }
  function g() public { y = 4; }
})";
}

TEST(Icfg, EntryReachesExit) {
  auto p = pipeline_src(kBranch);
  const ICFG &g = *p->g;
  for (size_t f = 0; f < p->p.funcs.size(); ++f)
    EXPECT_TRUE(g.reach(g.entry(static_cast<int>(f)), g.exit(static_cast<int>(f))));
}

TEST(Icfg, BranchArmsUnordered) {
  auto p = pipeline_src(kBranch);
  const ICFG &g = *p->g;
  int s5 = p->stmt_at(5, ir::Kind::Store), s7 = p->stmt_at(7, ir::Kind::Store), s9 = p->stmt_at(9, ir::Kind::Store);
  ASSERT_GE(s5, 0);
  ASSERT_GE(s7, 0);
  EXPECT_FALSE(g.reach(s5, s7));
  EXPECT_FALSE(g.reach(s7, s5));
  EXPECT_TRUE(g.reach(s5, s9));
  EXPECT_TRUE(g.intermediate(s7, s9, g.exit(g.func_of(s9))));
  EXPECT_TRUE(g.reach(s5, s5));
}

TEST(Icfg, NoEdgesBetweenFunctions) {
  auto p = pipeline_src(kBranch);
  const ICFG &g = *p->g;
  int s9 = p->stmt_at(9, ir::Kind::Store), s11 = p->stmt_at(11, ir::Kind::Store);
  EXPECT_FALSE(g.reach(s9, s11));
  EXPECT_FALSE(g.reach(s11, s9));
  EXPECT_NE(g.func_of(s9), g.func_of(s11));
}

TEST(Icfg, Dominators) {
  auto p = pipeline_src(kBranch);
  const ICFG &g = *p->g;
  int br = p->stmt_at(4, ir::Kind::Branch), s5 = p->stmt_at(5, ir::Kind::Store), s9 = p->stmt_at(9, ir::Kind::Store);
  EXPECT_TRUE(g.dominates(br, s5));
  EXPECT_TRUE(g.dominates(br, s9));
  EXPECT_FALSE(g.dominates(s5, s9));
}

TEST(Icfg, LoopReachesItself) {
  auto p = pipeline_src(R"(contract A {
  uint x;
  function f(uint n) public {
    for (uint i = 0; i < n; i++) {
      x = x + i;
    }
  }
})");
  int s = p->stmt_at(5, ir::Kind::Store);
  ASSERT_GE(s, 0);
  EXPECT_TRUE(p->g->reach(s, p->stmt_at(5, ir::Kind::Load)));
}

TEST(Icfg, UnknownNode) { EXPECT_THROW(pipeline_src(kBranch)->g->succ(100000), UnknownNode); }

TEST(Icfg, DumpLists) {
  auto p = pipeline_src(kBranch);
  EXPECT_NE(p->g->dump().find(" -> "), std::string::npos);
}
