#include "unit_util.hpp"

#include <gtest/gtest.h>

using namespace stinc;

TEST(Facts, WritesAndDepends) {
  auto p = pipeline_fig("fig02_splitter.sol");
  int st = p->stmt_at(5, ir::Kind::Store);
  ASSERT_GE(st, 0);
  EXPECT_TRUE(p->fb->writes_var(st, "splits"));
  int call2 = p->stmt_at(19, ir::Kind::ExtCall);
  ASSERT_GE(call2, 0);
  EXPECT_TRUE(p->fb->depends_on(call2, "splits"));
  EXPECT_TRUE(p->fb->depends_on(call2, "deposits"));
  EXPECT_FALSE(p->fb->depends_on(call2, "payers"));
  EXPECT_TRUE(p->fb->is_extcall(call2));
}

TEST(Facts, OwnerOnly) {
  auto p = pipeline_src(R"(contract A {
  address owner; uint fee;
  constructor() public { owner = msg.sender; }
  function setFee(uint f) public { require(msg.sender == owner); fee = f; }
  function anyone(uint f) public { fee = f; }
})");
  EXPECT_TRUE(p->fb->is_owner(p->stmt_at(4, ir::Kind::Store)));
  EXPECT_FALSE(p->fb->is_owner(p->stmt_at(5, ir::Kind::Store)));
  EXPECT_TRUE(p->fb->owner_vars.count("owner"));
}

TEST(Facts, OwnerLostWhenAnyoneSetsIt) {
  auto p = pipeline_src(R"(contract A {
  address owner; uint fee;
  constructor() public { owner = msg.sender; }
  function take() public { owner = msg.sender; }
  function setFee(uint f) public { require(msg.sender == owner); fee = f; }
})");
  EXPECT_FALSE(p->fb->is_owner(p->stmt_at(5, ir::Kind::Store)));
  EXPECT_FALSE(p->fb->owner_vars.count("owner"));
}

TEST(Facts, TaintedStorage) {
  auto p = pipeline_src(R"(contract A {
  address target; uint n;
  function set(address t) public { target = t; }
  function go() public { target.call(""); n = 1; }
})");
  EXPECT_TRUE(p->fb->tainted_vars.count("target"));
  EXPECT_EQ(p->fb->tainted_calls.count(p->stmt_at(4, ir::Kind::ExtCall)), 1u);
}

TEST(Facts, Guards) {
  auto p = pipeline_fig("fig03_mutex.sol");
  int call = p->stmt_at(9, ir::Kind::ExtCall);
  ASSERT_GE(call, 0);
  std::set<int> lines;
  for (int g : p->fb->guards(call))
    lines.insert(p->p.stmts[g].line);
  EXPECT_TRUE(lines.count(4));
  EXPECT_TRUE(lines.count(7));
}

TEST(Facts, DumpHasRelations) {
  auto p = pipeline_fig("fig01a_bank.sol");
  auto d = dump_facts(*p->fb);
  EXPECT_TRUE(d.count("reach"));
  EXPECT_TRUE(d.count("depend"));
}

TEST(Sdg, SplitterEdges) {
  auto p = pipeline_fig("fig02_splitter.sol");
  const SDG &s = p->sdg;
  int st = p->stmt_at(5, ir::Kind::Store), call1 = p->stmt_at(16, ir::Kind::ExtCall);
  EXPECT_TRUE(s.w_edges.count({st, "splits"}));
  bool read_at_19 = false;
  for (auto &[v, n] : s.d_edges)
    read_at_19 |= v == "splits" && p->p.stmts[n].line == 19;
  EXPECT_TRUE(read_at_19);
  int upd_entry = p->g->entry(p->p.find_func("updateSplit"));
  EXPECT_TRUE(s.reentry_edges.count({call1, upd_entry}));
  EXPECT_TRUE(s.o_edges.count({call1, upd_entry}));
  EXPECT_TRUE(s.var_nodes.count("splits"));
}

TEST(Sdg, OrderEdgesSkipIntermediate) {
  auto p = pipeline_fig("fig02_splitter.sol");
  const SDG &s = p->sdg;
  for (auto &[a, b] : s.o_edges) {
    if (s.reentry_edges.count({a, b}))
      continue;
    EXPECT_TRUE(p->g->reach(a, b));
    for (int c : s.stmt_nodes)
      if (c != a && c != b)
        EXPECT_FALSE(p->g->reach(a, c) && p->g->reach(c, b)) << a << " " << c << " " << b;
  }
}

TEST(Sdg, DumpFormat) {
  auto p = pipeline_fig("fig02_splitter.sol");
  auto d = p->sdg.dump();
  EXPECT_NE(d.find("v:splits ->"), std::string::npos);
  EXPECT_NE(d.find("[O]"), std::string::npos);
}

TEST(Sdg, CombineCreated) {
  auto u = parse_source(R"(contract W { uint x; function poke() public { x = 1; } }
contract M { W w; uint y; constructor() public { w = new W(); } function f() public { y = 2; } })");
  auto progs = lower_all(u);
  ASSERT_EQ(progs.size(), 2u);
  auto &m = progs[1];
  EXPECT_TRUE(created_contracts(m).count("W"));
  auto c = combine_programs(m, progs[0], false);
  bool prefixed = false;
  for (auto &v : c.vars)
    prefixed |= v.name == "W.x";
  EXPECT_TRUE(prefixed);
}
