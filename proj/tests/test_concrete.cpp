#include "unit_util.hpp"

#include <gtest/gtest.h>

using namespace stinc;
using namespace stinc::concrete;

namespace {
int line_stmt(const ir::Program &p, int line, ir::Kind k) {
  for (auto &s : p.stmts)
    if (s.line == line && s.kind == k)
      return s.id;
  return -1;
}
} // namespace

TEST(Concrete, EmptySchedule) {
  auto p = pipeline_fig("fig01a_bank.sol");
  Storage pre;
  pre.set("accounts", {1}, 5);
  auto r = run(*p->g, pre, {});
  EXPECT_TRUE(r.post == pre);
  EXPECT_TRUE(r.flows.empty());
}

TEST(Concrete, Wraparound) {
  auto p = pipeline_fig("fig01a_bank.sol");
  Storage pre;
  pre.set("accounts", {1}, 5);
  auto r = run(*p->g, pre, {Call{"withdraw", {{"amount", 3}}, 1, 0, {}}});
  EXPECT_EQ(r.post.get("accounts", {1}), 2);
  ASSERT_EQ(r.flows.size(), 1u);
  EXPECT_EQ(r.flows[0].amount, 3);
  EXPECT_EQ(r.flows[0].dest, 1);
}

TEST(Concrete, RequireReverts) {
  auto p = pipeline_fig("fig01a_bank.sol");
  Storage pre;
  auto r = run(*p->g, pre, {Call{"withdraw", {{"amount", 3}}, 1, 0, {}}});
  EXPECT_TRUE(r.reverted[0]);
  EXPECT_TRUE(r.flows.empty());
}

TEST(Concrete, ReentrantDoubleSpend) {
  auto p = pipeline_fig("fig01a_bank.sol");
  Storage pre;
  pre.set("accounts", {1}, 5);
  int call = line_stmt(p->p, 4, ir::Kind::ExtCall);
  ASSERT_GE(call, 0);
  Call outer{"withdraw", {{"amount", 5}}, 1, 0, {}};
  outer.reentries.push_back({call, Call{"withdraw", {{"amount", 5}}, 1, 0, {}}});
  auto r = run(*p->g, pre, {outer});
  EXPECT_FALSE(r.reverted[0]);
  EXPECT_EQ(r.flows.size(), 2u);
  EXPECT_EQ(r.post.get("accounts", {1}), u256(0) - 5);
}

TEST(Concrete, SplitterChangesSecondPayment) {
  auto p = pipeline_fig("fig02_splitter.sol");
  Storage pre;
  pre.set("deposits", {0}, 100);
  pre.set("splits", {0}, 50);
  pre.set("payers", {0}, 1);
  int call = line_stmt(p->p, 16, ir::Kind::ExtCall);
  Call outer{"splitFunds", {{"id", 0}, {"a", 1}, {"b", 2}}, 1, 0, {}};
  outer.reentries.push_back({call, Call{"updateSplit", {{"id", 0}, {"split", 100}}, 1, 0, {}}});
  auto r = run(*p->g, pre, {outer});
  ASSERT_EQ(r.flows.size(), 2u);
  EXPECT_EQ(r.flows[0].amount, 50);
  EXPECT_EQ(r.flows[1].amount, 0);
}

TEST(Concrete, MutexInnerRevert) {
  auto p = pipeline_fig("fig03_mutex.sol");
  Storage pre;
  pre.set("userBalance", {1}, 5);
  int call = line_stmt(p->p, 9, ir::Kind::ExtCall);
  Call outer{"withdrawBalance", {{"amount", 2}}, 1, 0, {}};
  outer.reentries.push_back({call, Call{"withdrawBalance", {{"amount", 2}}, 1, 0, {}}});
  auto r = run(*p->g, pre, {outer});
  // the inner call sees the lock and does nothing
  EXPECT_EQ(r.flows.size(), 1u);
  EXPECT_EQ(r.post.get("userBalance", {1}), 3);
  EXPECT_EQ(r.post.get("mutex"), 0);
}

TEST(Concrete, Constructor) {
  auto p = pipeline_src(R"(contract A {
  address owner; uint x;
  constructor() public { owner = msg.sender; x = 7; }
})");
  auto st = construct(*p->g, {}, 3);
  EXPECT_EQ(st.get("owner"), 3);
  EXPECT_EQ(st.get("x"), 7);
}

TEST(Concrete, StorageEqualityIgnoresZeros) {
  Storage a, b;
  a.set("m", {1}, 0);
  a.set("x", {}, 0);
  EXPECT_TRUE(a == b);
  b.set("m", {1}, 1);
  EXPECT_FALSE(a == b);
}

TEST(Concrete, OracleFindsBankWitness) {
  auto p = pipeline_fig("fig01a_bank.sol");
  auto ws = oracle::interleaving_witnesses(*p->g);
  bool re = false;
  for (auto &w : ws)
    re |= w.kind == "reentrancy" && w.anchor_line == 4;
  EXPECT_TRUE(re);
}

TEST(Concrete, OracleQuietOnMutex) {
  auto p = pipeline_fig("fig03_mutex.sol");
  for (auto &w : oracle::interleaving_witnesses(*p->g))
    EXPECT_NE(w.kind, "reentrancy") << w.detail;
}
