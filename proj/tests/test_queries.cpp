#include "unit_util.hpp"

#include <gtest/gtest.h>

using namespace stinc;

namespace {
std::set<std::pair<int, int>> line_pairs(const Pipeline &p, const std::vector<Finding> &fs, const std::string &var) {
  std::set<std::pair<int, int>> out;
  for (auto &f : fs)
    if (f.pair && f.pair->var == var)
      out.insert({line_of(p.p, f.pair->s1), line_of(p.p, f.pair->s2)});
  return out;
}
} // namespace

TEST(Queries, SplitterReentrancyPairs) {
  auto p = pipeline_fig("fig02_splitter.sol");
  auto fs = detect_reentrancy(p->sdg);
  auto pairs = line_pairs(*p, fs, "splits");
  EXPECT_TRUE(pairs.count({16, 5}));
  EXPECT_TRUE(pairs.count({19, 5}));
  for (auto &f : fs)
    EXPECT_EQ(f.kind, FindingKind::Reentrancy);
}

TEST(Queries, SplitterCounterexampleLines) {
  auto p = pipeline_fig("fig02_splitter.sol");
  bool seen = false;
  for (auto &f : dedup(detect_reentrancy(p->sdg), p->p))
    if (f.pair && f.pair->var == "splits" && line_of(p->p, f.pair->s1) == 16) {
      extract_cex(f, p->sdg);
      EXPECT_EQ(f.cex.lines, (std::vector<int>{11, 12, 16, 4, 5}));
      seen = true;
    }
  EXPECT_TRUE(seen);
}

TEST(Queries, NoUpdateNoReentrancy) {
  auto p = pipeline_fig("fig02_splitter_no_update.sol");
  EXPECT_TRUE(detect_reentrancy(p->sdg).empty());
}

TEST(Queries, BankReentrancy) {
  auto p = pipeline_fig("fig01a_bank.sol");
  auto fs = detect_reentrancy(p->sdg);
  ASSERT_FALSE(fs.empty());
  EXPECT_EQ(fs[0].pair->var, "accounts");
}

TEST(Queries, TodKinds) {
  auto p = pipeline_fig("fig18_bet.sol");
  bool amount = false;
  for (auto &f : detect_tod(p->sdg))
    amount |= f.kind == FindingKind::TodAmount;
  EXPECT_TRUE(amount);
}

TEST(Queries, OwnerOnlyTransferNotTod) {
  auto p = pipeline_src(R"(contract A {
  address owner; uint price;
  constructor() public { owner = msg.sender; }
  function setPrice(uint v) public { require(msg.sender == owner); price = v; }
  function pay() public { require(msg.sender == owner); msg.sender.transfer(price); }
})");
  EXPECT_TRUE(detect_tod(p->sdg).empty());
}

TEST(Queries, ConditionalSuicide) {
  auto p = pipeline_fig("fig12_suicide.sol");
  auto fs = detect_suicide(p->sdg);
  ASSERT_EQ(fs.size(), 1u);
  EXPECT_EQ(fs[0].kind, FindingKind::CondSuicide);
  EXPECT_EQ(line_of(p->p, fs[0].pair->s1), 9);
  EXPECT_EQ(line_of(p->p, fs[0].pair->s2), 5);
}

TEST(Queries, UnconditionalSuicide) {
  auto p = pipeline_src("contract A { function kill() public { selfdestruct(msg.sender); } }");
  auto fs = detect_suicide(p->sdg);
  ASSERT_EQ(fs.size(), 1u);
  EXPECT_EQ(fs[0].kind, FindingKind::UncondSuicide);
}

TEST(Queries, OwnerSuicideSafe) {
  auto p = pipeline_src(R"(contract A {
  address owner;
  constructor() public { owner = msg.sender; }
  function kill() public { require(msg.sender == owner); selfdestruct(owner); }
})");
  EXPECT_TRUE(detect_suicide(p->sdg).empty());
}

TEST(Queries, EtherWithdrawal) {
  auto p = pipeline_fig("fig13_withdrawal.sol");
  EXPECT_FALSE(detect_eth_withdrawal(p->sdg).empty());
}

TEST(Queries, DedupIdempotent) {
  auto p = pipeline_fig("fig03_mutex.sol");
  auto once = dedup(detect_reentrancy(p->sdg), p->p);
  auto twice = dedup(once, p->p);
  EXPECT_EQ(once.size(), twice.size());
}
