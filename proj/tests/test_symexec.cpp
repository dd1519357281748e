#include "unit_util.hpp"

#include <stinc/solver.hpp>
#include <stinc/symexec.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace stinc;

namespace {

using Detector = std::vector<Finding> (*)(const SDG &);

// verdict per finding, summary mode falls back to havoc's refutation like the driver
std::vector<Verdict> refine_all(Pipeline &p, Detector d, RefineMode mode, const std::string &var = "") {
  sym::Terms tm;
  auto solver = sym::make_builtin_solver();
  ValueSummary vs = compute_summary(*p.g, tm);
  ExecConfig cfg;
  cfg.mode = RefineMode::Havoc;
  ExecConfig sv = cfg;
  sv.mode = RefineMode::Summary;
  sv.summary = &vs;
  std::vector<Verdict> out;
  for (auto &f : dedup(d(p.sdg), p.p)) {
    if (!var.empty() && (!f.pair || f.pair->var != var))
      continue;
    auto r = refine(f, *p.g, tm, *solver, cfg);
    if (mode == RefineMode::Summary && r.verdict != Verdict::Refuted)
      r = refine(f, *p.g, tm, *solver, sv);
    out.push_back(r.verdict);
  }
  return out;
}

int count(const std::vector<Verdict> &vs, Verdict v) { return static_cast<int>(std::count(vs.begin(), vs.end(), v)); }

} // namespace

TEST(Symexec, MutexRefutedWithSummary) {
  auto p = pipeline_fig("fig03_mutex.sol");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Summary);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(count(v, Verdict::Refuted), static_cast<int>(v.size()));
}

TEST(Symexec, MutexConfirmedWithHavoc) {
  auto p = pipeline_fig("fig03_mutex.sol");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Havoc);
  EXPECT_GT(count(v, Verdict::Confirmed), 0);
}

TEST(Symexec, BankConfirmed) {
  auto p = pipeline_fig("fig01a_bank.sol");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Summary);
  EXPECT_GT(count(v, Verdict::Confirmed), 0);
}

TEST(Symexec, SplitterConfirmed) {
  auto p = pipeline_fig("fig02_splitter.sol");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Summary, "splits");
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(count(v, Verdict::Confirmed), static_cast<int>(v.size()));
}

TEST(Symexec, LockRefuted) {
  auto p = pipeline_fig("fig15_lock.sol");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Summary);
  EXPECT_EQ(count(v, Verdict::Refuted), static_cast<int>(v.size()));
}

TEST(Symexec, BetTodConfirmed) {
  auto p = pipeline_fig("fig18_bet.sol");
  auto v = refine_all(*p, detect_tod, RefineMode::Summary);
  EXPECT_GT(count(v, Verdict::Confirmed), 0);
}

TEST(Symexec, ConstantAmountNotTod) {
  auto p = pipeline_src(R"(contract A {
  uint flag;
  function set(uint v) public { flag = v; }
  function pay() public { if (flag > 5) { flag = 0; } msg.sender.transfer(1); }
})");
  auto v = refine_all(*p, detect_tod, RefineMode::Havoc);
  for (auto x : v)
    EXPECT_NE(x, Verdict::Confirmed);
}

TEST(Symexec, InfeasibleGuard) {
  auto p = pipeline_src(R"(contract A {
  mapping(address => uint) bal; uint x;
  function w() public {
    require(x == 1);
    require(x == 2);
    msg.sender.call.value(bal[msg.sender])("");
    bal[msg.sender] = 0;
  }
  function d() public { bal[msg.sender] = 5; }
})");
  auto v = refine_all(*p, detect_reentrancy, RefineMode::Havoc);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(count(v, Verdict::Refuted), static_cast<int>(v.size()));
}

TEST(Symexec, ExecutorReachesExit) {
  auto p = pipeline_fig("fig01a_bank.sol");
  sym::Terms tm;
  auto solver = sym::make_builtin_solver();
  Executor ex(*p->g, tm, *solver, ExecConfig{});
  int f = p->p.find_func("withdraw");
  ASSERT_GE(f, 0);
  auto out = ex.explore(ex.initial(p->g->entry(f), 1), {p->g->entry(f), p->g->exit(f)}, true);
  EXPECT_TRUE(out.any_sat);
}
