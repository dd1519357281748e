#pragma once

#include <stinc/icfg.hpp>
#include <stinc/ir.hpp>
#include <stinc/term.hpp>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stinc {

// Back edges and what each loop writes, per function.
struct LoopInfo {
  std::set<std::pair<int, int>> back_edges;
  std::map<int, std::set<std::string>> written_locals;   // loop head -> locals assigned in the body
  std::map<int, std::set<std::string>> written_storage;  // loop head -> storage vars stored in the body
  bool is_back(int a, int b) const { return back_edges.count({a, b}) > 0; }
  bool is_head(int n) const { return written_locals.count(n) > 0; }
};
LoopInfo find_loops(const ICFG &g, int func);

// Statement order that respects all forward edges of one function.
std::vector<int> forward_order(const ICFG &g, int func, const LoopInfo &li);

struct SummaryPair {
  sym::T value;
  sym::T cond;
  std::string func;
  int line = 0;
};

// Per storage variable: the values a single public call may leave behind and
// the pre-state condition under which it can. Conditions mention "pre:<var>"
// for scalars; every other symbol is free.
struct ValueSummary {
  std::map<std::string, std::vector<SummaryPair>> pairs;
  std::string dump(const sym::Terms &tm) const;  // "(var value cond)" per line
};

std::string pre_symbol(const std::string &var);
bool is_pre_symbol(const std::string &name, std::string *var = nullptr);

sym::T mu_merge(sym::Terms &tm, sym::T b, sym::T v1, sym::T v2);

ValueSummary compute_summary(const ICFG &g, sym::Terms &tm);

} // namespace stinc
