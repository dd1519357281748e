#include <stinc/error.hpp>
#include <stinc/icfg.hpp>

#include <algorithm>
#include <sstream>

namespace stinc {

ICFG::ICFG(const ir::Program &prog) : prog_(&prog) {
  int n = static_cast<int>(prog.stmts.size());
  succ_.resize(n);
  pred_.resize(n);
  for (auto &s : prog.stmts)
    for (int t : s.succ) {
      if (t < 0)
        continue;
      // branches with both arms on the same node keep a single edge
      if (std::find(succ_[s.id].begin(), succ_[s.id].end(), t) == succ_[s.id].end()) {
        succ_[s.id].push_back(t);
        pred_[t].push_back(s.id);
      }
    }

  reach_.assign(n, boost::dynamic_bitset<>(n));
  for (int a = 0; a < n; ++a) {
    auto &r = reach_[a];
    std::vector<int> work{a};
    r.set(a);
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      for (int y : succ_[x])
        if (!r.test(y)) {
          r.set(y);
          work.push_back(y);
        }
    }
  }

  // iterative dominators, per function
  dom_.assign(n, boost::dynamic_bitset<>(n));
  for (auto &f : prog.funcs) {
    boost::dynamic_bitset<> all(n);
    for (int id : f.stmts)
      all.set(id);
    for (int id : f.stmts)
      dom_[id] = all;
    dom_[f.entry].reset();
    dom_[f.entry].set(f.entry);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int id : f.stmts) {
        if (id == f.entry)
          continue;
        boost::dynamic_bitset<> d = all;
        bool any = false;
        for (int p : pred_[id]) {
          if (!reach_[f.entry].test(p))
            continue;
          d &= dom_[p];
          any = true;
        }
        if (!any)
          d = all;  // unreachable code: leave at top
        d.set(id);
        if (d != dom_[id]) {
          dom_[id] = d;
          changed = true;
        }
      }
    }
  }
}

void ICFG::check(int n) const {
  if (n < 0 || n >= size())
    throw UnknownNode("unknown ICFG node " + std::to_string(n));
}

const std::vector<int> &ICFG::succ(int n) const {
  check(n);
  return succ_[n];
}

const std::vector<int> &ICFG::pred(int n) const {
  check(n);
  return pred_[n];
}

int ICFG::func_of(int n) const {
  check(n);
  return prog_->stmts[n].func;
}

bool ICFG::reach(int a, int b) const {
  check(a);
  check(b);
  return reach_[a].test(b);
}

const boost::dynamic_bitset<> &ICFG::reach_set(int a) const {
  check(a);
  return reach_[a];
}

bool ICFG::dominates(int a, int b) const {
  check(a);
  check(b);
  return dom_[b].test(a);
}

std::string ICFG::dump() const {
  std::ostringstream o;
  for (int a = 0; a < size(); ++a)
    for (int b : succ_[a])
      o << a << " -> " << b << "\n";
  return o.str();
}

ICFG build_icfg(const ir::Program &prog) { return ICFG(prog); }

} // namespace stinc
