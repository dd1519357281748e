#pragma once

#include <stinc/ir.hpp>

#include <boost/dynamic_bitset.hpp>

#include <string>
#include <vector>

namespace stinc {

// Control-flow graph over all IR statements of a program. Public functions
// have no edges between them; re-entry edges are added later by the SDG.
class ICFG {
public:
  explicit ICFG(const ir::Program &prog);

  const ir::Program &program() const { return *prog_; }
  int size() const { return static_cast<int>(succ_.size()); }
  const std::vector<int> &succ(int n) const;
  const std::vector<int> &pred(int n) const;
  int func_of(int n) const;
  int entry(int f) const { return prog_->funcs.at(f).entry; }
  int exit(int f) const { return prog_->funcs.at(f).exit; }

  // reflexive, intra-procedural
  bool reach(int a, int b) const;
  const boost::dynamic_bitset<> &reach_set(int a) const;
  bool intermediate(int a, int b, int c) const { return reach(a, b) && reach(b, c); }

  // a dominates b (reflexive); both must be in the same function
  bool dominates(int a, int b) const;

  // one edge per line, "src -> dst"
  std::string dump() const;

private:
  const ir::Program *prog_;
  std::vector<std::vector<int>> succ_, pred_;
  std::vector<boost::dynamic_bitset<>> reach_;
  std::vector<boost::dynamic_bitset<>> dom_;  // dom_[b] = dominators of b
  void check(int n) const;
};

ICFG build_icfg(const ir::Program &prog);

} // namespace stinc
