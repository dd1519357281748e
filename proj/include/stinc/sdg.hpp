#pragma once

#include <stinc/facts.hpp>

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace stinc {

struct SDG {
  const FactBase *facts = nullptr;
  std::set<std::string> var_nodes;
  std::set<int> stmt_nodes;
  std::set<std::pair<int, std::string>> w_edges;  // stmt -> var
  std::set<std::pair<std::string, int>> d_edges;  // var -> stmt
  std::set<std::pair<int, int>> o_edges;          // all order edges
  std::set<std::pair<int, int>> reentry_edges;    // the extcall -> entry / exit -> successor subset

  std::vector<int> o_succ(int s) const;

  // same edge format as the ICFG dump, annotated with node kind and label:
  // "s3 -> v:splits [W]", "v:splits -> s7 [D]", "s7 -> s12 [O]"
  std::string dump() const;
};

const char *sdg_rules();

// Saturates the graph rules over the fact database (extends fb.db in place).
SDG build_sdg(FactBase &fb);

// Merge a second contract into `prog` so one SDG covers both. With
// `delegate` the callee code runs on the caller's storage (matched by slot
// order) and delegatecalls become plain havocs; otherwise the callee keeps its
// own storage under a "<Name>." prefix.
ir::Program combine_programs(const ir::Program &prog, const ir::Program &callee, bool delegate);

// Names of contracts created with `new C(...)` inside `prog`.
std::set<std::string> created_contracts(const ir::Program &prog);

} // namespace stinc
