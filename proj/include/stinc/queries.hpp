#pragma once

#include <stinc/sdg.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stinc {

enum class FindingKind {
  Reentrancy,
  TodTransfer,
  TodAmount,
  TodReceiver,
  CondSuicide,
  UncondSuicide,
  EthWithdrawal,
  Generic,
};
const char *kind_name(FindingKind k);

enum class Verdict { Potential, Confirmed, Refuted };
const char *verdict_name(Verdict v);

struct HazardPair {
  int s1 = -1, s2 = -1;
  std::string var;
  bool w1 = false, w2 = false;  // access kinds, true = write
};

// Ordered waypoints through the ICFG plus re-entry edges. `nodes`/`edges` is
// every ICFG node lying between consecutive waypoints.
struct CexGraph {
  int entry = -1;
  std::vector<int> waypoints;
  std::vector<int> targets;
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> path;   // one shortest node path through the waypoints
  std::vector<int> lines;  // source lines of storage-touching path nodes and the anchor
};

struct Finding {
  FindingKind kind = FindingKind::Generic;
  std::optional<HazardPair> pair;  // s1: victim / guarded side, s2: attacker side
  int anchor = -1;                 // extcall or selfdestruct
  int attacker_func = -1;          // function that runs s2
  CexGraph cex;
  Verdict verdict = Verdict::Potential;
  std::string note;
};

std::vector<HazardPair> hazard_pairs(const SDG &sdg);

std::vector<Finding> detect_reentrancy(const SDG &sdg);
std::vector<Finding> detect_tod(const SDG &sdg);
std::vector<Finding> detect_suicide(const SDG &sdg);
std::vector<Finding> detect_eth_withdrawal(const SDG &sdg);
std::vector<Finding> detect_generic(const SDG &sdg, int target);

// Fills f.cex from the finding's statements.
void extract_cex(Finding &f, const SDG &sdg);

// Collapses findings with the same kind, variable, (unordered) source lines,
// anchor line and attacker function.
std::vector<Finding> dedup(std::vector<Finding> fs, const ir::Program &p);

int line_of(const ir::Program &p, int stmt);

} // namespace stinc
