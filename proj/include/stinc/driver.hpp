#pragma once

#include <stinc/queries.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace stinc {

enum class Mode { SO, StHv, StVs };
const char *mode_name(Mode m);
Mode parse_mode(const std::string &s);  // throws Error

// detector names as on the command line
inline const std::vector<std::string> &all_detectors() {
  static const std::vector<std::string> d{"reentrancy", "tod", "suicide", "ether-withdrawal"};
  return d;
}

struct AnalysisConfig {
  std::set<std::string> detectors{all_detectors().begin(), all_detectors().end()};
  Mode mode = Mode::StVs;
  double timeout_secs = 60;
  std::string solver = "builtin";  // or "external"
  std::string solver_command = "z3 -in -smt2";
  std::set<std::string> dumps;     // facts, sdg, icfg, summary
  int jobs = 0;                    // 0 = hardware threads
};

struct FindingReport {
  std::string kind;
  std::string var;
  int s1_line = 0, s2_line = 0, anchor_line = 0;
  std::string attacker;  // function running the racing access
  std::string verdict;   // potential, confirmed, refuted
  std::string reason;
  std::vector<int> cex;
};

struct Timing {
  long explore_us = 0, vsa_us = 0, refine_us = 0, total_us = 0;
};

struct ContractReport {
  std::string file;
  std::string contract;
  std::string outcome;  // safe, unsafe, timeout, error
  std::string error;
  std::vector<FindingReport> findings;
  Timing timing;
  std::map<std::string, std::string> dumps;

  bool surviving(const FindingReport &f) const { return f.verdict != "refuted"; }
};

struct Report {
  std::string mode;
  std::vector<ContractReport> contracts;
};

// Analyzes every deployable contract of one source text.
std::vector<ContractReport> analyze_source(const std::string &file, const std::string &text,
                                           const AnalysisConfig &cfg);

// Files and directories (searched recursively for *.sol). Throws IOError for
// missing paths.
Report analyze(const std::vector<std::string> &paths, const AnalysisConfig &cfg);

std::string render(const Report &r, const std::string &format);  // json or text
Report report_from_json(const std::string &text);
int exit_code(const Report &r);  // 0 all safe, 1 findings, 2 errors or timeouts

} // namespace stinc
