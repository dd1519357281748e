#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <stinc/concrete.hpp>
#include <stinc/datalog.hpp>
#include <stinc/driver.hpp>
#include <stinc/icfg.hpp>
#include <stinc/vsa.hpp>

#include <random>
#include <string>
#include <vector>

namespace oracle {

std::string corpus_dir();  // <source>/corpus
std::vector<std::string> fixture_files();
std::vector<std::string> figure_files();
std::string read_file(const std::string &path);

stinc::ir::Program load_program(const std::string &path);

// Plain bottom-up evaluation: every rule re-joined against full relations
// until nothing changes, strata computed from scratch.
stinc::datalog::Database naive_saturate(const std::vector<stinc::datalog::Rule> &rules,
                                        const stinc::datalog::Database &base);

// Random base facts (at most `max_facts`) over the relations read by `rules`
// that are never derived.
stinc::datalog::Database random_base(const std::vector<stinc::datalog::Rule> &rules, stinc::datalog::Interner &in,
                                     std::mt19937 &rng, int max_facts);

struct Witness {
  std::string kind;  // "reentrancy" or "tod"
  int anchor_line = 0;
  std::string attacker;  // re-entering function (reentrancy)
  std::string detail;
};

struct OracleLimits {
  int max_prestates = 24;
  unsigned seed = 7;
};

// Storage values over {0,1,2} (bools {0,1}); senders 1 and 2, deployer 3.
std::vector<stinc::concrete::Storage> prestates(const stinc::ICFG &g, const OracleLimits &lim);
std::vector<stinc::concrete::Call> calls_of(const stinc::ir::Program &p, int func);

// Concrete executions where a re-entrant call (or the other transaction
// order) gives an outcome that no serial execution of a subset of the same
// calls produces.
std::vector<Witness> interleaving_witnesses(const stinc::ICFG &g, const OracleLimits &lim = {});

// Changed post-state values of single public calls that no summary pair
// covers. One message per violation.
std::vector<std::string> summary_violations(const stinc::ICFG &g, stinc::sym::Terms &tm,
                                            const stinc::ValueSummary &vs, const OracleLimits &lim = {});

} // namespace oracle
