#pragma once

#include <stinc/icfg.hpp>
#include <stinc/term.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stinc::concrete {

using sym::u256;

struct Storage {
  std::map<std::string, u256> scalars;
  std::map<std::string, std::map<std::vector<u256>, u256>> colls;  // absent cell = 0
  bool operator==(const Storage &o) const;
  u256 get(const std::string &var, const std::vector<u256> &keys = {}) const;
  void set(const std::string &var, const std::vector<u256> &keys, u256 v);
};

struct Reentry;

// One public call. `reentries` fire when the given external call statement
// executes (each at most once), in order.
struct Call {
  std::string func;
  std::map<std::string, u256> args;  // missing = 0
  u256 sender = 1;
  u256 value = 0;
  std::vector<Reentry> reentries;
};

struct Reentry {
  int at = -1;  // ExtCall / DelegateCall statement id
  Call call;
};

struct Flow {
  int stmt = -1;
  u256 dest;
  u256 amount;
  bool operator==(const Flow &o) const { return stmt == o.stmt && dest == o.dest && amount == o.amount; }
};

struct RunResult {
  Storage post;
  std::vector<Flow> flows;     // ether leaving the contract, committed only
  std::vector<std::vector<Flow>> tx_flows;  // the same, split by top-level call
  std::vector<bool> reverted;  // per top-level call
  bool destroyed = false;
};

constexpr unsigned kThis = 0xC0;
constexpr unsigned kBalance = 10;

// Runs the calls as consecutive transactions. A failed require undoes the
// innermost call (a re-entrant call then returns 0 to its caller).
RunResult run(const ICFG &g, Storage pre, const std::vector<Call> &txs, int step_limit = 100000);

// Initial storage as left by the constructor with the given arguments.
Storage construct(const ICFG &g, const std::map<std::string, u256> &args = {}, u256 sender = 1);

} // namespace stinc::concrete
