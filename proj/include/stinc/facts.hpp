#pragma once

#include <stinc/datalog.hpp>
#include <stinc/icfg.hpp>
#include <stinc/ir.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace stinc {

// Base relations over one program plus the derived reach/depend relations.
// Statement symbols are "s<id>", storage vars "v:<name>", functions
// "f:<name>", locals "x:<func>:<name>".
struct FactBase {
  const ir::Program *prog = nullptr;
  const ICFG *g = nullptr;
  datalog::Interner in;
  datalog::Database db;

  std::set<int> tainted_calls;          // reentrancy-capable calls with attacker-influenced target/payload
  std::set<int> owner;                  // owner-only statements
  std::set<std::string> owner_vars;     // closure O
  std::set<std::string> tainted_vars;   // storage written with attacker data
  std::map<int, std::string> cv;        // extcall -> "0", a constant, or "sym"

  // per-statement views of the relations (derived once after saturation)
  std::map<int, std::set<std::string>> writes, reads, depends;
  std::map<std::string, std::vector<int>> local_defs;  // "func:local" -> defining statements

  datalog::Sym stmt_sym(int id) { return in.intern("s" + std::to_string(id)); }
  datalog::Sym var_sym(const std::string &v) { return in.intern("v:" + v); }

  bool is_extcall(int s) const { return cv.count(s) > 0; }
  bool is_owner(int s) const { return owner.count(s) > 0; }
  bool writes_var(int s, const std::string &v) const;
  bool accesses_var(int s, const std::string &v) const;  // write or depend
  bool depends_on(int s, const std::string &v) const;

  // storage vars the value of operand `o` used at statement `s` depends on
  std::set<std::string> operand_deps(int s, const ir::Operand &o) const;

  // statements whose outcome decides whether `s` runs: dominating requires and
  // branches with an arm that dominates `s`
  std::vector<int> guards(int s) const;
};

// Rules for reach and depend, in the engine's text syntax.
const char *fact_rules();

FactBase derive_facts(const ICFG &g);

// relation name -> tab separated tuples
std::map<std::string, std::string> dump_facts(const FactBase &fb);

} // namespace stinc
