#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace stinc::datalog {

using Sym = int;
using Tuple = std::vector<Sym>;

// Maps constant names to dense integers.
class Interner {
public:
  Sym intern(const std::string &s);
  const std::string &name(Sym s) const { return names_.at(s); }
  std::size_t size() const { return names_.size(); }

private:
  std::unordered_map<std::string, Sym> ids_;
  std::vector<std::string> names_;
};

struct Term {
  int var = -1;  // >= 0: variable index within the rule
  Sym val = 0;
  bool is_var() const { return var >= 0; }
  static Term v(int i) { return {i, 0}; }
  static Term c(Sym s) { return {-1, s}; }
};

struct Atom {
  std::string rel;  // "!=" for the builtin inequality
  std::vector<Term> args;
  bool negated = false;
  bool is_neq() const { return rel == "!="; }
};

struct Rule {
  Atom head;
  std::vector<Atom> body;
  int num_vars = 0;
};

class Database {
public:
  bool add(const std::string &rel, const Tuple &t) { return rels_[rel].insert(t).second; }
  bool contains(const std::string &rel, const Tuple &t) const;
  const std::set<Tuple> &tuples(const std::string &rel) const;
  std::vector<std::string> relations() const;
  std::size_t total() const;
  bool operator==(const Database &o) const;

private:
  std::map<std::string, std::set<Tuple>> rels_;
};

// Text form: `head(X, Y) :- a(X, Z), !b(Z), c(Z, Y), X != Y.`
// Upper-case identifiers are variables, everything else (including quoted
// strings) is a constant interned through `in`.
std::vector<Rule> parse_rules(std::string_view text, Interner &in);

// Groups relations into strata; negated dependencies must point to a lower
// stratum. Throws StratificationError otherwise.
std::vector<std::vector<std::size_t>> stratify(const std::vector<Rule> &rules);

// Least fixpoint of `rules` over `base`, semi-naive within each stratum.
Database saturate(const std::vector<Rule> &rules, Database base);

// Tab separated tuples, one per line, sorted.
std::string dump_relation(const Database &db, const std::string &rel, const Interner &in);

} // namespace stinc::datalog
