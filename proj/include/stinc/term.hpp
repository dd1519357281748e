#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace stinc::sym {

using u256 = boost::multiprecision::uint256_t;
using T = int;  // index into Terms

enum class Sort : unsigned char { BV, Bool };

enum class Op : unsigned char {
  Const,   // BV literal
  True,
  False,
  Var,     // named symbol of either sort
  Select,  // uninterpreted read name(args...) of a storage collection
  Add,
  Sub,
  Mul,
  Div,     // total: x / 0 = 0
  Mod,     // total: x % 0 = 0
  BAnd,
  BOr,
  BXor,
  BNot,
  Shl,
  Shr,
  Eq,
  Ult,
  Ule,
  And,
  Or,
  Not,
  Ite,
};

struct Node {
  Op op;
  Sort sort;
  u256 val;
  std::string name;
  std::vector<T> args;
};

// Assignment for symbols and uninterpreted reads.
struct Model {
  std::map<T, u256> vars;  // booleans as 0/1
  std::map<std::pair<std::string, std::vector<u256>>, u256> funcs;
};

// Hash-consed term DAG with simplifying constructors. 256-bit unsigned
// wraparound arithmetic, as on the EVM.
class Terms {
public:
  Terms();

  const Node &node(T t) const { return nodes_.at(t); }
  Sort sort(T t) const { return nodes_.at(t).sort; }
  std::size_t size() const { return nodes_.size(); }

  T bv(const u256 &v);
  T bv(const std::string &decimal);
  T bv(int v) { return bv(u256(v)); }
  T boolean(bool b) { return b ? true_ : false_; }
  T var(const std::string &name, Sort s = Sort::BV);
  T fresh(const std::string &prefix, Sort s = Sort::BV);
  T select(const std::string &fn, std::vector<T> args);

  T mk(Op op, std::vector<T> args);
  T eq(T a, T b);
  T ne(T a, T b) { return lnot(eq(a, b)); }
  T land(std::vector<T> xs) { return mk(Op::And, std::move(xs)); }
  T land(T a, T b) { return mk(Op::And, {a, b}); }
  T lor(std::vector<T> xs) { return mk(Op::Or, std::move(xs)); }
  T lor(T a, T b) { return mk(Op::Or, {a, b}); }
  T lnot(T a) { return mk(Op::Not, {a}); }
  T ite(T c, T a, T b) { return mk(Op::Ite, {c, a, b}); }

  T as_bool(T t);
  T as_bv(T t);

  // IR operator names ("+", "==", "&&", "!", ...)
  T binop(const std::string &op, T a, T b);
  T unop(const std::string &op, T a);

  std::optional<u256> const_val(T t) const;
  std::optional<bool> bool_val(T t) const;
  bool is_true(T t) const { return t == true_; }
  bool is_false(T t) const { return t == false_; }

  // Rebuilds `t` bottom-up; `f` may replace any Var or Select leaf.
  T substitute(T t, const std::function<std::optional<T>(T)> &f);
  void vars(T t, std::set<T> &out) const;     // Var leaves
  void selects(T t, std::set<T> &out) const;  // Select applications
  void consts(T t, std::set<u256> &out) const;

  u256 eval(T t, const Model &m) const;
  std::string str(T t) const;  // s-expression

  std::vector<T> conjuncts(T t) const;

private:
  std::vector<Node> nodes_;
  std::map<std::tuple<Op, Sort, u256, std::string, std::vector<T>>, T> index_;
  std::map<std::string, int> fresh_count_;
  T true_ = -1, false_ = -1;

  T intern(Node n);
  T simplify_and(std::vector<T> xs);
  T simplify_or(std::vector<T> xs);
};

} // namespace stinc::sym
