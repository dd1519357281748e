#include <stinc/error.hpp>
#include <stinc/term.hpp>

#include <algorithm>

namespace stinc::sym {

namespace {

u256 fold(Op op, const u256 &a, const u256 &b) {
  switch (op) {
  case Op::Add: return a + b;
  case Op::Sub: return a - b;
  case Op::Mul: return a * b;
  case Op::Div: return b == 0 ? u256(0) : a / b;
  case Op::Mod: return b == 0 ? u256(0) : a % b;
  case Op::BAnd: return a & b;
  case Op::BOr: return a | b;
  case Op::BXor: return a ^ b;
  case Op::Shl: return b < 256 ? u256(a << static_cast<unsigned>(b)) : u256(0);
  case Op::Shr: return b < 256 ? u256(a >> static_cast<unsigned>(b)) : u256(0);
  default:
    throw Error("bad fold");
  }
}

const char *op_text(Op op) {
  switch (op) {
  case Op::Add: return "+";
  case Op::Sub: return "-";
  case Op::Mul: return "*";
  case Op::Div: return "/";
  case Op::Mod: return "%";
  case Op::BAnd: return "&";
  case Op::BOr: return "|";
  case Op::BXor: return "^";
  case Op::BNot: return "~";
  case Op::Shl: return "<<";
  case Op::Shr: return ">>";
  case Op::Eq: return "=";
  case Op::Ult: return "<";
  case Op::Ule: return "<=";
  case Op::And: return "and";
  case Op::Or: return "or";
  case Op::Not: return "not";
  case Op::Ite: return "ite";
  case Op::Select: return "select";
  default: return "?";
  }
}

} // namespace

Terms::Terms() {
  true_ = intern({Op::True, Sort::Bool, 0, "", {}});
  false_ = intern({Op::False, Sort::Bool, 0, "", {}});
}

T Terms::intern(Node n) {
  auto key = std::make_tuple(n.op, n.sort, n.val, n.name, n.args);
  if (auto it = index_.find(key); it != index_.end())
    return it->second;
  T id = static_cast<T>(nodes_.size());
  nodes_.push_back(std::move(n));
  index_.emplace(std::move(key), id);
  return id;
}

T Terms::bv(const u256 &v) { return intern({Op::Const, Sort::BV, v, "", {}}); }

T Terms::bv(const std::string &decimal) {
  boost::multiprecision::cpp_int v(decimal);
  v &= (boost::multiprecision::cpp_int(1) << 256) - 1;
  return bv(static_cast<u256>(v));
}

T Terms::var(const std::string &name, Sort s) { return intern({Op::Var, s, 0, name, {}}); }

T Terms::fresh(const std::string &prefix, Sort s) {
  int n = fresh_count_[prefix]++;
  return var(prefix + "!" + std::to_string(n), s);
}

T Terms::select(const std::string &fn, std::vector<T> args) {
  for (auto &a : args)
    a = as_bv(a);
  return intern({Op::Select, Sort::BV, 0, fn, std::move(args)});
}

std::optional<u256> Terms::const_val(T t) const {
  const Node &n = nodes_.at(t);
  if (n.op == Op::Const)
    return n.val;
  return std::nullopt;
}

std::optional<bool> Terms::bool_val(T t) const {
  if (t == true_)
    return true;
  if (t == false_)
    return false;
  return std::nullopt;
}

T Terms::as_bool(T t) {
  const Node n = nodes_.at(t);
  if (n.sort == Sort::Bool)
    return t;
  if (n.op == Op::Const)
    return boolean(n.val != 0);
  if (n.op == Op::Ite) {
    auto a = const_val(n.args[1]), b = const_val(n.args[2]);
    if (a && b) {
      bool x = *a != 0, y = *b != 0;
      if (x == y)
        return boolean(x);
      return x ? n.args[0] : lnot(n.args[0]);
    }
  }
  return lnot(eq(t, bv(0)));
}

T Terms::as_bv(T t) {
  const Node &n = nodes_.at(t);
  if (n.sort == Sort::BV)
    return t;
  if (t == true_)
    return bv(1);
  if (t == false_)
    return bv(0);
  T one = bv(1), zero = bv(0);
  return intern({Op::Ite, Sort::BV, 0, "", {t, one, zero}});
}

T Terms::eq(T a, T b) {
  if (sort(a) != sort(b)) {
    a = as_bv(a);
    b = as_bv(b);
  }
  if (a == b)
    return true_;
  if (a > b)
    std::swap(a, b);
  if (sort(a) == Sort::Bool) {
    if (auto v = bool_val(a))
      return *v ? b : lnot(b);
    if (auto v = bool_val(b))
      return *v ? a : lnot(a);
    return intern({Op::Eq, Sort::Bool, 0, "", {a, b}});
  }
  auto ca = const_val(a), cb = const_val(b);
  if (ca && cb)
    return boolean(*ca == *cb);
  // ite(c, k1, k2) == k
  for (int pass = 0; pass < 2; ++pass) {
    T x = pass ? b : a, y = pass ? a : b;
    const Node &n = nodes_.at(x);
    auto k = const_val(y);
    if (n.op == Op::Ite && k) {
      auto k1 = const_val(n.args[1]), k2 = const_val(n.args[2]);
      if (k1 && k2) {
        bool e1 = *k1 == *k, e2 = *k2 == *k;
        if (e1 && e2)
          return true_;
        if (!e1 && !e2)
          return false_;
        T c = n.args[0];
        return e1 ? c : lnot(c);
      }
    }
  }
  return intern({Op::Eq, Sort::Bool, 0, "", {a, b}});
}

std::vector<T> Terms::conjuncts(T t) const {
  const Node &n = nodes_.at(t);
  if (n.op == Op::And)
    return n.args;
  if (t == true_)
    return {};
  return {t};
}

T Terms::simplify_and(std::vector<T> xs) {
  std::vector<T> flat;
  for (T x : xs) {
    x = as_bool(x);
    if (x == false_)
      return false_;
    if (x == true_)
      continue;
    const Node &n = nodes_.at(x);
    if (n.op == Op::And)
      flat.insert(flat.end(), n.args.begin(), n.args.end());
    else
      flat.push_back(x);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  for (T x : flat) {
    const Node &n = nodes_.at(x);
    if (n.op == Op::Not && std::binary_search(flat.begin(), flat.end(), n.args[0]))
      return false_;
  }
  if (flat.empty())
    return true_;
  if (flat.size() == 1)
    return flat[0];
  return intern({Op::And, Sort::Bool, 0, "", std::move(flat)});
}

T Terms::simplify_or(std::vector<T> xs) {
  std::vector<T> flat;
  for (T x : xs) {
    x = as_bool(x);
    if (x == true_)
      return true_;
    if (x == false_)
      continue;
    const Node &n = nodes_.at(x);
    if (n.op == Op::Or)
      flat.insert(flat.end(), n.args.begin(), n.args.end());
    else
      flat.push_back(x);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  // (P and c) or (P and not c) -> P ; P or (P and Q) -> P
  for (bool changed = true; changed && flat.size() > 1;) {
    changed = false;
    for (size_t i = 0; i < flat.size() && !changed; ++i)
      for (size_t j = 0; j < flat.size() && !changed; ++j) {
        if (i == j)
          continue;
        auto ci = conjuncts(flat[i]), cj = conjuncts(flat[j]);
        std::vector<T> common, ri, rj;
        std::set_intersection(ci.begin(), ci.end(), cj.begin(), cj.end(), std::back_inserter(common));
        std::set_difference(ci.begin(), ci.end(), common.begin(), common.end(), std::back_inserter(ri));
        std::set_difference(cj.begin(), cj.end(), common.begin(), common.end(), std::back_inserter(rj));
        T repl = -1;
        if (ri.empty())
          repl = flat[i];
        else if (ri.size() == 1 && rj.size() == 1 && (lnot(ri[0]) == rj[0]))
          repl = land(common);
        if (repl >= 0) {
          std::vector<T> next;
          for (size_t k = 0; k < flat.size(); ++k)
            if (k != i && k != j)
              next.push_back(flat[k]);
          next.push_back(repl);
          return simplify_or(next);
        }
      }
  }
  for (T x : flat) {
    const Node &n = nodes_.at(x);
    if (n.op == Op::Not && std::binary_search(flat.begin(), flat.end(), n.args[0]))
      return true_;
  }
  if (flat.empty())
    return false_;
  if (flat.size() == 1)
    return flat[0];
  return intern({Op::Or, Sort::Bool, 0, "", std::move(flat)});
}

T Terms::mk(Op op, std::vector<T> a) {
  switch (op) {
  case Op::And:
    return simplify_and(std::move(a));
  case Op::Or:
    return simplify_or(std::move(a));
  case Op::Not: {
    T x = as_bool(a.at(0));
    if (auto v = bool_val(x))
      return boolean(!*v);
    const Node &n = nodes_.at(x);
    if (n.op == Op::Not)
      return n.args[0];
    return intern({Op::Not, Sort::Bool, 0, "", {x}});
  }
  case Op::Eq:
    return eq(a.at(0), a.at(1));
  case Op::Ite: {
    T c = as_bool(a.at(0)), x = a.at(1), y = a.at(2);
    if (auto v = bool_val(c))
      return *v ? x : y;
    if (sort(x) != sort(y)) {
      x = as_bv(x);
      y = as_bv(y);
    }
    if (x == y)
      return x;
    if (sort(x) == Sort::Bool) {
      if (x == true_ && y == false_)
        return c;
      if (x == false_ && y == true_)
        return lnot(c);
    }
    if (nodes_.at(c).op == Op::Not)
      return ite(nodes_.at(c).args[0], y, x);
    return intern({Op::Ite, sort(x), 0, "", {c, x, y}});
  }
  case Op::Ult:
  case Op::Ule: {
    T x = as_bv(a.at(0)), y = as_bv(a.at(1));
    auto cx = const_val(x), cy = const_val(y);
    if (cx && cy)
      return boolean(op == Op::Ult ? *cx < *cy : *cx <= *cy);
    if (x == y)
      return boolean(op == Op::Ule);
    if (op == Op::Ult && cy && *cy == 0)
      return false_;
    if (op == Op::Ule && cx && *cx == 0)
      return true_;
    return intern({op, Sort::Bool, 0, "", {x, y}});
  }
  case Op::BNot: {
    T x = as_bv(a.at(0));
    if (auto c = const_val(x))
      return bv(~*c);
    return intern({Op::BNot, Sort::BV, 0, "", {x}});
  }
  case Op::Add:
  case Op::Sub:
  case Op::Mul:
  case Op::Div:
  case Op::Mod:
  case Op::BAnd:
  case Op::BOr:
  case Op::BXor:
  case Op::Shl:
  case Op::Shr: {
    T x = as_bv(a.at(0)), y = as_bv(a.at(1));
    auto cx = const_val(x), cy = const_val(y);
    if (cx && cy)
      return bv(fold(op, *cx, *cy));
    bool zx = cx && *cx == 0, zy = cy && *cy == 0, oy = cy && *cy == 1;
    switch (op) {
    case Op::Add:
      if (zx)
        return y;
      if (zy)
        return x;
      if (x > y)
        std::swap(x, y);
      break;
    case Op::Sub:
      if (zy)
        return x;
      if (x == y)
        return bv(0);
      break;
    case Op::Mul:
      if (zx || zy)
        return bv(0);
      if (oy)
        return x;
      if (cx && *cx == 1)
        return y;
      if (x > y)
        std::swap(x, y);
      break;
    case Op::Div:
      if (zy || zx)
        return bv(0);
      if (oy)
        return x;
      break;
    case Op::Mod:
      if (zy || zx || oy)
        return bv(0);
      break;
    case Op::BAnd:
      if (zx || zy)
        return bv(0);
      break;
    case Op::BOr:
    case Op::BXor:
      if (zx)
        return y;
      if (zy)
        return x;
      break;
    case Op::Shl:
    case Op::Shr:
      if (zy)
        return x;
      if (zx)
        return bv(0);
      break;
    default:
      break;
    }
    return intern({op, Sort::BV, 0, "", {x, y}});
  }
  default:
    throw Error("mk: leaf op");
  }
}

T Terms::binop(const std::string &op, T a, T b) {
  if (op == "+") return mk(Op::Add, {a, b});
  if (op == "-") return mk(Op::Sub, {a, b});
  if (op == "*") return mk(Op::Mul, {a, b});
  if (op == "/") return mk(Op::Div, {a, b});
  if (op == "%") return mk(Op::Mod, {a, b});
  if (op == "&") return mk(Op::BAnd, {a, b});
  if (op == "|") return mk(Op::BOr, {a, b});
  if (op == "^") return mk(Op::BXor, {a, b});
  if (op == "<<") return mk(Op::Shl, {a, b});
  if (op == ">>") return mk(Op::Shr, {a, b});
  if (op == "==") return eq(a, b);
  if (op == "!=") return ne(a, b);
  if (op == "<") return mk(Op::Ult, {a, b});
  if (op == "<=") return mk(Op::Ule, {a, b});
  if (op == ">") return mk(Op::Ult, {b, a});
  if (op == ">=") return mk(Op::Ule, {b, a});
  if (op == "&&") return land(a, b);
  if (op == "||") return lor(a, b);
  throw Error("operator " + op);
}

T Terms::unop(const std::string &op, T a) {
  if (op == "!") return lnot(a);
  if (op == "~") return mk(Op::BNot, {a});
  if (op == "-") return mk(Op::Sub, {bv(0), a});
  if (op == "+") return as_bv(a);
  throw Error("operator " + op);
}

T Terms::substitute(T t, const std::function<std::optional<T>(T)> &f) {
  std::map<T, T> memo;
  std::function<T(T)> go = [&](T x) -> T {
    if (auto it = memo.find(x); it != memo.end())
      return it->second;
    const Node n = nodes_.at(x);
    T r = x;
    if (n.op == Op::Var) {
      if (auto v = f(x))
        r = *v;
    } else if (n.op == Op::Select) {
      std::vector<T> args;
      for (T c : n.args)
        args.push_back(go(c));
      r = select(n.name, args);
      if (auto v = f(r))
        r = *v;
    } else if (!n.args.empty()) {
      std::vector<T> args;
      bool same = true;
      for (T c : n.args) {
        args.push_back(go(c));
        same = same && args.back() == c;
      }
      if (!same)
        r = mk(n.op, args);
    }
    memo[x] = r;
    return r;
  };
  return go(t);
}

void Terms::vars(T t, std::set<T> &out) const {
  std::vector<T> stack{t};
  std::set<T> seen;
  while (!stack.empty()) {
    T x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second)
      continue;
    const Node &n = nodes_.at(x);
    if (n.op == Op::Var)
      out.insert(x);
    for (T c : n.args)
      stack.push_back(c);
  }
}

void Terms::selects(T t, std::set<T> &out) const {
  std::vector<T> stack{t};
  std::set<T> seen;
  while (!stack.empty()) {
    T x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second)
      continue;
    const Node &n = nodes_.at(x);
    if (n.op == Op::Select)
      out.insert(x);
    for (T c : n.args)
      stack.push_back(c);
  }
}

void Terms::consts(T t, std::set<u256> &out) const {
  std::vector<T> stack{t};
  std::set<T> seen;
  while (!stack.empty()) {
    T x = stack.back();
    stack.pop_back();
    if (!seen.insert(x).second)
      continue;
    const Node &n = nodes_.at(x);
    if (n.op == Op::Const)
      out.insert(n.val);
    for (T c : n.args)
      stack.push_back(c);
  }
}

u256 Terms::eval(T t, const Model &m) const {
  std::map<T, u256> memo;
  std::function<u256(T)> go = [&](T x) -> u256 {
    if (auto it = memo.find(x); it != memo.end())
      return it->second;
    const Node &n = nodes_.at(x);
    u256 r = 0;
    switch (n.op) {
    case Op::Const: r = n.val; break;
    case Op::True: r = 1; break;
    case Op::False: r = 0; break;
    case Op::Var: {
      auto it = m.vars.find(x);
      r = it == m.vars.end() ? u256(0) : it->second;
      if (n.sort == Sort::Bool)
        r = r != 0;
      break;
    }
    case Op::Select: {
      std::vector<u256> args;
      for (T c : n.args)
        args.push_back(go(c));
      auto it = m.funcs.find({n.name, args});
      r = it == m.funcs.end() ? u256(0) : it->second;
      break;
    }
    case Op::BNot: r = ~go(n.args[0]); break;
    case Op::Eq: r = go(n.args[0]) == go(n.args[1]); break;
    case Op::Ult: r = go(n.args[0]) < go(n.args[1]); break;
    case Op::Ule: r = go(n.args[0]) <= go(n.args[1]); break;
    case Op::Not: r = go(n.args[0]) == 0; break;
    case Op::And:
      r = 1;
      for (T c : n.args)
        if (go(c) == 0) {
          r = 0;
          break;
        }
      break;
    case Op::Or:
      r = 0;
      for (T c : n.args)
        if (go(c) != 0) {
          r = 1;
          break;
        }
      break;
    case Op::Ite: r = go(n.args[0]) != 0 ? go(n.args[1]) : go(n.args[2]); break;
    default: r = fold(n.op, go(n.args[0]), go(n.args[1])); break;
    }
    memo[x] = r;
    return r;
  };
  return go(t);
}

std::string Terms::str(T t) const {
  const Node &n = nodes_.at(t);
  switch (n.op) {
  case Op::Const: return n.val.str();
  case Op::True: return "true";
  case Op::False: return "false";
  case Op::Var: return n.name;
  default: break;
  }
  std::string s = "(" + std::string(op_text(n.op));
  if (n.op == Op::Select)
    s += " " + n.name;
  for (T c : n.args)
    s += " " + str(c);
  return s + ")";
}

} // namespace stinc::sym
