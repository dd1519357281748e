#include <stinc/vsa.hpp>

#include <algorithm>
#include <deque>
#include <sstream>

namespace stinc {

using ir::Kind;
using ir::Operand;
using sym::T;

LoopInfo find_loops(const ICFG &g, int func) {
  const ir::Program &p = g.program();
  LoopInfo li;
  int entry = p.funcs[func].entry;
  std::set<int> on_stack, done;
  std::vector<std::pair<int, size_t>> stack{{entry, 0}};
  on_stack.insert(entry);
  while (!stack.empty()) {
    auto &[n, i] = stack.back();
    const auto &ss = g.succ(n);
    if (i < ss.size()) {
      int t = ss[i++];
      if (on_stack.count(t))
        li.back_edges.insert({n, t});
      else if (!done.count(t)) {
        on_stack.insert(t);
        stack.push_back({t, 0});
      }
    } else {
      on_stack.erase(n);
      done.insert(n);
      stack.pop_back();
    }
  }
  for (auto [tail, head] : li.back_edges) {
    std::set<int> body{head, tail};
    std::deque<int> q{tail};
    while (!q.empty()) {
      int x = q.front();
      q.pop_front();
      if (x == head)
        continue;
      for (int pr : g.pred(x))
        if (body.insert(pr).second)
          q.push_back(pr);
    }
    auto &wl = li.written_locals[head];
    auto &ws = li.written_storage[head];
    for (int x : body) {
      const ir::Stmt &s = p.stmts[x];
      if (!s.dst.empty())
        wl.insert(s.dst);
      if (s.kind == Kind::Store)
        ws.insert(s.var);
    }
  }
  return li;
}

std::vector<int> forward_order(const ICFG &g, int func, const LoopInfo &li) {
  const ir::Program &p = g.program();
  std::vector<int> post;
  std::set<int> seen;
  std::vector<std::pair<int, size_t>> stack{{p.funcs[func].entry, 0}};
  seen.insert(stack[0].first);
  while (!stack.empty()) {
    auto &[n, i] = stack.back();
    const auto &ss = g.succ(n);
    if (i < ss.size()) {
      int t = ss[i++];
      if (!li.is_back(n, t) && seen.insert(t).second)
        stack.push_back({t, 0});
    } else {
      post.push_back(n);
      stack.pop_back();
    }
  }
  std::reverse(post.begin(), post.end());
  return post;
}

std::string pre_symbol(const std::string &var) { return "pre:" + var; }

bool is_pre_symbol(const std::string &name, std::string *var) {
  if (name.rfind("pre:", 0) != 0)
    return false;
  if (var)
    *var = name.substr(4);
  return true;
}

T mu_merge(sym::Terms &tm, T b, T v1, T v2) { return tm.ite(b, v1, v2); }

std::string ValueSummary::dump(const sym::Terms &tm) const {
  std::ostringstream o;
  for (auto &[v, ps] : pairs)
    for (auto &sp : ps)
      o << "(" << v << " " << tm.str(sp.value) << " " << tm.str(sp.cond) << ")\n";
  return o.str();
}

namespace {

struct AState {
  T pi;
  std::map<std::string, T> locals, scalars;
};

class FuncSummary {
public:
  using Seen = std::map<std::string, std::set<std::pair<T, T>>>;
  FuncSummary(const ICFG &g, sym::Terms &tm, int func, ValueSummary &out, Seen &seen)
      : g_(g), p_(g.program()), tm_(tm), f_(p_.funcs[func]), out_(out), li_(find_loops(g, func)), seen_(seen) {}

  void run() {
    auto order = forward_order(g_, p_.stmts[f_.entry].func, li_);
    std::map<int, AState> outs;
    for (int n : order) {
      AState in = merge(n, outs);
      if (tm_.is_false(in.pi))
        continue;
      if (li_.is_head(n))
        havoc_loop(n, in);
      transfer(p_.stmts[n], in);
      outs[n] = std::move(in);
    }
  }

private:
  const ICFG &g_;
  const ir::Program &p_;
  sym::Terms &tm_;
  const ir::Function &f_;
  ValueSummary &out_;
  LoopInfo li_;
  Seen &seen_;

  T val(const AState &st, const Operand &o) {
    switch (o.kind) {
    case Operand::Kind::None: return tm_.bv(0);
    case Operand::Kind::Const: return tm_.bv(o.name);
    case Operand::Kind::Str: return tm_.var("str:" + o.name);
    case Operand::Kind::Local: {
      auto it = st.locals.find(o.name);
      return it == st.locals.end() ? tm_.bv(0) : it->second;
    }
    case Operand::Kind::Param: return tm_.var("arg:" + f_.name + ":" + o.name);
    case Operand::Kind::Env: return tm_.var("env:" + o.name);
    }
    return tm_.bv(0);
  }

  T edge_cond(int from, int to, const AState &st) {
    const ir::Stmt &s = p_.stmts[from];
    if (s.kind == Kind::Branch) {
      if (s.succ[0] == s.succ[1])
        return tm_.boolean(true);
      T c = tm_.as_bool(val(st, s.a));
      return s.succ[0] == to ? c : tm_.lnot(c);
    }
    if (s.kind == Kind::Require)
      return tm_.as_bool(val(st, s.a));
    return tm_.boolean(true);
  }

  AState merge(int n, const std::map<int, AState> &outs) {
    AState st;
    if (n == f_.entry) {
      st.pi = tm_.boolean(true);
      for (auto &v : p_.vars)
        if (!v.is_collection())
          st.scalars[v.name] = tm_.var(pre_symbol(v.name));
      return st;
    }
    std::vector<std::pair<T, const AState *>> in;
    for (int pr : g_.pred(n)) {
      if (li_.is_back(pr, n))
        continue;
      auto it = outs.find(pr);
      if (it == outs.end())
        continue;
      T guard = tm_.land(it->second.pi, edge_cond(pr, n, it->second));
      if (!tm_.is_false(guard))
        in.push_back({guard, &it->second});
    }
    std::vector<T> gs;
    for (auto &[gd, s] : in)
      gs.push_back(gd);
    st.pi = tm_.lor(gs);
    if (in.empty())
      return st;
    auto join = [&](auto member) {
      std::map<std::string, T> res;
      std::set<std::string> keys;
      for (auto &[gd, s] : in)
        for (auto &[k, v] : s->*member)
          keys.insert(k);
      for (auto &k : keys) {
        std::vector<std::pair<T, T>> vs;
        for (auto &[gd, s] : in)
          if (auto it = (s->*member).find(k); it != (s->*member).end())
            vs.push_back({gd, it->second});
        T v = vs.back().second;
        for (size_t i = vs.size() - 1; i-- > 0;)
          v = mu_merge(tm_, vs[i].first, vs[i].second, v);
        res[k] = v;
      }
      return res;
    };
    st.locals = join(&AState::locals);
    st.scalars = join(&AState::scalars);
    return st;
  }

  void add_pair(const std::string &var, T value, T cond, int line) {
    if (tm_.is_false(cond))
      return;
    if (seen_[var].insert({value, cond}).second)
      out_.pairs[var].push_back({value, cond, f_.name, line});
  }

  void havoc_loop(int head, AState &st) {
    const std::string tag = "#" + std::to_string(head);
    for (auto &l : li_.written_locals[head])
      st.locals[l] = tm_.var("loop:" + l + tag);
    for (auto &v : li_.written_storage[head]) {
      T x = tm_.var("loop:" + v + tag);
      if (st.scalars.count(v))
        st.scalars[v] = x;
      add_pair(v, x, st.pi, p_.stmts[head].line);
    }
  }

  void havoc_storage(const ir::Stmt &s, AState &st, bool record) {
    for (auto &v : p_.vars) {
      T x = tm_.var("h:" + std::to_string(s.id) + ":" + v.name);
      if (!v.is_collection())
        st.scalars[v.name] = x;
      if (record)
        add_pair(v.name, x, st.pi, s.line);
    }
  }

  void transfer(const ir::Stmt &s, AState &st) {
    auto def = [&](T v) {
      if (!s.dst.empty())
        st.locals[s.dst] = v;
    };
    switch (s.kind) {
    case Kind::Assign:
      def(val(st, s.a));
      break;
    case Kind::Unary:
      def(tm_.unop(s.op, val(st, s.a)));
      break;
    case Kind::Binary:
      def(tm_.binop(s.op, val(st, s.a), val(st, s.b)));
      break;
    case Kind::Load: {
      const ir::StateVar *v = p_.find_var(s.var);
      if (v && !v->is_collection())
        def(st.scalars.at(s.var));
      else
        def(tm_.var("cell:" + s.var + "#" + std::to_string(s.id)));
      break;
    }
    case Kind::Store: {
      T x = val(st, s.a);
      const ir::StateVar *v = p_.find_var(s.var);
      if (v && !v->is_collection())
        st.scalars[s.var] = x;
      add_pair(s.var, x, st.pi, s.line);
      break;
    }
    case Kind::ExtCall:
      def(tm_.var("h:" + std::to_string(s.id)));
      // a re-entrant callee may have changed anything this function reads later
      if (s.ext.kind == ir::ExtKind::Call || s.ext.kind == ir::ExtKind::CallValue ||
          s.ext.kind == ir::ExtKind::Method)
        havoc_storage(s, st, false);
      break;
    case Kind::DelegateCall:
      def(tm_.var("h:" + std::to_string(s.id)));
      havoc_storage(s, st, true);
      break;
    case Kind::Havoc:
      def(tm_.var("h:" + std::to_string(s.id)));
      break;
    default:
      break;
    }
  }
};

} // namespace

ValueSummary compute_summary(const ICFG &g, sym::Terms &tm) {
  ValueSummary vs;
  const ir::Program &p = g.program();
  FuncSummary::Seen seen;
  for (size_t f = 0; f < p.funcs.size(); ++f) {
    if (!p.funcs[f].is_public())
      continue;
    FuncSummary fs(g, tm, static_cast<int>(f), vs, seen);
    fs.run();
  }
  return vs;
}

} // namespace stinc
