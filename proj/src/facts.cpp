#include <stinc/facts.hpp>

#include <functional>

namespace stinc {

using ir::Kind;
using ir::Operand;

const char *fact_rules() {
  return R"(
reach(S, S) :- node(S).
reach(S, T) :- reach(S, U), succ(U, T).
depend(S, V) :- load(S, V).
depend(S, V) :- uses(S, X), defs(D, X), reach(D, S), depend(D, V).
)";
}

bool FactBase::writes_var(int s, const std::string &v) const {
  auto it = writes.find(s);
  return it != writes.end() && it->second.count(v);
}

bool FactBase::depends_on(int s, const std::string &v) const {
  auto it = depends.find(s);
  return it != depends.end() && it->second.count(v);
}

bool FactBase::accesses_var(int s, const std::string &v) const { return writes_var(s, v) || depends_on(s, v); }

std::set<std::string> FactBase::operand_deps(int s, const Operand &o) const {
  std::set<std::string> out;
  if (o.kind != Operand::Kind::Local)
    return out;
  const ir::Stmt &st = prog->stmts[s];
  auto it = local_defs.find(prog->funcs[st.func].name + ":" + o.name);
  if (it == local_defs.end())
    return out;
  for (int d : it->second) {
    if (!g->reach(d, s) || d == s)
      continue;
    if (auto dep = depends.find(d); dep != depends.end())
      out.insert(dep->second.begin(), dep->second.end());
  }
  return out;
}

std::vector<int> FactBase::guards(int s) const {
  std::vector<int> out;
  const ir::Function &f = prog->funcs[prog->stmts[s].func];
  for (int r : f.stmts) {
    if (r == s)
      continue;
    const ir::Stmt &st = prog->stmts[r];
    if (st.kind == Kind::Require && g->dominates(r, s)) {
      out.push_back(r);
    } else if (st.kind == Kind::Branch && st.succ[0] != st.succ[1]) {
      for (int arm : st.succ)
        if (g->pred(arm).size() == 1 && g->dominates(arm, s)) {
          out.push_back(r);
          break;
        }
    }
  }
  return out;
}

namespace {

std::string local_key(const ir::Program &p, const ir::Stmt &s, const std::string &name) {
  return p.funcs[s.func].name + ":" + name;
}

class OwnerAnalysis {
public:
  OwnerAnalysis(const ir::Program &p, const ICFG &g, const std::map<std::string, std::vector<int>> &defs)
      : p_(p), g_(g), defs_(defs) {}

  std::set<std::string> closure() {
    std::set<std::string> O;
    int ctor = p_.constructor();
    if (ctor < 0)
      return O;
    for (int id : p_.funcs[ctor].stmts)
      if (p_.stmts[id].kind == Kind::Store)
        O.insert(p_.stmts[id].var);
    // drop vars that someone can write without an owner check
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = O.begin(); it != O.end();) {
        if (!all_writes_guarded(*it, O)) {
          it = O.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    // admit vars only owners can write
    for (bool changed = true; changed;) {
      changed = false;
      for (auto &v : p_.vars) {
        if (O.count(v.name) || !has_public_write(v.name))
          continue;
        if (all_writes_guarded(v.name, O)) {
          O.insert(v.name);
          changed = true;
        }
      }
    }
    return O;
  }

  std::set<int> owner_stmts(const std::set<std::string> &O) {
    std::set<int> out;
    for (auto &f : p_.funcs) {
      if (f.kind == ir::Function::Kind::Constructor)
        continue;
      auto gs = guard_points(f, O);
      for (int s : f.stmts)
        for (auto [gp, strict] : gs)
          if (g_.dominates(gp, s) && (!strict || gp != s)) {
            out.insert(s);
            break;
          }
    }
    return out;
  }

private:
  const ir::Program &p_;
  const ICFG &g_;
  const std::map<std::string, std::vector<int>> &defs_;

  std::vector<int> defs_of(const ir::Stmt &at, const Operand &o) const {
    if (o.kind != Operand::Kind::Local)
      return {};
    auto it = defs_.find(local_key(p_, at, o.name));
    return it == defs_.end() ? std::vector<int>{} : it->second;
  }

  template <class Pred> bool all_defs(const ir::Stmt &at, const Operand &o, Pred pred, int depth) const {
    if (depth > 8)
      return false;
    auto ds = defs_of(at, o);
    if (ds.empty())
      return false;
    for (int d : ds)
      if (!pred(p_.stmts[d], depth + 1))
        return false;
    return true;
  }

  bool is_sender(const ir::Stmt &at, const Operand &o, int depth = 0) const {
    if (o.kind == Operand::Kind::Env && (o.name == "msg.sender" || o.name == "tx.origin"))
      return true;
    return all_defs(
        at, o,
        [&](const ir::Stmt &d, int dep) { return d.kind == Kind::Assign && is_sender(d, d.a, dep); }, depth);
  }

  bool is_owner_value(const ir::Stmt &at, const Operand &o, const std::set<std::string> &O, int depth = 0) const {
    return all_defs(
        at, o,
        [&](const ir::Stmt &d, int dep) {
          if (d.kind == Kind::Load)
            return d.keys.empty() && O.count(d.var) > 0;
          return d.kind == Kind::Assign && is_owner_value(d, d.a, O, dep);
        },
        depth);
  }

  bool owner_cond(const ir::Stmt &at, const Operand &o, const std::set<std::string> &O, int depth = 0) const {
    return all_defs(
        at, o,
        [&](const ir::Stmt &d, int dep) {
          if (d.kind == Kind::Assign)
            return owner_cond(d, d.a, O, dep);
          if (d.kind != Kind::Binary)
            return false;
          if (d.op == "&&")
            return owner_cond(d, d.a, O, dep) || owner_cond(d, d.b, O, dep);
          if (d.op == "==")
            return (is_sender(d, d.a) && is_owner_value(d, d.b, O)) ||
                   (is_sender(d, d.b) && is_owner_value(d, d.a, O));
          return false;
        },
        depth);
  }

  // (node, strict): statements dominated by node are owner-only
  std::vector<std::pair<int, bool>> guard_points(const ir::Function &f, const std::set<std::string> &O) const {
    std::vector<std::pair<int, bool>> out;
    if (O.empty())
      return out;
    for (int id : f.stmts) {
      const ir::Stmt &s = p_.stmts[id];
      if (s.kind == Kind::Require && owner_cond(s, s.a, O)) {
        out.push_back({id, true});
      } else if (s.kind == Kind::Branch && s.succ[0] != s.succ[1] && owner_cond(s, s.a, O)) {
        int t = s.succ[0];
        if (g_.pred(t).size() == 1)
          out.push_back({t, false});
      }
    }
    return out;
  }

  bool has_public_write(const std::string &v) const {
    for (auto &f : p_.funcs) {
      if (f.kind == ir::Function::Kind::Constructor)
        continue;
      for (int id : f.stmts)
        if (p_.stmts[id].kind == Kind::Store && p_.stmts[id].var == v)
          return true;
    }
    return false;
  }

  bool all_writes_guarded(const std::string &v, const std::set<std::string> &O) const {
    for (auto &f : p_.funcs) {
      if (f.kind == ir::Function::Kind::Constructor)
        continue;
      auto gs = guard_points(f, O);
      for (int id : f.stmts) {
        const ir::Stmt &s = p_.stmts[id];
        if (s.kind != Kind::Store || s.var != v)
          continue;
        bool guarded = false;
        for (auto [gp, strict] : gs)
          if (g_.dominates(gp, id) && (!strict || gp != id))
            guarded = true;
        if (!guarded)
          return false;
      }
    }
    return true;
  }
};

void compute_taint(FactBase &fb) {
  const ir::Program &p = *fb.prog;
  std::set<std::string> tl;  // tainted locals, "func:name"
  auto tainted = [&](const ir::Stmt &s, const Operand &o) {
    switch (o.kind) {
    case Operand::Kind::Param:
      return true;  // every entry point and the constructor take caller data
    case Operand::Kind::Env:
      return o.name == "msg.sender" || o.name == "tx.origin";
    case Operand::Kind::Local:
      return tl.count(local_key(p, s, o.name)) > 0;
    default:
      return false;
    }
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (auto &s : p.stmts) {
      bool t = false;
      switch (s.kind) {
      case Kind::Assign:
      case Kind::Unary:
      case Kind::Binary:
      case Kind::Havoc:
        for (auto &o : ir::operands(s))
          t = t || tainted(s, o);
        break;
      case Kind::Load:
        t = fb.tainted_vars.count(s.var) > 0;
        break;
      case Kind::ExtCall:
      case Kind::DelegateCall:
        t = tainted(s, s.ext.dest);
        break;
      case Kind::Store:
        if (tainted(s, s.a) && !fb.is_owner(s.id) && fb.tainted_vars.insert(s.var).second)
          changed = true;
        break;
      default:
        break;
      }
      if (t && !s.dst.empty() && tl.insert(local_key(p, s, s.dst)).second)
        changed = true;
    }
  }
  for (auto &s : p.stmts) {
    if (s.kind == Kind::ExtCall) {
      bool capable = s.ext.kind == ir::ExtKind::Call || s.ext.kind == ir::ExtKind::CallValue ||
                     s.ext.kind == ir::ExtKind::Method;
      if (capable && tainted(s, s.ext.dest))
        fb.tainted_calls.insert(s.id);
    } else if (s.kind == Kind::DelegateCall) {
      bool t = tainted(s, s.ext.dest);
      for (auto &a : s.ext.args)
        t = t || tainted(s, a);
      if (t)
        fb.tainted_calls.insert(s.id);
    }
  }
}

} // namespace

FactBase derive_facts(const ICFG &g) {
  FactBase fb;
  const ir::Program &p = g.program();
  fb.prog = &p;
  fb.g = &g;
  auto S = [&](int id) { return fb.stmt_sym(id); };
  auto V = [&](const std::string &v) { return fb.var_sym(v); };
  auto X = [&](const ir::Stmt &s, const std::string &n) { return fb.in.intern("x:" + local_key(p, s, n)); };
  auto F = [&](const std::string &f) { return fb.in.intern("f:" + f); };
  datalog::Database &db = fb.db;

  for (auto &v : p.vars)
    db.add("storage", {V(v.name)});
  for (auto &f : p.funcs) {
    db.add("entry", {S(f.entry), F(f.name)});
    db.add("exit", {S(f.exit), F(f.name)});
    if (f.is_public())
      db.add("public", {F(f.name)});
  }
  for (auto &s : p.stmts) {
    db.add("node", {S(s.id)});
    for (int t : g.succ(s.id))
      db.add("succ", {S(s.id), S(t)});
    for (auto &o : ir::operands(s))
      if (o.is_var())
        db.add("uses", {S(s.id), X(s, o.kind == Operand::Kind::Param ? "%" + o.name : o.name)});
    if (!s.dst.empty()) {
      db.add("defs", {S(s.id), X(s, s.dst)});
      fb.local_defs[local_key(p, s, s.dst)].push_back(s.id);
    }
    switch (s.kind) {
    case Kind::Load:
      db.add("load", {S(s.id), V(s.var)});
      fb.reads[s.id].insert(s.var);
      break;
    case Kind::Store:
      db.add("write", {S(s.id), V(s.var)});
      fb.writes[s.id].insert(s.var);
      break;
    case Kind::ExtCall:
    case Kind::DelegateCall: {
      std::string cv = "0";
      const Operand &val = s.ext.value;
      if (s.kind == Kind::ExtCall && !val.is_none())
        cv = val.kind == Operand::Kind::Const ? val.name : "sym";
      fb.cv[s.id] = cv;
      db.add("extcall", {S(s.id), fb.in.intern(cv)});
      break;
    }
    case Kind::SelfDestruct:
      db.add("selfdestruct", {S(s.id)});
      break;
    default:
      break;
    }
  }

  auto rules = datalog::parse_rules(fact_rules(), fb.in);
  db = datalog::saturate(rules, std::move(db));

  for (auto &t : db.tuples("depend")) {
    int s = std::stoi(fb.in.name(t[0]).substr(1));
    fb.depends[s].insert(fb.in.name(t[1]).substr(2));
  }

  OwnerAnalysis oa(p, g, fb.local_defs);
  fb.owner_vars = oa.closure();
  fb.owner = oa.owner_stmts(fb.owner_vars);
  for (int s : fb.owner)
    db.add("owner", {S(s)});

  compute_taint(fb);
  for (int s : fb.tainted_calls)
    db.add("tainted", {S(s)});
  return fb;
}

std::map<std::string, std::string> dump_facts(const FactBase &fb) {
  std::map<std::string, std::string> out;
  for (auto &rel : fb.db.relations())
    out[rel] = datalog::dump_relation(fb.db, rel, fb.in);
  return out;
}

} // namespace stinc
