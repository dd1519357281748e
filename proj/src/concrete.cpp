#include <stinc/concrete.hpp>

#include <stinc/error.hpp>

namespace stinc::concrete {

using ir::Kind;
using ir::Operand;

namespace {

template <class M> bool same_nonzero(const M &a, const M &b) {
  for (auto &[k, v] : a) {
    auto it = b.find(k);
    if ((it == b.end() ? u256(0) : it->second) != v)
      return false;
  }
  for (auto &[k, v] : b)
    if (!a.count(k) && v != 0)
      return false;
  return true;
}

struct Revert {};
struct OutOfSteps {};

u256 b2u(bool b) { return b ? 1 : 0; }

u256 binop(const std::string &op, const u256 &a, const u256 &b) {
  if (op == "+") return a + b;
  if (op == "-") return a - b;
  if (op == "*") return a * b;
  if (op == "/") return b == 0 ? u256(0) : a / b;
  if (op == "%") return b == 0 ? u256(0) : a % b;
  if (op == "&") return a & b;
  if (op == "|") return a | b;
  if (op == "^") return a ^ b;
  if (op == "<<") return b >= 256 ? u256(0) : u256(a << static_cast<unsigned>(b));
  if (op == ">>") return b >= 256 ? u256(0) : u256(a >> static_cast<unsigned>(b));
  if (op == "==") return b2u(a == b);
  if (op == "!=") return b2u(a != b);
  if (op == "<") return b2u(a < b);
  if (op == "<=") return b2u(a <= b);
  if (op == ">") return b2u(a > b);
  if (op == ">=") return b2u(a >= b);
  if (op == "&&") return b2u(a != 0 && b != 0);
  if (op == "||") return b2u(a != 0 || b != 0);
  throw Error("operator " + op);
}

u256 unop(const std::string &op, const u256 &a) {
  if (op == "!") return b2u(a == 0);
  if (op == "~") return ~a;
  if (op == "-") return u256(0) - a;
  if (op == "+") return a;
  throw Error("operator " + op);
}

class Machine {
public:
  Machine(const ICFG &g, Storage st, int limit) : p_(g.program()), st(std::move(st)), limit_(limit) {}

  Storage st;
  std::vector<Flow> flows;
  bool destroyed = false;

  void call(const Call &c, const u256 &origin) {
    origin_ = origin;
    exec(c);
  }

private:
  const ir::Program &p_;
  int limit_;
  int steps_ = 0;
  u256 origin_ = 1;

  struct Frame {
    const Call *c;
    std::map<std::string, u256> regs;
  };

  u256 val(const Frame &fr, const Operand &o) {
    switch (o.kind) {
    case Operand::Kind::None: return 0;
    case Operand::Kind::Const: return u256(o.name);
    case Operand::Kind::Str: return 0;
    case Operand::Kind::Local: {
      auto it = fr.regs.find(o.name);
      return it == fr.regs.end() ? u256(0) : it->second;
    }
    case Operand::Kind::Param: {
      auto it = fr.c->args.find(o.name);
      return it == fr.c->args.end() ? u256(0) : it->second;
    }
    case Operand::Kind::Env:
      if (o.name == "msg.sender") return fr.c->sender;
      if (o.name == "msg.value") return fr.c->value;
      if (o.name == "tx.origin") return origin_;
      if (o.name == "this") return kThis;
      if (o.name == "this.balance") return kBalance;
      if (o.name.rfind("block.", 0) == 0 || o.name == "now") return 1000;
      return 0;
    }
    return 0;
  }

  // nested call that may revert; returns the success flag
  u256 nested(const Call &c) {
    Storage snap = st;
    size_t nflows = flows.size();
    bool d = destroyed;
    try {
      exec(c);
      return 1;
    } catch (const Revert &) {
      st = std::move(snap);
      flows.resize(nflows);
      destroyed = d;
      return 0;
    }
  }

  void exec(const Call &c) {
    int f = p_.find_func(c.func);
    if (f < 0)
      throw Error("no function " + c.func);
    Frame fr{&c, {}};
    std::vector<bool> used(c.reentries.size(), false);
    int pc = p_.funcs[f].entry;
    while (pc >= 0) {
      if (++steps_ > limit_)
        throw OutOfSteps{};
      const ir::Stmt &s = p_.stmts[pc];
      int nx = s.succ.empty() ? -1 : s.succ[0];
      auto def = [&](u256 v) {
        if (!s.dst.empty())
          fr.regs[s.dst] = v;
      };
      auto keys = [&] {
        std::vector<u256> ks;
        for (auto &k : s.keys)
          ks.push_back(val(fr, k));
        return ks;
      };
      auto reenter = [&]() -> std::optional<u256> {
        for (size_t i = 0; i < c.reentries.size(); ++i)
          if (!used[i] && c.reentries[i].at == s.id) {
            used[i] = true;
            return nested(c.reentries[i].call);
          }
        return std::nullopt;
      };
      switch (s.kind) {
      case Kind::Assign: def(val(fr, s.a)); break;
      case Kind::Unary: def(unop(s.op, val(fr, s.a))); break;
      case Kind::Binary: def(binop(s.op, val(fr, s.a), val(fr, s.b))); break;
      case Kind::Load: def(st.get(s.var, keys())); break;
      case Kind::Store: st.set(s.var, keys(), val(fr, s.a)); break;
      case Kind::Branch: nx = val(fr, s.a) != 0 ? s.succ[0] : s.succ[1]; break;
      case Kind::Require:
        if (val(fr, s.a) == 0)
          throw Revert{};
        break;
      case Kind::ExtCall: {
        auto k = s.ext.kind;
        if (k == ir::ExtKind::CallValue || k == ir::ExtKind::Transfer || k == ir::ExtKind::Send)
          flows.push_back({s.id, val(fr, s.ext.dest), val(fr, s.ext.value)});
        auto r = reenter();
        def(k == ir::ExtKind::Method ? u256(0) : r.value_or(1));
        break;
      }
      case Kind::DelegateCall: def(reenter().value_or(1)); break;
      case Kind::SelfDestruct:
        flows.push_back({s.id, val(fr, s.a), kBalance});
        destroyed = true;
        nx = -1;
        break;
      case Kind::Havoc: def(s.note == "balance" ? u256(kBalance) : u256(0)); break;
      default: break;
      }
      pc = nx;
    }
  }
};

} // namespace

bool Storage::operator==(const Storage &o) const {
  if (!same_nonzero(scalars, o.scalars))
    return false;
  std::map<std::string, std::map<std::vector<u256>, u256>> e;
  for (auto &[k, m] : colls)
    if (!same_nonzero(m, o.colls.count(k) ? o.colls.at(k) : e[k]))
      return false;
  for (auto &[k, m] : o.colls)
    if (!colls.count(k) && !same_nonzero(m, e[k]))
      return false;
  return true;
}

u256 Storage::get(const std::string &var, const std::vector<u256> &keys) const {
  if (keys.empty()) {
    auto it = scalars.find(var);
    if (it != scalars.end())
      return it->second;
  }
  auto it = colls.find(var);
  if (it == colls.end())
    return 0;
  auto jt = it->second.find(keys);
  return jt == it->second.end() ? u256(0) : jt->second;
}

void Storage::set(const std::string &var, const std::vector<u256> &keys, u256 v) {
  if (keys.empty())
    scalars[var] = v;
  else
    colls[var][keys] = v;
}

RunResult run(const ICFG &g, Storage pre, const std::vector<Call> &txs, int step_limit) {
  Machine m(g, std::move(pre), step_limit);
  RunResult r;
  for (auto &c : txs) {
    Storage snap = m.st;
    size_t nflows = m.flows.size();
    bool d = m.destroyed;
    try {
      m.call(c, c.sender);
      r.reverted.push_back(false);
      r.tx_flows.emplace_back(m.flows.begin() + static_cast<long>(nflows), m.flows.end());
    } catch (const Revert &) {
      m.st = std::move(snap);
      m.flows.resize(nflows);
      m.destroyed = d;
      r.reverted.push_back(true);
      r.tx_flows.emplace_back();
    } catch (const OutOfSteps &) {
      throw Error("step limit in " + c.func);
    }
  }
  r.post = std::move(m.st);
  r.flows = std::move(m.flows);
  r.destroyed = m.destroyed;
  return r;
}

Storage construct(const ICFG &g, const std::map<std::string, u256> &args, u256 sender) {
  const ir::Program &p = g.program();
  int c = p.constructor();
  if (c < 0)
    return {};
  Call call{p.funcs[c].name, args, sender, 0, {}};
  auto r = run(g, {}, {call});
  return r.post;
}

} // namespace stinc::concrete
