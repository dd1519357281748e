#include "oracles.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace oracle {

using namespace stinc;
using concrete::Call;
using concrete::Flow;
using concrete::RunResult;
using concrete::Storage;
using concrete::u256;

namespace {

const u256 kDeployer = 3;
const std::vector<u256> kSenders{1, 2};

// storage vars some public function writes
std::vector<const ir::StateVar *> mutable_vars(const ir::Program &p) {
  std::set<std::string> written;
  for (auto &s : p.stmts)
    if (s.kind == ir::Kind::Store && p.funcs[s.func].is_public())
      written.insert(s.var);
  std::vector<const ir::StateVar *> out;
  for (auto &v : p.vars)
    if (written.count(v.name))
      out.push_back(&v);
  return out;
}

std::vector<u256> domain(const ir::StateVar &v) {
  if (v.value_type == "bool")
    return {0, 1};
  return {0, 1, 2};
}

// key tuples tried for collections: the two senders and 0
std::vector<std::vector<u256>> cell_keys(const ir::StateVar &v) {
  std::vector<std::vector<u256>> ks{{}};
  for (int i = 0; i < v.key_count; ++i) {
    std::vector<std::vector<u256>> next;
    for (auto &k : ks)
      for (u256 x : {u256(0), u256(1), u256(2)}) {
        auto k2 = k;
        k2.push_back(x);
        next.push_back(k2);
      }
    ks = next;
  }
  return ks;
}

using FlowKey = std::tuple<int, u256, u256>;

std::vector<FlowKey> norm(const std::vector<Flow> &fs, bool skip_destruct, const ir::Program &p) {
  std::vector<FlowKey> out;
  for (auto &f : fs)
    if (!skip_destruct || p.stmts[f.stmt].kind != ir::Kind::SelfDestruct)
      out.emplace_back(f.stmt, f.dest, f.amount);
  std::sort(out.begin(), out.end());
  return out;
}

bool same_outcome(const RunResult &a, const RunResult &b, const ir::Program &p) {
  return a.post == b.post && a.destroyed == b.destroyed && norm(a.flows, false, p) == norm(b.flows, false, p);
}

bool reenterable(const ir::Stmt &s) {
  if (s.kind == ir::Kind::DelegateCall)
    return true;
  if (s.kind != ir::Kind::ExtCall)
    return false;
  // transfer/send forward too little gas to call back
  return s.ext.kind == ir::ExtKind::Call || s.ext.kind == ir::ExtKind::CallValue ||
         s.ext.kind == ir::ExtKind::Method;
}

} // namespace

std::vector<Storage> prestates(const ICFG &g, const OracleLimits &lim) {
  const ir::Program &p = g.program();
  Storage base = concrete::construct(g, {}, kDeployer);
  // (var, keys, domain) slots
  struct Slot {
    std::string var;
    std::vector<u256> keys;
    std::vector<u256> dom;
  };
  std::vector<Slot> slots;
  for (auto *v : mutable_vars(p))
    for (auto &k : cell_keys(*v))
      slots.push_back({v->name, k, domain(*v)});
  double total = 1;
  for (auto &s : slots)
    total *= static_cast<double>(s.dom.size());
  std::vector<Storage> out;
  auto build = [&](const std::vector<size_t> &pick) {
    Storage st = base;
    for (size_t i = 0; i < slots.size(); ++i)
      st.set(slots[i].var, slots[i].keys, slots[i].dom[pick[i]]);
    return st;
  };
  if (total <= lim.max_prestates) {
    std::vector<size_t> pick(slots.size(), 0);
    for (;;) {
      out.push_back(build(pick));
      size_t i = 0;
      for (; i < slots.size(); ++i) {
        if (++pick[i] < slots[i].dom.size())
          break;
        pick[i] = 0;
      }
      if (i == slots.size())
        break;
    }
    return out;
  }
  std::mt19937 rng(lim.seed);
  out.push_back(build(std::vector<size_t>(slots.size(), 0)));
  while (static_cast<int>(out.size()) < lim.max_prestates) {
    std::vector<size_t> pick;
    for (auto &s : slots)
      pick.push_back(std::uniform_int_distribution<size_t>(0, s.dom.size() - 1)(rng));
    out.push_back(build(pick));
  }
  return out;
}

std::vector<Call> calls_of(const ir::Program &p, int func) {
  const ir::Function &f = p.funcs[func];
  std::vector<std::map<std::string, u256>> argsets{{}};
  for (auto &name : f.params) {
    std::vector<std::map<std::string, u256>> next;
    for (auto &a : argsets)
      for (u256 x : {u256(0), u256(1), u256(2)}) {
        auto b = a;
        b[name] = x;
        next.push_back(b);
      }
    argsets = next;
  }
  std::vector<u256> values{0};
  if (f.payable)
    values.push_back(1);
  std::vector<Call> out;
  for (auto &a : argsets)
    for (u256 s : kSenders)
      for (u256 v : values)
        out.push_back(Call{f.name, a, s, v, {}});
  return out;
}

std::vector<Witness> interleaving_witnesses(const ICFG &g, const OracleLimits &lim) {
  const ir::Program &p = g.program();
  std::vector<int> funcs;
  for (size_t f = 0; f < p.funcs.size(); ++f)
    if (p.funcs[f].is_public())
      funcs.push_back(static_cast<int>(f));
  std::map<int, std::vector<Call>> calls;
  for (int f : funcs)
    calls[f] = calls_of(p, f);

  std::set<std::tuple<std::string, int, std::string>> seen;
  std::vector<Witness> out;
  auto add = [&](Witness w) {
    if (seen.insert({w.kind, w.anchor_line, w.attacker}).second)
      out.push_back(std::move(w));
  };

  for (const Storage &pre : prestates(g, lim)) {
    std::map<std::pair<int, size_t>, RunResult> alone;
    auto run_alone = [&](int f, size_t i) -> const RunResult & {
      auto key = std::make_pair(f, i);
      auto it = alone.find(key);
      if (it == alone.end())
        it = alone.emplace(key, concrete::run(g, pre, {calls[f][i]})).first;
      return it->second;
    };
    RunResult nothing = concrete::run(g, pre, {});
    for (int f : funcs)
      for (size_t i = 0; i < calls[f].size(); ++i) {
        const Call &cf = calls[f][i];
        const RunResult &rf = run_alone(f, i);
        std::vector<int> anchors;
        for (int s : p.funcs[f].stmts)
          if (reenterable(p.stmts[s]))
            anchors.push_back(s);
        for (int h : funcs)
          for (size_t j = 0; j < calls[h].size(); ++j) {
            const Call &ch = calls[h][j];
            RunResult fh = concrete::run(g, pre, {cf, ch});
            RunResult hf = concrete::run(g, pre, {ch, cf});

            // order dependence of f's ether flows
            auto a = norm(fh.tx_flows[0], true, p), b = norm(hf.tx_flows[1], true, p);
            if (a != b) {
              std::vector<FlowKey> diff;
              std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
              for (auto &d : diff)
                add({"tod", p.stmts[std::get<0>(d)].line, "",
                     cf.func + " vs " + ch.func + " from sender " + cf.sender.str()});
            }

            const RunResult &rh = run_alone(h, j);
            for (int e : anchors) {
              Call nested = cf;
              nested.reentries.push_back({e, ch});
              RunResult nl = concrete::run(g, pre, {nested});
              if (same_outcome(nl, nothing, p) || same_outcome(nl, rf, p) || same_outcome(nl, rh, p) ||
                  same_outcome(nl, fh, p) || same_outcome(nl, hf, p))
                continue;
              add({"reentrancy", p.stmts[e].line, p.funcs[h].name,
                   cf.func + " re-entered by " + ch.func + " at line " + std::to_string(p.stmts[e].line)});
            }
          }
      }
  }
  return out;
}

} // namespace oracle
