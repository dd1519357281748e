#include <stinc/symexec.hpp>

#include <algorithm>

namespace stinc {

using ir::Kind;
using ir::Operand;
using sym::SatResult;
using sym::T;

Executor::Executor(const ICFG &g, sym::Terms &tm, sym::Solver &solver, ExecConfig cfg)
    : g_(g), p_(g.program()), tm_(tm), solver_(solver), cfg_(std::move(cfg)) {}

const LoopInfo &Executor::loops(int func) {
  auto it = loops_.find(func);
  if (it == loops_.end())
    it = loops_.emplace(func, find_loops(g_, func)).first;
  return it->second;
}

MachineState Executor::initial(int entry, int tx) {
  MachineState st;
  st.pc = entry;
  st.path = tm_.boolean(true);
  st.frames.push_back(Frame{p_.stmts[entry].func, tx, {}});
  for (auto &v : p_.vars) {
    if (v.is_collection())
      st.colls[v.name] = CollState{v.name, "st:" + v.name, {}, nullptr, nullptr};
    else
      st.scalars[v.name] = tm_.var(pre_symbol(v.name));
  }
  return st;
}

T Executor::val(MachineState &st, const Operand &o) {
  const Frame &fr = st.frames.back();
  switch (o.kind) {
  case Operand::Kind::None: return tm_.bv(0);
  case Operand::Kind::Const: return tm_.bv(o.name);
  case Operand::Kind::Str: return tm_.var("str:" + o.name);
  case Operand::Kind::Local: {
    auto it = fr.regs.find(o.name);
    return it == fr.regs.end() ? tm_.bv(0) : it->second;
  }
  case Operand::Kind::Param:
    return tm_.var("arg:" + p_.funcs[fr.func].name + ":" + o.name + "@" + std::to_string(fr.tx));
  case Operand::Kind::Env:
    if (o.name == "this")
      return tm_.var("env:this");
    return tm_.var("env:" + o.name + "@" + std::to_string(fr.tx));
  }
  return tm_.bv(0);
}

// pre:x becomes the value of x at the boundary, every other symbol a fresh one
std::pair<T, T> Executor::instantiate(const SummaryPair &sp, const std::map<std::string, T> &at) {
  std::map<T, T> ren;
  auto f = [&](T t) -> std::optional<T> {
    const sym::Node &n = tm_.node(t);
    if (n.op != sym::Op::Var)
      return std::nullopt;
    if (auto it = ren.find(t); it != ren.end())
      return it->second;
    std::string v;
    T r;
    if (is_pre_symbol(n.name, &v) && at.count(v))
      r = at.at(v);
    else
      r = tm_.fresh("inst:" + n.name, n.sort);
    ren[t] = r;
    return r;
  };
  T value = tm_.substitute(sp.value, f);
  T cond = tm_.substitute(sp.cond, f);
  return {value, cond};
}

T Executor::read(MachineState &st, const CollState &c, const std::vector<T> &keys) {
  T v;
  if (c.below) {
    auto key = std::make_pair(c.below.get(), keys);
    auto it = st.boundary_reads.find(key);
    if (it != st.boundary_reads.end()) {
      v = it->second;
    } else {
      T prev = read(st, *c.below, keys);
      v = tm_.fresh("bnd:" + c.var);
      std::vector<T> opts{tm_.eq(v, prev)};
      if (cfg_.summary)
        if (auto pit = cfg_.summary->pairs.find(c.var); pit != cfg_.summary->pairs.end())
          for (auto &sp : pit->second) {
            auto [x, cond] = instantiate(sp, *c.scalars_at);
            opts.push_back(tm_.land(tm_.eq(v, x), cond));
          }
      T a = tm_.lor(opts);
      st.path = tm_.land(st.path, a);
      st.assumptions.push_back(a);
      st.boundary_reads[key] = v;
    }
  } else {
    v = tm_.select(c.base, keys);
  }
  for (auto &[wk, wv] : c.writes) {
    std::vector<T> eqs;
    for (size_t i = 0; i < keys.size() && i < wk.size(); ++i)
      eqs.push_back(tm_.eq(keys[i], wk[i]));
    v = tm_.ite(tm_.land(eqs), wv, v);
  }
  return v;
}

T Executor::load(MachineState &st, const std::string &var, const std::vector<T> &keys) {
  if (auto it = st.scalars.find(var); it != st.scalars.end())
    return it->second;
  auto it = st.colls.find(var);
  if (it == st.colls.end())
    return tm_.bv(0);
  CollState c = it->second;
  return read(st, c, keys);
}

void Executor::havoc_all(MachineState &st, const std::string &why) {
  for (auto &[v, x] : st.scalars)
    x = tm_.fresh(why + ":" + v);
  for (auto &[v, c] : st.colls)
    c = CollState{v, tm_.node(tm_.fresh(why + ":" + v)).name, {}, nullptr, nullptr};
}

void Executor::apply_boundary(MachineState &st, const std::set<std::string> *only) {
  auto at = std::make_shared<const std::map<std::string, T>>(st.scalars);
  bool summary = cfg_.mode == RefineMode::Summary && cfg_.summary;
  for (auto &[v, x] : st.scalars) {
    if (only && !only->count(v))
      continue;
    T r = tm_.fresh("bnd:" + v);
    if (summary) {
      std::vector<T> opts{tm_.eq(r, x)};
      if (auto pit = cfg_.summary->pairs.find(v); pit != cfg_.summary->pairs.end())
        for (auto &sp : pit->second) {
          auto [val, cond] = instantiate(sp, *at);
          opts.push_back(tm_.land(tm_.eq(r, val), cond));
        }
      T a = tm_.lor(opts);
      st.path = tm_.land(st.path, a);
      st.assumptions.push_back(a);
    }
    x = r;
  }
  for (auto &[v, c] : st.colls) {
    if (only && !only->count(v))
      continue;
    if (summary)
      c = CollState{v, "", {}, std::make_shared<const CollState>(c), at};
    else
      c = CollState{v, tm_.node(tm_.fresh("bnd:" + v)).name, {}, nullptr, nullptr};
  }
}

std::vector<MachineState> Executor::exec(const MachineState &in, bool at_anchor) {
  MachineState st = in;
  const ir::Stmt &s = p_.stmts[st.pc];
  st.next = s.succ.empty() ? -1 : s.succ[0];
  auto def = [&](T v) {
    if (!s.dst.empty())
      st.frames.back().regs[s.dst] = v;
  };
  auto keys = [&]() {
    std::vector<T> ks;
    for (auto &k : s.keys)
      ks.push_back(val(st, k));
    return ks;
  };
  switch (s.kind) {
  case Kind::Assign:
    def(val(st, s.a));
    break;
  case Kind::Unary:
    def(tm_.unop(s.op, val(st, s.a)));
    break;
  case Kind::Binary: {
    T a = val(st, s.a), b = val(st, s.b);
    def(tm_.binop(s.op, a, b));
    break;
  }
  case Kind::Load: {
    auto ks = keys();
    def(load(st, s.var, ks));
    break;
  }
  case Kind::Store: {
    T x = val(st, s.a);
    if (auto it = st.scalars.find(s.var); it != st.scalars.end())
      it->second = x;
    else if (auto ct = st.colls.find(s.var); ct != st.colls.end())
      ct->second.writes.push_back({keys(), x});
    break;
  }
  case Kind::Branch: {
    if (s.succ[0] == s.succ[1])
      break;
    T c = tm_.as_bool(val(st, s.a));
    std::vector<MachineState> out;
    MachineState t = st, f = st;
    t.path = tm_.land(st.path, c);
    t.next = s.succ[0];
    f.path = tm_.land(st.path, tm_.lnot(c));
    f.next = s.succ[1];
    if (!tm_.is_false(t.path))
      out.push_back(std::move(t));
    if (!tm_.is_false(f.path))
      out.push_back(std::move(f));
    return out;
  }
  case Kind::Require:
    st.path = tm_.land(st.path, tm_.as_bool(val(st, s.a)));
    if (tm_.is_false(st.path))
      return {};
    break;
  case Kind::ExtCall:
    def(tm_.fresh("ret"));
    break;
  case Kind::DelegateCall:
    def(tm_.fresh("ret"));
    if (!at_anchor)
      havoc_all(st, "dcall");
    break;
  case Kind::SelfDestruct:
    st.next = -1;
    break;
  case Kind::Havoc:
    def(tm_.fresh("h"));
    break;
  default:
    break;
  }
  return {std::move(st)};
}

void Executor::enter(MachineState &st, int t) {
  st.pc = t;
  int f = p_.stmts[t].func;
  const LoopInfo &li = loops(f);
  if (!li.is_head(t))
    return;
  for (auto &l : li.written_locals.at(t))
    st.frames.back().regs[l] = tm_.fresh("loop:" + l);
  for (auto &v : li.written_storage.at(t)) {
    if (auto it = st.scalars.find(v); it != st.scalars.end())
      it->second = tm_.fresh("loop:" + v);
    else if (auto ct = st.colls.find(v); ct != st.colls.end())
      ct->second = CollState{v, tm_.node(tm_.fresh("loop:" + v)).name, {}, nullptr, nullptr};
  }
}

std::vector<MachineState> Executor::interpret_step(const MachineState &st) {
  std::vector<MachineState> out;
  for (auto &o : exec(st)) {
    if (o.next < 0 || loops(p_.stmts[o.pc].func).is_back(o.pc, o.next))
      continue;
    enter(o, o.next);
    out.push_back(std::move(o));
  }
  return out;
}

void Executor::jump(MachineState &st, int target) {
  const ir::Stmt &src = p_.stmts[st.pc];
  bool to_entry = p_.stmts[target].kind == Kind::Entry;
  if (to_entry && (src.kind == Kind::ExtCall || src.kind == Kind::DelegateCall)) {
    apply_boundary(st);
    st.frames.push_back(Frame{p_.stmts[target].func, next_tx_++, {}});
  } else if (!to_entry) {
    if (st.frames.size() > 1)
      st.frames.pop_back();
  } else {
    st.frames.back() = Frame{p_.stmts[target].func, next_tx_++, {}};
  }
  enter(st, target);
}

void Executor::observe(MachineState &st) {
  const ir::Stmt &s = p_.stmts[st.pc];
  st.observed.clear();
  if (s.kind == Kind::Require || s.kind == Kind::Branch)
    st.observed.push_back(tm_.as_bool(val(st, s.a)));
  else if (s.kind == Kind::ExtCall || s.kind == Kind::DelegateCall || s.kind == Kind::SelfDestruct) {
    st.observed.push_back(val(st, s.ext.value));
    st.observed.push_back(s.kind == Kind::SelfDestruct ? val(st, s.a) : val(st, s.ext.dest));
  }
}

Executor::Outcome Executor::explore(MachineState init, const std::vector<int> &w, bool stop_at_sat) {
  Outcome out;
  if (w.empty())
    return out;
  std::vector<bool> jumps(w.size(), false);
  for (size_t i = 1; i < w.size(); ++i)
    jumps[i] = !(p_.stmts[w[i - 1]].func == p_.stmts[w[i]].func && g_.reach(w[i - 1], w[i]));

  std::vector<MachineState> stack;
  bool done = false;
  // true if the state should keep going
  auto arrive = [&](MachineState &o) {
    if (o.wi == w.size()) {
      observe(o);
      SatResult r = solver_.check(tm_, o.path);
      if (r == SatResult::Unsat)
        return;
      if (r == SatResult::Sat)
        out.any_sat = true;
      else
        out.complete = false;
      out.goals.push_back(std::move(o));
      if (out.any_sat && stop_at_sat)
        done = true;
      return;
    }
    if (o.pc == w[o.wi - 1] && solver_.check(tm_, o.path) == SatResult::Unsat)
      return;
    stack.push_back(std::move(o));
  };

  init.pc = w[0];
  init.wi = 1;
  init.visits[init.pc]++;
  arrive(init);
  int steps = 0;
  while (!stack.empty() && !done) {
    if (++steps > cfg_.max_steps || solver_.expired() ||
        (cfg_.deadline && std::chrono::steady_clock::now() > *cfg_.deadline)) {
      out.complete = false;
      break;
    }
    MachineState st = std::move(stack.back());
    stack.pop_back();
    bool at_wp = st.pc == w[st.wi - 1];
    bool jumping = at_wp && jumps[st.wi];
    for (auto &o : exec(st, jumping)) {
      if (jumping) {
        jump(o, w[o.wi]);
        o.wi++;
      } else {
        if (o.next < 0 || loops(p_.stmts[o.pc].func).is_back(o.pc, o.next))
          continue;
        if (!g_.reach(o.next, w[o.wi]))
          continue;
        enter(o, o.next);
        if (o.pc == w[o.wi])
          o.wi++;
      }
      if (++o.visits[o.pc] > 3) {
        out.complete = false;
        continue;
      }
      arrive(o);
      if (done)
        break;
    }
  }
  return out;
}

namespace {

RefineResult verdict_of(const Executor::Outcome &o, const char *what) {
  RefineResult r;
  if (o.any_sat) {
    r.verdict = Verdict::Confirmed;
    r.sat = SatResult::Sat;
    r.reason = std::string(what) + " feasible";
  } else if (o.complete && o.goals.empty()) {
    r.verdict = Verdict::Refuted;
    r.sat = SatResult::Unsat;
    r.reason = std::string(what) + " infeasible";
  } else {
    r.reason = std::string(what) + " undecided";
  }
  return r;
}

int func_of(const ir::Program &p, int s) { return p.stmts[s].func; }

} // namespace

RefineResult refine(const Finding &f, const ICFG &g, sym::Terms &tm, sym::Solver &solver, const ExecConfig &cfg) {
  if (f.kind == FindingKind::UncondSuicide) {
    RefineResult r;
    r.verdict = Verdict::Confirmed;
    r.sat = SatResult::Sat;
    r.reason = "no guard";
    return r;
  }
  if (f.kind == FindingKind::TodTransfer || f.kind == FindingKind::TodAmount || f.kind == FindingKind::TodReceiver)
    return refine_tod(f, g, tm, solver, cfg);
  const auto &w = f.cex.waypoints;
  if (w.empty())
    return {};
  Executor ex(g, tm, solver, cfg);
  if (f.kind != FindingKind::Reentrancy || !f.pair)
    return verdict_of(ex.explore(ex.initial(w[0], 0), w, true), "path");

  // the re-entered call has to do something at or after the racing access
  const ir::Program &p = g.program();
  int sa = f.pair->s2;
  auto pos = std::find(w.begin(), w.end(), sa);
  std::vector<int> effects;
  for (int t : p.funcs[func_of(p, sa)].stmts) {
    Kind k = p.stmts[t].kind;
    if ((k == Kind::Store || k == Kind::ExtCall || k == Kind::DelegateCall || k == Kind::SelfDestruct) &&
        g.reach(sa, t))
      effects.push_back(t);
  }
  if (pos == w.end() || effects.empty()) {
    RefineResult r;
    r.verdict = Verdict::Refuted;
    r.sat = SatResult::Unsat;
    r.reason = "re-entered call has no effect";
    return r;
  }
  bool undecided = false;
  for (int t : effects) {
    std::vector<int> wt(w.begin(), pos + 1);
    if (t != sa)
      wt.push_back(t);
    wt.insert(wt.end(), pos + 1, w.end());
    auto o = ex.explore(ex.initial(wt[0], 0), wt, true);
    if (o.any_sat)
      return verdict_of(o, "path");
    if (!o.complete || !o.goals.empty())
      undecided = true;
  }
  RefineResult r;
  if (undecided) {
    r.reason = "path undecided";
  } else {
    r.verdict = Verdict::Refuted;
    r.sat = SatResult::Unsat;
    r.reason = "path infeasible";
  }
  return r;
}

// Same victim transaction from the same pre-state, once as is and once after
// another transaction may have changed the variable; the hazard is real if
// the observed operand can differ.
RefineResult refine_tod(const Finding &f, const ICFG &g, sym::Terms &tm, sym::Solver &solver,
                        const ExecConfig &cfg) {
  const ir::Program &p = g.program();
  const auto &w = f.cex.waypoints;
  if (!f.pair || w.empty())
    return {};
  int ventry = p.funcs[func_of(p, f.anchor)].entry;
  size_t k = w.size();
  for (size_t i = w.size(); i-- > 0;)
    if (w[i] == ventry) {
      k = i;
      break;
    }
  if (k == w.size())
    return {};
  std::vector<int> seg(w.begin() + static_cast<long>(k), w.end());
  if (f.kind == FindingKind::TodTransfer) {
    auto it = std::find(seg.begin(), seg.end(), f.pair->s1);
    if (it != seg.end())
      seg.erase(it + 1, seg.end());
  }
  const int tx = 7;
  Executor ex(g, tm, solver, cfg);
  auto a0 = ex.initial(ventry, tx);
  auto oa = ex.explore(a0, seg, false);
  auto b0 = ex.initial(ventry, tx);
  std::set<std::string> only{f.pair->var};
  ex.apply_boundary(b0, &only);
  auto ob = ex.explore(b0, seg, false);

  bool undecided = !oa.complete || !ob.complete;
  size_t obs_index = f.kind == FindingKind::TodReceiver ? 1 : 0;
  for (auto &a : oa.goals)
    for (auto &b : ob.goals) {
      if (a.observed.size() <= obs_index || b.observed.size() <= obs_index)
        continue;
      T diff = tm.ne(a.observed[obs_index], b.observed[obs_index]);
      SatResult r = solver.check(tm, tm.land({a.path, b.path, diff}));
      if (r == SatResult::Sat) {
        RefineResult rr;
        rr.verdict = Verdict::Confirmed;
        rr.sat = r;
        rr.reason = "outcome depends on order";
        return rr;
      }
      if (r == SatResult::Unknown)
        undecided = true;
    }
  RefineResult rr;
  if (undecided) {
    rr.reason = "order dependence undecided";
  } else {
    rr.verdict = Verdict::Refuted;
    rr.sat = SatResult::Unsat;
    rr.reason = "outcome independent of order";
  }
  return rr;
}

} // namespace stinc
