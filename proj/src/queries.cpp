#include <stinc/error.hpp>
#include <stinc/queries.hpp>

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace stinc {

using ir::Kind;

const char *kind_name(FindingKind k) {
  switch (k) {
  case FindingKind::Reentrancy: return "reentrancy";
  case FindingKind::TodTransfer: return "tod_transfer";
  case FindingKind::TodAmount: return "tod_amount";
  case FindingKind::TodReceiver: return "tod_receiver";
  case FindingKind::CondSuicide: return "cond_suicide";
  case FindingKind::UncondSuicide: return "uncond_suicide";
  case FindingKind::EthWithdrawal: return "eth_withdrawal";
  case FindingKind::Generic: return "generic";
  }
  return "?";
}

const char *verdict_name(Verdict v) {
  switch (v) {
  case Verdict::Potential: return "potential";
  case Verdict::Confirmed: return "confirmed";
  case Verdict::Refuted: return "refuted";
  }
  return "?";
}

int line_of(const ir::Program &p, int stmt) { return stmt < 0 ? 0 : p.stmts.at(stmt).line; }

namespace {

struct Ctx {
  const SDG &sdg;
  const FactBase &fb;
  const ir::Program &p;
  const ICFG &g;
  std::map<std::string, std::vector<int>> writers, accessors;  // attacker-visible statements per var

  explicit Ctx(const SDG &s) : sdg(s), fb(*s.facts), p(*fb.prog), g(*fb.g) {
    for (auto &[st, v] : sdg.w_edges)
      if (visible(st))
        writers[v].push_back(st);
    std::map<std::string, std::set<int>> acc;
    for (auto &[st, v] : sdg.w_edges)
      acc[v].insert(st);
    for (auto &[v, st] : sdg.d_edges)
      acc[v].insert(st);
    for (auto &[v, ss] : acc)
      for (int st : ss)
        if (visible(st))
          accessors[v].push_back(st);
  }

  bool in_ctor(int s) const { return p.funcs[p.stmts[s].func].kind == ir::Function::Kind::Constructor; }
  bool visible(int s) const { return !in_ctor(s) && !fb.is_owner(s); }
  bool writes(int s, const std::string &v) const { return sdg.w_edges.count({s, v}) > 0; }
  bool depends(int s, const std::string &v) const { return sdg.d_edges.count({v, s}) > 0; }
  int func(int s) const { return p.stmts[s].func; }

  const std::vector<int> &list(const std::map<std::string, std::vector<int>> &m, const std::string &v) const {
    static const std::vector<int> none;
    auto it = m.find(v);
    return it == m.end() ? none : it->second;
  }

  // statements that race with `s1` on `v`: at least one side writes
  std::vector<int> partners(int s1, const std::string &v) const {
    std::vector<int> out;
    const auto &cands = writes(s1, v) ? list(accessors, v) : list(writers, v);
    for (int s2 : cands)
      if (s2 != s1)
        out.push_back(s2);
    return out;
  }

  std::set<std::string> vars_of(int s) const {
    std::set<std::string> out;
    if (auto it = fb.writes.find(s); it != fb.writes.end())
      out.insert(it->second.begin(), it->second.end());
    if (auto it = fb.depends.find(s); it != fb.depends.end())
      out.insert(it->second.begin(), it->second.end());
    return out;
  }

  bool sends_value(int e) const {
    auto it = fb.cv.find(e);
    return it != fb.cv.end() && it->second != "0";
  }

  Finding make(FindingKind k, int s1, int s2, const std::string &v, int anchor) const {
    Finding f;
    f.kind = k;
    if (s1 >= 0)
      f.pair = HazardPair{s1, s2, v, writes(s1, v), s2 >= 0 && writes(s2, v)};
    f.anchor = anchor;
    f.attacker_func = s2 >= 0 ? func(s2) : -1;
    return f;
  }

  // hazard(s1, s2, v) for every v that s1 depends on (or writes), s1 reaching `target`
  template <class Emit> void pairs_reaching(int target, bool depend_only, Emit emit) const {
    int fn = func(target);
    for (int s1 : p.funcs[fn].stmts) {
      if (!visible(s1) || !g.reach(s1, target))
        continue;
      for (auto &v : vars_of(s1)) {
        if (depend_only && !depends(s1, v))
          continue;
        for (int s2 : partners(s1, v))
          emit(s1, s2, v);
      }
    }
  }
};

std::vector<int> bfs_path(const ICFG &g, int a, int b) {
  std::map<int, int> prev{{a, a}};
  std::deque<int> q{a};
  while (!q.empty()) {
    int n = q.front();
    q.pop_front();
    if (n == b)
      break;
    for (int m : g.succ(n))
      if (!prev.count(m)) {
        prev[m] = n;
        q.push_back(m);
      }
  }
  std::vector<int> out;
  if (!prev.count(b))
    return out;
  for (int n = b; n != a; n = prev[n])
    out.push_back(n);
  out.push_back(a);
  std::reverse(out.begin(), out.end());
  return out;
}

} // namespace

std::vector<HazardPair> hazard_pairs(const SDG &sdg) {
  Ctx c(sdg);
  std::vector<HazardPair> out;
  for (auto &[v, ws] : c.writers)
    for (int s1 : ws)
      for (int s2 : c.list(c.accessors, v))
        if (s1 != s2)
          out.push_back({s1, s2, v, true, c.writes(s2, v)});
  return out;
}

std::vector<Finding> detect_reentrancy(const SDG &sdg) {
  Ctx c(sdg);
  std::vector<Finding> out;
  for (int e : c.fb.tainted_calls) {
    int fv = c.func(e);
    if (c.p.funcs[fv].kind == ir::Function::Kind::Constructor)
      continue;
    // vars the victim touches again once the call returns
    std::set<std::string> after;
    for (int x : c.p.funcs[fv].stmts) {
      if (x == e || !c.g.reach(e, x))
        continue;
      if (auto it = c.fb.reads.find(x); it != c.fb.reads.end())
        after.insert(it->second.begin(), it->second.end());
      if (auto it = c.fb.writes.find(x); it != c.fb.writes.end())
        after.insert(it->second.begin(), it->second.end());
    }
    for (int sv : c.p.funcs[fv].stmts) {
      if (!c.visible(sv) || !(c.g.reach(sv, e) || c.g.reach(e, sv)))
        continue;
      for (auto &v : c.vars_of(sv)) {
        if (!after.count(v))
          continue;
        for (int sa : c.partners(sv, v)) {
          if (!c.p.funcs[c.func(sa)].is_public())
            continue;
          out.push_back(c.make(FindingKind::Reentrancy, sv, sa, v, e));
        }
      }
    }
  }
  for (auto &f : out)
    extract_cex(f, sdg);
  return dedup(std::move(out), c.p);
}

std::vector<Finding> detect_tod(const SDG &sdg) {
  Ctx c(sdg);
  std::vector<Finding> out;
  for (auto &[e, cv] : c.fb.cv) {
    if (!c.sends_value(e) || c.in_ctor(e) || c.fb.is_owner(e))
      continue;
    const ir::Stmt &st = c.p.stmts[e];
    std::set<std::string> amount = c.fb.operand_deps(e, st.ext.value);
    std::set<std::string> receiver = c.fb.operand_deps(e, st.ext.dest);
    std::vector<int> guards = c.fb.guards(e);
    c.pairs_reaching(e, false, [&](int s1, int s2, const std::string &v) {
      bool guard = std::find(guards.begin(), guards.end(), s1) != guards.end() && c.depends(s1, v);
      if (guard)
        out.push_back(c.make(FindingKind::TodTransfer, s1, s2, v, e));
      if (s1 == e && amount.count(v))
        out.push_back(c.make(FindingKind::TodAmount, s1, s2, v, e));
      if (s1 == e && receiver.count(v))
        out.push_back(c.make(FindingKind::TodReceiver, s1, s2, v, e));
    });
    // a later require that fails undoes the transfer too
    for (int r : c.p.funcs[st.func].stmts) {
      if (r == e || c.p.stmts[r].kind != Kind::Require || !c.visible(r) || !c.g.reach(e, r))
        continue;
      for (auto &v : c.vars_of(r))
        if (c.depends(r, v))
          for (int s2 : c.partners(r, v))
            out.push_back(c.make(FindingKind::TodTransfer, r, s2, v, e));
    }
  }
  for (auto &f : out)
    extract_cex(f, sdg);
  return dedup(std::move(out), c.p);
}

std::vector<Finding> detect_suicide(const SDG &sdg) {
  Ctx c(sdg);
  std::vector<Finding> out;
  for (auto &s : c.p.stmts) {
    if (s.kind != Kind::SelfDestruct || c.in_ctor(s.id))
      continue;
    size_t before = out.size();
    c.pairs_reaching(s.id, true, [&](int s1, int s2, const std::string &v) {
      out.push_back(c.make(FindingKind::CondSuicide, s1, s2, v, s.id));
    });
    if (out.size() == before && !c.fb.is_owner(s.id)) {
      int entry = c.p.funcs[s.func].entry;
      if (c.g.reach(entry, s.id)) {
        Finding f = c.make(FindingKind::UncondSuicide, -1, -1, "", s.id);
        f.verdict = Verdict::Confirmed;
        out.push_back(f);
      }
    }
  }
  for (auto &f : out)
    extract_cex(f, sdg);
  return dedup(std::move(out), c.p);
}

std::vector<Finding> detect_eth_withdrawal(const SDG &sdg) {
  Ctx c(sdg);
  std::vector<Finding> out;
  for (auto &[e, cv] : c.fb.cv) {
    if (!c.sends_value(e) || c.in_ctor(e))
      continue;
    c.pairs_reaching(e, true, [&](int s1, int s2, const std::string &v) {
      out.push_back(c.make(FindingKind::EthWithdrawal, s1, s2, v, e));
    });
  }
  for (auto &f : out)
    extract_cex(f, sdg);
  return dedup(std::move(out), c.p);
}

std::vector<Finding> detect_generic(const SDG &sdg, int target) {
  Ctx c(sdg);
  if (target < 0 || target >= static_cast<int>(c.p.stmts.size()))
    throw UnknownNode("no statement " + std::to_string(target));
  std::vector<Finding> out;
  if (!c.g.reach(c.p.funcs[c.func(target)].entry, target))
    return out;
  c.pairs_reaching(target, false, [&](int s1, int s2, const std::string &v) {
    out.push_back(c.make(FindingKind::Generic, s1, s2, v, target));
  });
  for (auto &f : out)
    extract_cex(f, sdg);
  return dedup(std::move(out), c.p);
}

void extract_cex(Finding &f, const SDG &sdg) {
  const FactBase &fb = *sdg.facts;
  const ir::Program &p = *fb.prog;
  const ICFG &g = *fb.g;
  auto entry = [&](int s) { return p.funcs[p.stmts[s].func].entry; };
  auto exit = [&](int s) { return p.funcs[p.stmts[s].func].exit; };
  std::vector<int> w;
  int e = f.anchor;
  if (!f.pair) {
    w = {entry(e), e};
  } else if (f.kind == FindingKind::Reentrancy) {
    int sv = f.pair->s1, sa = f.pair->s2;
    int ea = p.funcs[f.attacker_func].entry;
    if (g.reach(sv, e)) {
      w = {entry(e), sv, e, ea, sa};
    } else {
      int back = -1;
      for (int t : g.succ(e))
        if (g.reach(t, sv))
          back = t;
      w = {entry(e), e, ea, sa, exit(sa), back, sv};
    }
  } else {
    // the racing transaction first, then the one that reads
    int s1 = f.pair->s1, s2 = f.pair->s2;
    if (g.reach(s1, e))
      w = {entry(s2), s2, exit(s2), entry(e), s1, e};
    else
      w = {entry(s2), s2, exit(s2), entry(e), e, s1};
  }
  w.erase(std::unique(w.begin(), w.end()), w.end());

  CexGraph cx;
  cx.entry = w.front();
  cx.waypoints = w;
  cx.targets = {e};
  if (f.pair) {
    cx.targets.push_back(f.pair->s1);
    if (f.pair->s2 >= 0)
      cx.targets.push_back(f.pair->s2);
  }
  std::set<int> nodes;
  std::set<std::pair<int, int>> edges;
  std::vector<int> path;
  for (size_t i = 0; i < w.size(); ++i) {
    int a = w[i];
    nodes.insert(a);
    if (i + 1 == w.size()) {
      if (path.empty() || path.back() != a)
        path.push_back(a);
      break;
    }
    int b = w[i + 1];
    if (p.stmts[a].func == p.stmts[b].func && g.reach(a, b)) {
      std::set<int> seg;
      for (int x : p.funcs[p.stmts[a].func].stmts)
        if (g.reach(a, x) && g.reach(x, b))
          seg.insert(x);
      for (int x : seg)
        for (int y : g.succ(x))
          if (seg.count(y))
            edges.insert({x, y});
      nodes.insert(seg.begin(), seg.end());
      auto sp = bfs_path(g, a, b);
      path.insert(path.end(), sp.begin(), sp.end() - 1);
    } else {
      // re-entry edge or a transaction boundary
      if (sdg.reentry_edges.count({a, b}))
        edges.insert({a, b});
      path.push_back(a);
    }
  }
  cx.nodes.assign(nodes.begin(), nodes.end());
  cx.edges.assign(edges.begin(), edges.end());
  cx.path = path;
  std::set<int> touching;
  for (auto &[s, v] : sdg.w_edges)
    touching.insert(s);
  for (auto &[v, s] : sdg.d_edges)
    touching.insert(s);
  for (int n : path)
    if (touching.count(n) || n == e) {
      int l = p.stmts[n].line;
      if (cx.lines.empty() || cx.lines.back() != l)
        cx.lines.push_back(l);
    }
  f.cex = std::move(cx);
}

std::vector<Finding> dedup(std::vector<Finding> fs, const ir::Program &p) {
  // inlined modifiers give different functions the same lines; keep them
  // apart until refinement has had a say
  std::set<std::tuple<int, std::string, int, int, int, int>> seen;
  std::vector<Finding> out;
  for (auto &f : fs) {
    int a = f.pair ? line_of(p, f.pair->s1) : line_of(p, f.anchor);
    int b = f.pair ? line_of(p, f.pair->s2) : 0;
    std::string v = f.pair ? f.pair->var : "";
    if (seen.insert({static_cast<int>(f.kind), v, std::min(a, b), std::max(a, b), line_of(p, f.anchor),
                     f.attacker_func})
            .second)
      out.push_back(std::move(f));
  }
  return out;
}

} // namespace stinc
