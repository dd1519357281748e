#include <stinc/sdg.hpp>

#include <sstream>

namespace stinc {

const char *sdg_rules() {
  return R"(
sdg_w(S, V) :- write(S, V), storage(V).
sdg_d(V, S) :- depend(S, V), storage(V).
pub_entry(N) :- entry(N, F), public(F).
pub_exit(N) :- exit(N, F), public(F).
reentry(E, N) :- extcall(E, _), pub_entry(N).
reentry(X, T) :- extcall(E, _), succ(E, T), pub_exit(X).
sdgnode(S) :- sdg_w(S, _).
sdgnode(S) :- sdg_d(_, S).
sdgnode(S) :- reentry(S, _).
sdgnode(S) :- reentry(_, S).
between(A, B) :- sdgnode(A), reach(A, C), sdgnode(C), C != A, reach(C, B), sdgnode(B), C != B.
order(A, B) :- sdgnode(A), reach(A, B), sdgnode(B), A != B, !between(A, B).
sdg_o(A, B) :- order(A, B).
sdg_o(A, B) :- reentry(A, B).
)";
}

std::vector<int> SDG::o_succ(int s) const {
  std::vector<int> out;
  for (auto it = o_edges.lower_bound({s, -1}); it != o_edges.end() && it->first == s; ++it)
    out.push_back(it->second);
  return out;
}

std::string SDG::dump() const {
  std::ostringstream o;
  for (auto &v : var_nodes)
    o << "v:" << v << " [var]\n";
  for (int s : stmt_nodes)
    o << "s" << s << " [stmt L" << facts->prog->stmts[s].line << "]\n";
  for (auto &[s, v] : w_edges)
    o << "s" << s << " -> v:" << v << " [W]\n";
  for (auto &[v, s] : d_edges)
    o << "v:" << v << " -> s" << s << " [D]\n";
  for (auto &[a, b] : o_edges)
    o << "s" << a << " -> s" << b << " [O]\n";
  return o.str();
}

SDG build_sdg(FactBase &fb) {
  auto rules = datalog::parse_rules(sdg_rules(), fb.in);
  fb.db = datalog::saturate(rules, std::move(fb.db));
  SDG g;
  g.facts = &fb;
  auto stmt = [&](datalog::Sym s) { return std::stoi(fb.in.name(s).substr(1)); };
  auto var = [&](datalog::Sym s) { return fb.in.name(s).substr(2); };
  for (auto &t : fb.db.tuples("sdg_w")) {
    g.w_edges.insert({stmt(t[0]), var(t[1])});
    g.var_nodes.insert(var(t[1]));
  }
  for (auto &t : fb.db.tuples("sdg_d")) {
    g.d_edges.insert({var(t[0]), stmt(t[1])});
    g.var_nodes.insert(var(t[0]));
  }
  for (auto &t : fb.db.tuples("sdgnode"))
    g.stmt_nodes.insert(stmt(t[0]));
  for (auto &t : fb.db.tuples("sdg_o"))
    g.o_edges.insert({stmt(t[0]), stmt(t[1])});
  for (auto &t : fb.db.tuples("reentry"))
    g.reentry_edges.insert({stmt(t[0]), stmt(t[1])});
  return g;
}

std::set<std::string> created_contracts(const ir::Program &prog) {
  std::set<std::string> out;
  for (auto &s : prog.stmts)
    if (s.kind == ir::Kind::Havoc && s.note.rfind("new ", 0) == 0)
      out.insert(s.note.substr(4));
  return out;
}

ir::Program combine_programs(const ir::Program &prog, const ir::Program &callee, bool delegate) {
  ir::Program out;
  out.name = prog.name + "+" + callee.name;
  out.vars = prog.vars;
  std::map<std::string, std::string> rename;
  for (size_t i = 0; i < callee.vars.size(); ++i) {
    const ir::StateVar &v = callee.vars[i];
    if (delegate && i < prog.vars.size()) {
      rename[v.name] = prog.vars[i].name;
      continue;
    }
    ir::StateVar nv = v;
    nv.name = callee.name + "." + v.name;
    rename[v.name] = nv.name;
    out.vars.push_back(nv);
  }
  auto append = [&](const ir::Program &src, const ir::Function &f, const std::string &prefix, bool mapped) {
    std::map<int, int> remap;
    int base = static_cast<int>(out.stmts.size());
    for (size_t i = 0; i < f.stmts.size(); ++i)
      remap[f.stmts[i]] = base + static_cast<int>(i);
    ir::Function nf = f;
    nf.name = prefix + f.name;
    int fidx = static_cast<int>(out.funcs.size());
    for (int &id : nf.stmts)
      id = remap.at(id);
    nf.entry = remap.at(f.entry);
    nf.exit = remap.at(f.exit);
    for (int id : f.stmts) {
      ir::Stmt s = src.stmts[id];
      s.id = remap.at(id);
      s.func = fidx;
      for (int &n : s.succ)
        n = remap.at(n);
      if (mapped && !s.var.empty())
        s.var = rename.at(s.var);
      if (delegate && !mapped && s.kind == ir::Kind::DelegateCall) {
        s.kind = ir::Kind::Havoc;
        s.note = "delegatecall";
        s.note_args = s.ext.args;
        s.ext = {};
      }
      out.stmts.push_back(s);
    }
    out.funcs.push_back(nf);
  };
  for (auto &f : prog.funcs)
    append(prog, f, "", false);
  for (auto &f : callee.funcs) {
    // delegated code never runs a constructor in the caller's context
    if (delegate && f.kind == ir::Function::Kind::Constructor)
      continue;
    append(callee, f, callee.name + ".", true);
  }
  return out;
}

} // namespace stinc
