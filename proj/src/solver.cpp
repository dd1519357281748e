#include <stinc/solver.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char **environ;

namespace stinc::sym {

const char *sat_name(SatResult r) {
  switch (r) {
  case SatResult::Sat: return "sat";
  case SatResult::Unsat: return "unsat";
  case SatResult::Unknown: return "unknown";
  }
  return "?";
}

namespace {

class Builtin : public Solver {
public:
  SatResult check(Terms &tm, T f, Model *model) override {
    calls_ = 0;
    Model m;
    SatResult r = solve(tm, f, m);
    if (r == SatResult::Sat && model)
      *model = m;
    return r;
  }
  std::string name() const override { return "builtin"; }

private:
  int calls_ = 0;
  static constexpr int kMaxCalls = 4000;
  static constexpr int kMaxEvals = 60000;

  static bool occurs(const Terms &tm, T x, T in) {
    std::set<T> vs;
    tm.vars(in, vs);
    return vs.count(x) > 0;
  }

  // x := v for some conjunct, if any
  static std::optional<std::pair<T, T>> binding(Terms &tm, T f) {
    std::optional<std::pair<T, T>> best;
    for (T c : tm.conjuncts(f)) {
      const Node &n = tm.node(c);
      if (n.op == Op::Var)
        return std::make_pair(c, tm.boolean(true));
      if (n.op == Op::Not && tm.node(n.args[0]).op == Op::Var)
        return std::make_pair(n.args[0], tm.boolean(false));
      if (n.op != Op::Eq)
        continue;
      for (int k = 0; k < 2; ++k) {
        T x = n.args[k], v = n.args[1 - k];
        if (tm.node(x).op != Op::Var || occurs(tm, x, v))
          continue;
        if (tm.node(v).op == Op::Const)
          return std::make_pair(x, v);
        if (!best)
          best = std::make_pair(x, v);
      }
    }
    return best;
  }

  // first Ite condition inside f
  static std::optional<T> ite_cond(const Terms &tm, T f) {
    std::vector<T> stack{f};
    std::set<T> seen;
    while (!stack.empty()) {
      T x = stack.back();
      stack.pop_back();
      if (!seen.insert(x).second)
        continue;
      const Node &n = tm.node(x);
      if (n.op == Op::Ite)
        return n.args[0];
      for (T c : n.args)
        stack.push_back(c);
    }
    return std::nullopt;
  }

  // f with condition c fixed to `val`
  static T assume(Terms &tm, T f, T c, bool val) {
    std::map<T, T> memo;
    std::function<T(T)> go = [&](T x) -> T {
      if (x == c)
        return tm.boolean(val);
      if (auto it = memo.find(x); it != memo.end())
        return it->second;
      const Node n = tm.node(x);
      T r = x;
      if (!n.args.empty()) {
        std::vector<T> args;
        bool same = true;
        for (T a : n.args) {
          args.push_back(go(a));
          same = same && args.back() == a;
        }
        if (!same)
          r = n.op == Op::Select ? tm.select(n.name, args) : tm.mk(n.op, args);
      }
      memo[x] = r;
      return r;
    };
    return go(f);
  }

  SatResult solve(Terms &tm, T f, Model &m) {
    if (++calls_ > kMaxCalls || expired())
      return SatResult::Unknown;
    if (tm.is_true(f))
      return SatResult::Sat;
    if (tm.is_false(f))
      return SatResult::Unsat;

    if (auto b = binding(tm, f)) {
      auto [x, v] = *b;
      T g = tm.substitute(f, [&](T y) -> std::optional<T> {
        if (y == x)
          return v;
        return std::nullopt;
      });
      SatResult r = solve(tm, g, m);
      if (r == SatResult::Sat)
        m.vars[x] = tm.eval(v, m);
      return r;
    }

    auto cs = tm.conjuncts(f);
    for (size_t i = 0; i < cs.size(); ++i) {
      if (tm.node(cs[i]).op != Op::Or)
        continue;
      std::vector<T> rest;
      for (size_t j = 0; j < cs.size(); ++j)
        if (j != i)
          rest.push_back(cs[j]);
      bool unknown = false;
      for (T d : tm.node(cs[i]).args) {
        std::vector<T> parts = rest;
        parts.push_back(d);
        Model sub;
        SatResult r = solve(tm, tm.land(parts), sub);
        if (r == SatResult::Sat) {
          m = sub;
          return r;
        }
        unknown = unknown || r == SatResult::Unknown;
      }
      return unknown ? SatResult::Unknown : SatResult::Unsat;
    }

    if (auto c = ite_cond(tm, f)) {
      bool unknown = false;
      for (bool val : {true, false}) {
        T g = tm.land(val ? *c : tm.lnot(*c), assume(tm, f, *c, val));
        Model sub;
        SatResult r = solve(tm, g, sub);
        if (r == SatResult::Sat) {
          m = sub;
          return r;
        }
        unknown = unknown || r == SatResult::Unknown;
      }
      return unknown ? SatResult::Unknown : SatResult::Unsat;
    }

    return search(tm, f, m);
  }

  SatResult search(Terms &tm, T f, Model &m) {
    std::set<T> vs, ss;
    tm.vars(f, vs);
    tm.selects(f, ss);
    std::set<u256> ks;
    tm.consts(f, ks);
    std::vector<u256> pool = {0, 1, 2};
    for (auto &k : ks)
      for (u256 d : {k, k + 1, k - 1})
        if (std::find(pool.begin(), pool.end(), d) == pool.end())
          pool.push_back(d);
    pool.push_back(~u256(0));
    if (pool.size() > 10)
      pool.resize(10);

    std::vector<T> unk(vs.begin(), vs.end());
    unk.insert(unk.end(), ss.begin(), ss.end());
    std::vector<std::vector<u256>> cand;
    for (T x : unk)
      cand.push_back(tm.sort(x) == Sort::Bool ? std::vector<u256>{0, 1} : pool);

    auto try_assign = [&](const std::vector<size_t> &idx) -> bool {
      Model t;
      for (size_t i = 0; i < unk.size(); ++i)
        if (tm.node(unk[i]).op == Op::Var)
          t.vars[unk[i]] = cand[i][idx[i]];
      // selects: evaluate arguments under the vars, then check congruence
      for (size_t i = 0; i < unk.size(); ++i) {
        const Node &n = tm.node(unk[i]);
        if (n.op != Op::Select)
          continue;
        std::vector<u256> args;
        for (T a : n.args)
          args.push_back(tm.eval(a, t));
        auto key = std::make_pair(n.name, args);
        auto [it, fresh] = t.funcs.emplace(key, cand[i][idx[i]]);
        if (!fresh && it->second != cand[i][idx[i]])
          return false;
      }
      if (tm.eval(f, t) == 0)
        return false;
      m = t;
      return true;
    };

    std::vector<size_t> idx(unk.size(), 0);
    int evals = 0;
    // small values first, in mixed radix order
    while (evals < kMaxEvals) {
      if (++evals % 512 == 0 && expired())
        return SatResult::Unknown;
      if (try_assign(idx))
        return SatResult::Sat;
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == cand[k].size())
        idx[k++] = 0;
      if (k == idx.size())
        break;
    }
    std::mt19937 rng(12345);
    for (int i = 0; i < 4000; ++i) {
      for (size_t k = 0; k < idx.size(); ++k)
        idx[k] = rng() % cand[k].size();
      if (try_assign(idx))
        return SatResult::Sat;
    }
    return SatResult::Unknown;
  }
};

std::string quote(const std::string &s) { return "|" + s + "|"; }

class External : public Solver {
public:
  explicit External(std::string cmd) : cmd_(std::move(cmd)) {}
  std::string name() const override { return "external"; }

  SatResult check(Terms &tm, T f, Model *model) override {
    if (tm.is_true(f))
      return SatResult::Sat;
    if (tm.is_false(f))
      return SatResult::Unsat;
    // cheap in-process attempt first; z3 is slow on wide non-linear terms
    quick_.deadline = deadline;
    if (SatResult r = quick_.check(tm, f, model); r != SatResult::Unknown)
      return r;
    std::string script;
    long ms = query_timeout_ms;
    if (deadline) {
      ms = std::min<long>(ms, std::chrono::duration_cast<std::chrono::milliseconds>(
                                  *deadline - std::chrono::steady_clock::now())
                                  .count());
      if (ms <= 0)
        return SatResult::Unknown;
    }
    script += "(set-option :timeout " + std::to_string(ms) + ")\n";
    script += to_smtlib(tm, f);
    std::string out;
    if (!run(script, out))
      return SatResult::Unknown;
    std::istringstream in(out);
    std::string first;
    in >> first;
    if (first == "sat")
      return SatResult::Sat;
    if (first == "unsat")
      return SatResult::Unsat;
    return SatResult::Unknown;
  }

private:
  std::string cmd_;
  Builtin quick_;

  bool run(const std::string &input, std::string &output) {
    int to_child[2], from_child[2];
    if (pipe(to_child) != 0)
      return false;
    if (pipe(from_child) != 0) {
      close(to_child[0]);
      close(to_child[1]);
      return false;
    }
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, to_child[0], 0);
    posix_spawn_file_actions_adddup2(&fa, from_child[1], 1);
    posix_spawn_file_actions_addopen(&fa, 2, "/dev/null", O_WRONLY, 0);
    posix_spawn_file_actions_addclose(&fa, to_child[1]);
    posix_spawn_file_actions_addclose(&fa, from_child[0]);
    std::string sh_cmd = cmd_;
    const char *argv[] = {"sh", "-c", sh_cmd.c_str(), nullptr};
    pid_t pid;
    int rc = posix_spawn(&pid, "/bin/sh", &fa, nullptr, const_cast<char **>(argv), environ);
    posix_spawn_file_actions_destroy(&fa);
    close(to_child[0]);
    close(from_child[1]);
    if (rc != 0) {
      close(to_child[1]);
      close(from_child[0]);
      return false;
    }
    // the script is consumed before any output appears
    signal(SIGPIPE, SIG_IGN);
    std::string full = input + "(exit)\n";
    size_t off = 0;
    while (off < full.size()) {
      ssize_t n = write(to_child[1], full.data() + off, full.size() - off);
      if (n <= 0)
        break;
      off += static_cast<size_t>(n);
    }
    close(to_child[1]);
    char buf[4096];
    ssize_t n;
    while ((n = read(from_child[0], buf, sizeof buf)) > 0)
      output.append(buf, static_cast<size_t>(n));
    close(from_child[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    return !output.empty();
  }
};

} // namespace

std::string to_smtlib(const Terms &tm, T f) {
  std::ostringstream o;
  o << "(set-logic QF_UFBV)\n";
  std::vector<T> order;
  std::set<T> seen;
  std::function<void(T)> visit = [&](T x) {
    if (!seen.insert(x).second)
      return;
    for (T c : tm.node(x).args)
      visit(c);
    order.push_back(x);
  };
  visit(f);
  std::map<std::string, size_t> funcs;
  for (T x : order) {
    const Node &n = tm.node(x);
    if (n.op == Op::Var)
      o << "(declare-fun " << quote(n.name) << " () " << (n.sort == Sort::Bool ? "Bool" : "(_ BitVec 256)")
        << ")\n";
    else if (n.op == Op::Select && !funcs.count(n.name + "/" + std::to_string(n.args.size()))) {
      std::string fn = n.name + "/" + std::to_string(n.args.size());
      funcs[fn] = n.args.size();
      o << "(declare-fun " << quote("sel:" + fn) << " (";
      for (size_t i = 0; i < n.args.size(); ++i)
        o << (i ? " " : "") << "(_ BitVec 256)";
      o << ") (_ BitVec 256))\n";
    }
  }
  auto ref = [&](T x) -> std::string {
    const Node &n = tm.node(x);
    switch (n.op) {
    case Op::Const: return "(_ bv" + n.val.str() + " 256)";
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Var: return quote(n.name);
    default: return "|t" + std::to_string(x) + "|";
    }
  };
  for (T x : order) {
    const Node &n = tm.node(x);
    if (n.args.empty())
      continue;
    auto a = [&](size_t i) { return ref(n.args[i]); };
    std::string e;
    auto bin = [&](const char *op) { return "(" + std::string(op) + " " + a(0) + " " + a(1) + ")"; };
    switch (n.op) {
    case Op::Select: {
      e = "(" + quote("sel:" + n.name + "/" + std::to_string(n.args.size()));
      for (size_t i = 0; i < n.args.size(); ++i)
        e += " " + a(i);
      e += ")";
      break;
    }
    case Op::Add: e = bin("bvadd"); break;
    case Op::Sub: e = bin("bvsub"); break;
    case Op::Mul: e = bin("bvmul"); break;
    case Op::Div: e = "(ite (= " + a(1) + " (_ bv0 256)) (_ bv0 256) " + bin("bvudiv") + ")"; break;
    case Op::Mod: e = "(ite (= " + a(1) + " (_ bv0 256)) (_ bv0 256) " + bin("bvurem") + ")"; break;
    case Op::BAnd: e = bin("bvand"); break;
    case Op::BOr: e = bin("bvor"); break;
    case Op::BXor: e = bin("bvxor"); break;
    case Op::BNot: e = "(bvnot " + a(0) + ")"; break;
    case Op::Shl: e = bin("bvshl"); break;
    case Op::Shr: e = bin("bvlshr"); break;
    case Op::Eq: e = bin("="); break;
    case Op::Ult: e = bin("bvult"); break;
    case Op::Ule: e = bin("bvule"); break;
    case Op::And:
    case Op::Or: {
      e = n.op == Op::And ? "(and" : "(or";
      for (size_t i = 0; i < n.args.size(); ++i)
        e += " " + a(i);
      e += ")";
      break;
    }
    case Op::Not: e = "(not " + a(0) + ")"; break;
    case Op::Ite: e = "(ite " + a(0) + " " + a(1) + " " + a(2) + ")"; break;
    default: break;
    }
    o << "(define-fun |t" << x << "| () " << (n.sort == Sort::Bool ? "Bool" : "(_ BitVec 256)") << " " << e
      << ")\n";
  }
  o << "(assert " << ref(f) << ")\n(check-sat)\n";
  return o.str();
}

std::unique_ptr<Solver> make_builtin_solver() { return std::make_unique<Builtin>(); }

std::unique_ptr<Solver> make_external_solver(const std::string &command) {
  return std::make_unique<External>(command);
}

} // namespace stinc::sym
