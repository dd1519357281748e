#include <stinc/datalog.hpp>
#include <stinc/error.hpp>

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace stinc::datalog {

Sym Interner::intern(const std::string &s) {
  auto it = ids_.find(s);
  if (it != ids_.end())
    return it->second;
  Sym id = static_cast<Sym>(names_.size());
  ids_.emplace(s, id);
  names_.push_back(s);
  return id;
}

bool Database::contains(const std::string &rel, const Tuple &t) const {
  auto it = rels_.find(rel);
  return it != rels_.end() && it->second.count(t);
}

const std::set<Tuple> &Database::tuples(const std::string &rel) const {
  static const std::set<Tuple> empty;
  auto it = rels_.find(rel);
  return it == rels_.end() ? empty : it->second;
}

std::vector<std::string> Database::relations() const {
  std::vector<std::string> out;
  for (auto &[k, v] : rels_)
    out.push_back(k);
  return out;
}

std::size_t Database::total() const {
  std::size_t n = 0;
  for (auto &[k, v] : rels_)
    n += v.size();
  return n;
}

bool Database::operator==(const Database &o) const {
  std::set<std::string> names;
  for (auto &[k, v] : rels_)
    if (!v.empty())
      names.insert(k);
  for (auto &[k, v] : o.rels_)
    if (!v.empty())
      names.insert(k);
  for (auto &n : names)
    if (tuples(n) != o.tuples(n))
      return false;
  return true;
}

// ---- rule text ----

namespace {

struct RuleLexer {
  std::string_view s;
  size_t i = 0;
  void ws() {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else if (s[i] == '%' || (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '/')) {
        while (i < s.size() && s[i] != '\n')
          ++i;
      } else {
        break;
      }
    }
  }
  bool eof() {
    ws();
    return i >= s.size();
  }
  bool accept(std::string_view t) {
    ws();
    if (s.substr(i, t.size()) == t) {
      i += t.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view t) {
    if (!accept(t))
      throw Error("rule text: expected '" + std::string(t) + "' at offset " + std::to_string(i));
  }
  std::string word() {
    ws();
    if (i < s.size() && (s[i] == '\'' || s[i] == '"')) {
      char q = s[i++];
      size_t j = s.find(q, i);
      if (j == std::string_view::npos)
        throw Error("rule text: unterminated quote");
      std::string w(s.substr(i, j - i));
      i = j + 1;
      return "'" + w;
    }
    size_t j = i;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
      ++j;
    if (j == i)
      throw Error("rule text: expected identifier at offset " + std::to_string(i));
    std::string w(s.substr(i, j - i));
    i = j;
    return w;
  }
};

} // namespace

std::vector<Rule> parse_rules(std::string_view text, Interner &in) {
  std::vector<Rule> out;
  RuleLexer lx{text};
  while (!lx.eof()) {
    Rule r;
    std::map<std::string, int> vars;
    auto term = [&](const std::string &w) -> Term {
      if (w[0] == '\'')
        return Term::c(in.intern(w.substr(1)));
      if (w == "_")
        return Term::v(r.num_vars++);
      if (std::isupper(static_cast<unsigned char>(w[0])) || w[0] == '_') {
        auto it = vars.find(w);
        if (it != vars.end())
          return Term::v(it->second);
        vars[w] = r.num_vars;
        return Term::v(r.num_vars++);
      }
      return Term::c(in.intern(w));
    };
    auto atom = [&]() -> Atom {
      Atom a;
      if (lx.accept("!"))
        a.negated = true;
      std::string w = lx.word();
      if (lx.accept("(")) {
        a.rel = w;
        if (!lx.accept(")")) {
          do
            a.args.push_back(term(lx.word()));
          while (lx.accept(","));
          lx.expect(")");
        }
        return a;
      }
      if (a.negated)
        throw Error("rule text: '!' before a comparison");
      lx.expect("!=");
      a.rel = "!=";
      a.args.push_back(term(w));
      a.args.push_back(term(lx.word()));
      return a;
    };
    r.head = atom();
    if (lx.accept(":-")) {
      do
        r.body.push_back(atom());
      while (lx.accept(","));
    }
    lx.expect(".");
    out.push_back(std::move(r));
  }
  return out;
}

// ---- stratification ----

std::vector<std::vector<std::size_t>> stratify(const std::vector<Rule> &rules) {
  std::map<std::string, int> id;
  auto node = [&](const std::string &r) {
    auto it = id.find(r);
    if (it != id.end())
      return it->second;
    int n = static_cast<int>(id.size());
    id[r] = n;
    return n;
  };
  for (auto &r : rules) {
    node(r.head.rel);
    for (auto &a : r.body)
      if (!a.is_neq())
        node(a.rel);
  }
  int n = static_cast<int>(id.size());
  std::vector<std::vector<int>> adj(n);  // head -> body
  for (auto &r : rules)
    for (auto &a : r.body)
      if (!a.is_neq())
        adj[id[r.head.rel]].push_back(id[a.rel]);

  // Tarjan; components come out dependencies-first
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<bool> on(n, false);
  int counter = 0, ncomp = 0;
  std::function<void(int)> dfs = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp[w] = ncomp;
      } while (w != v);
      ++ncomp;
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[v] < 0)
      dfs(v);

  for (auto &r : rules)
    for (auto &a : r.body)
      if (a.negated && comp[id[a.rel]] == comp[id[r.head.rel]])
        throw StratificationError("negation of '" + a.rel + "' inside its own recursive component (rule for '" +
                                  r.head.rel + "')");

  std::vector<std::vector<std::size_t>> strata(ncomp);
  for (std::size_t i = 0; i < rules.size(); ++i)
    strata[comp[id[rules[i].head.rel]]].push_back(i);
  strata.erase(std::remove_if(strata.begin(), strata.end(), [](auto &s) { return s.empty(); }), strata.end());
  return strata;
}

// ---- evaluation ----

namespace {

struct Rel {
  std::set<Tuple> all;
  std::vector<const Tuple *> list;
  std::unordered_map<Sym, std::vector<const Tuple *>> by0;
  bool insert(const Tuple &t) {
    auto [it, ok] = all.insert(t);
    if (ok) {
      list.push_back(&*it);
      if (!t.empty())
        by0[t[0]].push_back(&*it);
    }
    return ok;
  }
};

struct Plan {
  const Rule *rule;
  std::vector<std::size_t> positives;
  std::vector<std::vector<std::size_t>> filters_after;  // filters checked once positives[k] is bound
  std::vector<std::size_t> ground_filters;              // no variables at all
};

Plan make_plan(const Rule &r) {
  Plan p;
  p.rule = &r;
  std::vector<int> bound_at(r.num_vars, -1);
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    const Atom &a = r.body[i];
    if (a.negated || a.is_neq())
      continue;
    int k = static_cast<int>(p.positives.size());
    p.positives.push_back(i);
    for (auto &t : a.args)
      if (t.is_var() && bound_at[t.var] < 0)
        bound_at[t.var] = k;
  }
  p.filters_after.resize(p.positives.size());
  auto need = [&](const Atom &a) {
    int k = -1;
    for (auto &t : a.args)
      if (t.is_var()) {
        if (bound_at[t.var] < 0)
          throw Error("rule for '" + r.head.rel + "' is not range restricted");
        k = std::max(k, bound_at[t.var]);
      }
    return k;
  };
  for (std::size_t i = 0; i < r.body.size(); ++i) {
    const Atom &a = r.body[i];
    if (!(a.negated || a.is_neq()))
      continue;
    int k = need(a);
    if (k < 0)
      p.ground_filters.push_back(i);
    else
      p.filters_after[k].push_back(i);
  }
  need(r.head);
  return p;
}

class Evaluator {
public:
  std::map<std::string, Rel> &full;
  explicit Evaluator(std::map<std::string, Rel> &f) : full(f) {}

  // delta_pos: index into plan.positives that reads `delta`, or -1
  void run(const Plan &p, int delta_pos, const Rel *delta, std::vector<Tuple> &out) {
    plan_ = &p;
    delta_pos_ = delta_pos;
    delta_ = delta;
    out_ = &out;
    binding_.assign(p.rule->num_vars, 0);
    bound_.assign(p.rule->num_vars, false);
    for (auto i : p.ground_filters)
      if (!filter(p.rule->body[i]))
        return;
    step(0);
  }

private:
  const Plan *plan_ = nullptr;
  int delta_pos_ = -1;
  const Rel *delta_ = nullptr;
  std::vector<Tuple> *out_ = nullptr;
  std::vector<Sym> binding_;
  std::vector<bool> bound_;

  Sym value(const Term &t) const { return t.is_var() ? binding_[t.var] : t.val; }

  bool filter(const Atom &a) const {
    if (a.is_neq())
      return value(a.args[0]) != value(a.args[1]);
    Tuple t;
    for (auto &x : a.args)
      t.push_back(value(x));
    auto it = full.find(a.rel);
    bool present = it != full.end() && it->second.all.count(t);
    return a.negated ? !present : present;
  }

  void step(std::size_t k) {
    const Rule &r = *plan_->rule;
    if (k == plan_->positives.size()) {
      Tuple t;
      for (auto &x : r.head.args)
        t.push_back(value(x));
      out_->push_back(std::move(t));
      return;
    }
    const Atom &a = r.body[plan_->positives[k]];
    const Rel *src;
    if (static_cast<int>(k) == delta_pos_) {
      src = delta_;
    } else {
      auto it = full.find(a.rel);
      if (it == full.end())
        return;
      src = &it->second;
    }
    const std::vector<const Tuple *> *cands = &src->list;
    static const std::vector<const Tuple *> none;
    if (!a.args.empty() && (!a.args[0].is_var() || bound_[a.args[0].var])) {
      auto it = src->by0.find(value(a.args[0]));
      cands = it == src->by0.end() ? &none : &it->second;
    }
    std::vector<int> newly;
    for (const Tuple *tp : *cands) {
      const Tuple &t = *tp;
      if (t.size() != a.args.size())
        continue;
      bool ok = true;
      newly.clear();
      for (std::size_t j = 0; j < t.size() && ok; ++j) {
        const Term &x = a.args[j];
        if (!x.is_var()) {
          ok = t[j] == x.val;
        } else if (bound_[x.var]) {
          ok = t[j] == binding_[x.var];
        } else {
          bound_[x.var] = true;
          binding_[x.var] = t[j];
          newly.push_back(x.var);
        }
      }
      if (ok)
        for (auto fi : plan_->filters_after[k])
          if (!filter(r.body[fi])) {
            ok = false;
            break;
          }
      if (ok)
        step(k + 1);
      for (int v : newly)
        bound_[v] = false;
    }
  }
};

} // namespace

Database saturate(const std::vector<Rule> &rules, Database base) {
  auto strata = stratify(rules);
  std::vector<Plan> plans;
  plans.reserve(rules.size());
  for (auto &r : rules)
    plans.push_back(make_plan(r));

  std::map<std::string, Rel> full;
  for (auto &name : base.relations())
    for (auto &t : base.tuples(name))
      full[name].insert(t);

  Evaluator ev(full);
  for (auto &stratum : strata) {
    std::set<std::string> heads;
    for (auto i : stratum)
      heads.insert(rules[i].head.rel);

    std::map<std::string, Rel> delta;
    std::vector<Tuple> out;
    for (auto i : stratum) {
      out.clear();
      ev.run(plans[i], -1, nullptr, out);
      for (auto &t : out)
        if (!full[rules[i].head.rel].all.count(t))
          delta[rules[i].head.rel].insert(t);
    }
    while (!delta.empty()) {
      for (auto &[rel, d] : delta)
        for (auto *t : d.list)
          full[rel].insert(*t);
      std::map<std::string, Rel> next;
      for (auto i : stratum) {
        const Plan &p = plans[i];
        for (std::size_t k = 0; k < p.positives.size(); ++k) {
          const Atom &a = rules[i].body[p.positives[k]];
          auto it = delta.find(a.rel);
          if (!heads.count(a.rel) || it == delta.end())
            continue;
          out.clear();
          ev.run(p, static_cast<int>(k), &it->second, out);
          for (auto &t : out)
            if (!full[rules[i].head.rel].all.count(t))
              next[rules[i].head.rel].insert(t);
        }
      }
      delta = std::move(next);
    }
  }

  Database db;
  for (auto &[name, rel] : full)
    for (auto &t : rel.all)
      db.add(name, t);
  return db;
}

std::string dump_relation(const Database &db, const std::string &rel, const Interner &in) {
  std::vector<std::string> lines;
  for (auto &t : db.tuples(rel)) {
    std::string l;
    for (std::size_t i = 0; i < t.size(); ++i)
      l += (i ? "\t" : "") + in.name(t[i]);
    lines.push_back(l);
  }
  std::sort(lines.begin(), lines.end());
  std::string o;
  for (auto &l : lines)
    o += l + "\n";
  return o;
}

} // namespace stinc::datalog
