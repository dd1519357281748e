#include <stinc/error.hpp>
#include <stinc/frontend/lower.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <set>

namespace stinc {

using namespace ast;
using ir::Operand;

namespace {

using boost::multiprecision::cpp_int;

// contract with its bases merged in
struct Flat {
  const ContractDecl *main = nullptr;
  std::vector<const ContractDecl *> chain;  // bases first
  std::vector<const StateVarDecl *> vars;
  std::map<std::string, const FunctionDecl *> funcs;
  std::vector<std::string> func_order;
  std::map<std::string, const FunctionDecl *> mods;
  std::map<std::string, const StructDecl *> structs;
  std::set<std::string> events;
};

void linearize(const SourceUnit &u, const ContractDecl &c, std::vector<const ContractDecl *> &out,
               std::set<std::string> &active) {
  if (active.count(c.name))
    throw Error("cyclic inheritance through " + c.name);
  for (auto *x : out)
    if (x == &c)
      return;
  active.insert(c.name);
  for (auto &b : c.bases) {
    const ContractDecl *bc = u.find(b);
    if (!bc)
      throw UnknownIdentifier("unknown base contract '" + b + "'");
    linearize(u, *bc, out, active);
  }
  active.erase(c.name);
  out.push_back(&c);
}

Flat flatten(const SourceUnit &u, const ContractDecl &c) {
  Flat f;
  f.main = &c;
  std::set<std::string> active;
  linearize(u, c, f.chain, active);
  for (auto *k : f.chain) {
    for (auto &v : k->state_vars)
      f.vars.push_back(&v);
    for (auto &fn : k->functions) {
      if (fn.kind != FunctionDecl::Kind::Function && fn.kind != FunctionDecl::Kind::Fallback)
        continue;
      std::string key = fn.kind == FunctionDecl::Kind::Fallback ? "fallback" : fn.name;
      if (!fn.body && f.funcs.count(key))
        continue;
      if (!f.funcs.count(key))
        f.func_order.push_back(key);
      f.funcs[key] = &fn;
    }
    for (auto &m : k->modifiers)
      f.mods[m.name] = &m;
    for (auto &s : k->structs)
      f.structs[s.name] = &s;
    for (auto &e : k->events)
      f.events.insert(e);
  }
  return f;
}

std::string leaf_type(const TypePtr &t) {
  switch (t->kind) {
  case Type::Kind::Uint:
    return "uint";
  case Type::Kind::Int:
    return "int";
  case Type::Kind::Bool:
    return "bool";
  case Type::Kind::Address:
    return "address";
  case Type::Kind::Bytes:
    return "bytes";
  case Type::Kind::String:
    return "string";
  case Type::Kind::Named:
    return t->name;
  default:
    return "?";
  }
}

TypePtr elem(Type::Kind k) {
  auto t = std::make_shared<Type>();
  t->kind = k;
  return t;
}

TypePtr uint_t() { return elem(Type::Kind::Uint); }
TypePtr bool_t() { return elem(Type::Kind::Bool); }
TypePtr addr_t() { return elem(Type::Kind::Address); }
TypePtr named_t(const std::string &n) {
  auto t = elem(Type::Kind::Named);
  t->name = n;
  return t;
}

struct Val {
  Operand op;
  TypePtr type;
};

struct LRef {
  bool storage = false;
  std::string name;  // local ir name or storage var
  std::vector<Operand> keys;
  TypePtr type;
  bool fixed_array_len = false;
};

struct Pending {
  int id;
  int slot;
};

struct LocalInfo {
  Operand op;
  TypePtr type;
};

struct LoopCtx {
  std::vector<Pending> breaks;
  std::vector<Pending> continues;
};

struct Frame {
  std::string prefix;  // "" for the top-level function
  std::vector<std::map<std::string, LocalInfo>> scopes;
  std::vector<Pending> returns;
  std::string ret_local;  // receives the returned value when inlined
  std::vector<LoopCtx> loops;
  std::function<void()> placeholder;  // modifiers only
  bool top = false;
};

class Lowerer {
public:
  Lowerer(const SourceUnit &u, const ContractDecl &c) : unit_(u), flat_(flatten(u, c)) {}

  ir::Program run() {
    prog_.name = flat_.main->name;
    for (auto *v : flat_.vars) {
      if (v->constant && v->init && (v->init->kind == ExprKind::Number || v->init->kind == ExprKind::Bool)) {
        constants_[v->name] = v->init;
        continue;
      }
      state_types_[v->name] = v->type;
      expand_var(v->name, v->type, 0, v->pos.line, v->constant);
    }
    lower_constructor();
    for (auto &key : flat_.func_order) {
      const FunctionDecl *f = flat_.funcs[key];
      if (!f->body)
        continue;
      if (f->visibility != Visibility::Public && f->visibility != Visibility::External)
        continue;
      lower_entry(*f, key, f->kind == FunctionDecl::Kind::Fallback ? ir::Function::Kind::Fallback
                                                                 : ir::Function::Kind::Public);
    }
    return std::move(prog_);
  }

private:
  const SourceUnit &unit_;
  Flat flat_;
  ir::Program prog_;
  std::map<std::string, TypePtr> state_types_;
  std::map<std::string, ExprPtr> constants_;
  std::vector<Pending> preds_;
  int cur_func_ = -1;
  int line_ = 0;
  int tmp_ = 0;
  int inline_count_ = 0;
  std::map<std::string, int> local_names_;
  std::vector<const FunctionDecl *> inline_stack_;
  Frame *frame_ = nullptr;

  // ---- storage layout ----

  void expand_var(const std::string &name, const TypePtr &t, int keys, int line, bool constant) {
    switch (t->kind) {
    case Type::Kind::Mapping:
      expand_var(name, t->value, keys + 1, line, constant);
      return;
    case Type::Kind::Array:
      if (!t->size)
        add_var(name + ".length", keys, "uint", line, constant);
      expand_var(name, t->value, keys + 1, line, constant);
      return;
    case Type::Kind::Named:
      if (auto it = flat_.structs.find(t->name); it != flat_.structs.end()) {
        for (auto &f : it->second->fields)
          expand_var(name + "." + f.name, f.type, keys, line, constant);
        return;
      }
      if (!unit_.find(t->name))
        throw UnknownIdentifier("unknown type '" + t->name + "'");
      break;
    default:
      break;
    }
    add_var(name, keys, leaf_type(t), line, constant);
  }

  void add_var(const std::string &name, int keys, const std::string &ty, int line, bool constant) {
    ir::StateVar v;
    v.name = name;
    v.key_count = keys;
    v.value_type = ty;
    v.line = line;
    v.constant = constant;
    prog_.vars.push_back(v);
  }

  bool is_struct(const TypePtr &t) const { return t && t->kind == Type::Kind::Named && flat_.structs.count(t->name); }
  bool is_leaf(const TypePtr &t) const {
    return t && t->kind != Type::Kind::Mapping && t->kind != Type::Kind::Array && !is_struct(t);
  }

  // ---- emission ----

  ir::Stmt &cur(int id) { return prog_.stmts[id]; }

  int emit(ir::Stmt s) {
    s.id = static_cast<int>(prog_.stmts.size());
    s.func = cur_func_;
    if (s.line == 0)
      s.line = line_;
    size_t slots = s.kind == ir::Kind::Exit ? 0 : s.kind == ir::Kind::Branch ? 2 : 1;
    s.succ.assign(slots, -1);
    prog_.stmts.push_back(std::move(s));
    int id = static_cast<int>(prog_.stmts.size()) - 1;
    link(preds_, id);
    preds_ = {{id, 0}};
    prog_.funcs[cur_func_].stmts.push_back(id);
    return id;
  }

  void link(const std::vector<Pending> &from, int to) {
    for (auto &p : from)
      prog_.stmts[p.id].succ[p.slot] = to;
  }

  ir::Stmt mk(ir::Kind k) {
    ir::Stmt s;
    s.kind = k;
    return s;
  }

  std::string fresh_tmp() { return "$t" + std::to_string(++tmp_); }

  std::string fresh_local(const std::string &base) {
    std::string n = frame_->prefix + base;
    int &c = local_names_[n];
    ++c;
    return c == 1 ? n : n + "#" + std::to_string(c);
  }

  Operand assign_tmp(ir::Stmt s) {
    s.dst = fresh_tmp();
    std::string d = s.dst;
    emit(std::move(s));
    return Operand::local(d);
  }

  [[noreturn]] void unsupported(const std::string &what, Pos p) const {
    throw UnsupportedFeature(p.line, p.col, "unsupported: " + what);
  }

  // ---- functions ----

  int begin_function(const std::string &name, ir::Function::Kind kind, const FunctionDecl *f, int line) {
    ir::Function fn;
    fn.name = name;
    fn.kind = kind;
    fn.line = line;
    if (f) {
      fn.payable = f->payable;
      for (auto &p : f->params)
        fn.params.push_back(p.name);
    }
    prog_.funcs.push_back(fn);
    cur_func_ = static_cast<int>(prog_.funcs.size()) - 1;
    preds_.clear();
    tmp_ = 0;
    local_names_.clear();
    line_ = line;
    int e = emit(mk(ir::Kind::Entry));
    prog_.funcs[cur_func_].entry = e;
    return cur_func_;
  }

  void end_function(Frame &fr) {
    for (auto &r : fr.returns)
      preds_.push_back(r);
    fr.returns.clear();
    ir::Stmt xs = mk(ir::Kind::Exit);
    xs.line = prog_.funcs[cur_func_].line;
    int x = emit(xs);
    prog_.funcs[cur_func_].exit = x;
    // dangling slots (code after return) flow to the exit
    for (int id : prog_.funcs[cur_func_].stmts)
      for (auto &s : prog_.stmts[id].succ)
        if (s < 0)
          s = x;
  }

  void bind_params(Frame &fr, const FunctionDecl &f, bool as_param) {
    fr.scopes.emplace_back();
    for (auto &p : f.params) {
      if (p.name.empty())
        continue;
      if (as_param)
        fr.scopes.back()[p.name] = {Operand::param(p.name), p.type};
      else
        fr.scopes.back()[p.name] = {Operand::local(fresh_local(p.name)), p.type};
    }
  }

  void declare_named_returns(Frame &fr, const FunctionDecl &f) {
    for (auto &r : f.returns) {
      if (r.name.empty())
        continue;
      std::string n = fresh_local(r.name);
      fr.scopes.back()[r.name] = {Operand::local(n), r.type};
      ir::Stmt s = mk(ir::Kind::Assign);
      s.dst = n;
      s.a = Operand::cnst("0");
      emit(s);
      if (fr.ret_local.empty())
        fr.ret_local = n;
    }
  }

  void lower_entry(const FunctionDecl &f, const std::string &name, ir::Function::Kind kind) {
    begin_function(name, kind, &f, f.pos.line);
    Frame fr;
    fr.top = true;
    Frame *saved = frame_;
    frame_ = &fr;
    bind_params(fr, f, true);
    line_ = f.pos.line;
    declare_named_returns(fr, f);
    inline_stack_.push_back(&f);
    run_modifiers(f, 0, fr);
    inline_stack_.pop_back();
    frame_ = saved;
    end_function(fr);
  }

  void lower_constructor() {
    std::vector<const FunctionDecl *> ctors;
    for (auto *k : flat_.chain)
      for (auto &fn : k->functions)
        if (fn.kind == FunctionDecl::Kind::Constructor && fn.body)
          ctors.push_back(&fn);
    bool inits = false;
    for (auto *v : flat_.vars)
      if (v->init && !constants_.count(v->name))
        inits = true;
    if (ctors.empty() && !inits)
      return;
    const FunctionDecl *main_ctor = nullptr;
    for (auto &fn : flat_.main->functions)
      if (fn.kind == FunctionDecl::Kind::Constructor && fn.body)
        main_ctor = &fn;
    int line = main_ctor ? main_ctor->pos.line : flat_.main->pos.line;
    begin_function("constructor", ir::Function::Kind::Constructor, main_ctor, line);
    Frame fr;
    fr.top = true;
    Frame *saved = frame_;
    frame_ = &fr;
    fr.scopes.emplace_back();
    for (auto *v : flat_.vars) {
      if (!v->init || constants_.count(v->name))
        continue;
      line_ = v->pos.line;
      if (!is_leaf(v->type))
        unsupported("initializer for non-scalar state variable", v->pos);
      Val val = rv(v->init);
      store(LRef{true, v->name, {}, v->type}, val.op);
    }
    for (auto *c : ctors) {
      Frame cf;
      cf.top = c == main_ctor;
      frame_ = &cf;
      if (c == main_ctor) {
        bind_params(cf, *c, true);
      } else {
        if (!c->params.empty())
          unsupported("base constructor with parameters", c->pos);
        cf.scopes.emplace_back();
        cf.prefix = "base@" + std::to_string(++inline_count_) + ".";
      }
      line_ = c->pos.line;
      inline_stack_.push_back(c);
      run_modifiers(*c, 0, cf);
      inline_stack_.pop_back();
      for (auto &r : cf.returns)
        preds_.push_back(r);
    }
    frame_ = saved;
    end_function(fr);
  }

  void run_modifiers(const FunctionDecl &f, size_t i, Frame &fn_frame) {
    if (i == f.modifiers.size()) {
      Frame *saved = frame_;
      frame_ = &fn_frame;
      lower_stmt(**f.body);
      for (auto &r : fn_frame.returns)
        preds_.push_back(r);
      fn_frame.returns.clear();
      frame_ = saved;
      return;
    }
    const ModifierInvocation &mi = f.modifiers[i];
    auto it = flat_.mods.find(mi.name);
    if (it == flat_.mods.end()) {
      // base constructor invocation or unknown
      if (unit_.find(mi.name) && mi.args.empty()) {
        run_modifiers(f, i + 1, fn_frame);
        return;
      }
      if (unit_.find(mi.name))
        unsupported("base constructor arguments", mi.pos);
      throw UnknownIdentifier("unknown modifier '" + mi.name + "'");
    }
    const FunctionDecl &m = *it->second;
    if (m.params.size() != mi.args.size())
      throw Error("modifier '" + m.name + "' expects " + std::to_string(m.params.size()) + " arguments");
    Frame *saved = frame_;
    // arguments evaluate in the function's scope
    frame_ = &fn_frame;
    line_ = mi.pos.line;
    std::vector<Val> args;
    for (auto &a : mi.args)
      args.push_back(rv(a));
    Frame mf;
    mf.prefix = m.name + "@" + std::to_string(++inline_count_) + ".";
    frame_ = &mf;
    mf.scopes.emplace_back();
    for (size_t k = 0; k < m.params.size(); ++k) {
      std::string n = fresh_local(m.params[k].name);
      mf.scopes.back()[m.params[k].name] = {Operand::local(n), m.params[k].type};
      ir::Stmt s = mk(ir::Kind::Assign);
      s.dst = n;
      s.a = args[k].op;
      emit(s);
    }
    mf.placeholder = [this, &f, i, &fn_frame] { run_modifiers(f, i + 1, fn_frame); };
    lower_stmt(**m.body);
    for (auto &r : mf.returns)
      preds_.push_back(r);
    frame_ = saved;
  }

  Val inline_call(const FunctionDecl &f, const std::vector<Val> &args, Pos p) {
    for (auto *g : inline_stack_)
      if (g == &f)
        throw RecursionUnsupported("recursive call to '" + f.name + "' at line " + std::to_string(p.line));
    if (!f.body)
      throw UnknownIdentifier("function '" + f.name + "' has no body");
    if (f.params.size() != args.size())
      throw Error("call to '" + f.name + "' with " + std::to_string(args.size()) + " arguments at line " +
                  std::to_string(p.line));
    Frame fr;
    fr.prefix = f.name + "@" + std::to_string(++inline_count_) + ".";
    Frame *saved = frame_;
    frame_ = &fr;
    fr.scopes.emplace_back();
    for (size_t k = 0; k < f.params.size(); ++k) {
      std::string n = fresh_local(f.params[k].name.empty() ? "_" : f.params[k].name);
      fr.scopes.back()[f.params[k].name] = {Operand::local(n), f.params[k].type};
      ir::Stmt s = mk(ir::Kind::Assign);
      s.dst = n;
      s.a = args[k].op;
      emit(s);
    }
    declare_named_returns(fr, f);
    if (fr.ret_local.empty() && !f.returns.empty()) {
      fr.ret_local = fresh_local("$ret");
      ir::Stmt s = mk(ir::Kind::Assign);
      s.dst = fr.ret_local;
      s.a = Operand::cnst("0");
      emit(s);
    }
    inline_stack_.push_back(&f);
    run_modifiers(f, 0, fr);
    inline_stack_.pop_back();
    frame_ = saved;
    Val v;
    if (!fr.ret_local.empty()) {
      v.op = Operand::local(fr.ret_local);
      v.type = f.returns.empty() ? uint_t() : f.returns[0].type;
    }
    return v;
  }

  // ---- statements ----

  void lower_stmt(const Stmt &s) {
    line_ = s.pos.line;
    switch (s.kind) {
    case StmtKind::Block:
      frame_->scopes.emplace_back();
      for (auto &b : s.body)
        lower_stmt(*b);
      frame_->scopes.pop_back();
      break;
    case StmtKind::If: {
      Val c = rv(s.cond);
      ir::Stmt b = mk(ir::Kind::Branch);
      b.a = c.op;
      int id = emit(b);
      preds_ = {{id, 0}};
      scoped(*s.body[0]);
      auto then_preds = preds_;
      preds_ = {{id, 1}};
      if (s.body.size() > 1)
        scoped(*s.body[1]);
      preds_.insert(preds_.end(), then_preds.begin(), then_preds.end());
      break;
    }
    case StmtKind::While:
      loop(s.cond, nullptr, *s.body[0]);
      break;
    case StmtKind::For:
      frame_->scopes.emplace_back();
      if (s.body[0])
        lower_stmt(*s.body[0]);
      line_ = s.pos.line;
      loop(s.cond, s.step, *s.body[1]);
      frame_->scopes.pop_back();
      break;
    case StmtKind::Return: {
      ir::Stmt r = mk(ir::Kind::Return);
      if (s.value) {
        Val v = rv(s.value);
        r.a = v.op;
        if (!frame_->ret_local.empty()) {
          ir::Stmt a = mk(ir::Kind::Assign);
          a.dst = frame_->ret_local;
          a.a = v.op;
          emit(a);
        }
      }
      emit(r);
      frame_->returns.insert(frame_->returns.end(), preds_.begin(), preds_.end());
      preds_.clear();
      break;
    }
    case StmtKind::VarDecl: {
      if (!is_leaf(s.var_type) || s.var_type->kind == Type::Kind::Mapping)
        unsupported("local variable of struct, array or mapping type", s.pos);
      std::string n = fresh_local(s.name);
      if (s.value) {
        Val v = rv(s.value);
        assign_local(n, v.op);
      } else {
        ir::Stmt a = mk(ir::Kind::Assign);
        a.dst = n;
        a.a = Operand::cnst("0");
        emit(a);
      }
      frame_->scopes.back()[s.name] = {Operand::local(n), s.var_type};
      break;
    }
    case StmtKind::ExprStmt:
      rv(s.value, true);
      break;
    case StmtKind::Placeholder:
      if (!frame_->placeholder)
        unsupported("'_' outside a modifier", s.pos);
      {
        auto ph = frame_->placeholder;
        Frame *saved = frame_;
        ph();
        frame_ = saved;
      }
      break;
    case StmtKind::Break:
    case StmtKind::Continue: {
      if (frame_->loops.empty())
        unsupported("break/continue outside a loop", s.pos);
      emit(mk(ir::Kind::Goto));
      auto &l = frame_->loops.back();
      auto &dst = s.kind == StmtKind::Break ? l.breaks : l.continues;
      dst.insert(dst.end(), preds_.begin(), preds_.end());
      preds_.clear();
      break;
    }
    case StmtKind::Emit:
      emit(mk(ir::Kind::Nop));
      break;
    case StmtKind::Throw: {
      ir::Stmt r = mk(ir::Kind::Require);
      r.a = Operand::cnst("0");
      emit(r);
      break;
    }
    }
  }

  void scoped(const Stmt &s) {
    frame_->scopes.emplace_back();
    lower_stmt(s);
    frame_->scopes.pop_back();
  }

  void loop(const ExprPtr &cond, const ExprPtr &step, const Stmt &body) {
    int head = emit(mk(ir::Kind::Nop));
    Val c = cond ? rv(cond) : Val{Operand::cnst("1"), bool_t()};
    ir::Stmt b = mk(ir::Kind::Branch);
    b.a = c.op;
    int br = emit(b);
    preds_ = {{br, 0}};
    frame_->loops.emplace_back();
    scoped(body);
    LoopCtx l = std::move(frame_->loops.back());
    frame_->loops.pop_back();
    preds_.insert(preds_.end(), l.continues.begin(), l.continues.end());
    if (step)
      rv(step, true);
    link(preds_, head);
    preds_ = {{br, 1}};
    preds_.insert(preds_.end(), l.breaks.begin(), l.breaks.end());
  }

  // ---- lvalues ----

  const LocalInfo *find_local(const std::string &n) const {
    for (auto it = frame_->scopes.rbegin(); it != frame_->scopes.rend(); ++it)
      if (auto f = it->find(n); f != it->end())
        return &f->second;
    return nullptr;
  }

  std::optional<LRef> try_lref(const ExprPtr &e) {
    switch (e->kind) {
    case ExprKind::Ident: {
      if (auto *l = find_local(e->text))
        return LRef{false, l->op.name, {}, l->type};
      if (auto it = state_types_.find(e->text); it != state_types_.end())
        return LRef{true, e->text, {}, it->second};
      return std::nullopt;
    }
    case ExprKind::Index: {
      auto base = try_lref(e->args[0]);
      if (!base || !base->storage)
        return std::nullopt;
      if (base->type->kind != Type::Kind::Mapping && base->type->kind != Type::Kind::Array)
        return std::nullopt;
      Val k = rv(e->args[1]);
      base->keys.push_back(k.op);
      base->type = base->type->value;
      return base;
    }
    case ExprKind::Member: {
      auto base = try_lref(e->args[0]);
      if (!base || !base->storage)
        return std::nullopt;
      if (base->type->kind == Type::Kind::Array && e->text == "length") {
        if (base->type->size) {
          base->fixed_array_len = true;
          base->name = std::to_string(*base->type->size);
        } else {
          base->name += ".length";
        }
        base->type = uint_t();
        return base;
      }
      if (!is_struct(base->type))
        return std::nullopt;
      const StructDecl *sd = flat_.structs.at(base->type->name);
      for (auto &f : sd->fields)
        if (f.name == e->text) {
          base->name += "." + f.name;
          base->type = f.type;
          return base;
        }
      throw UnknownIdentifier("struct " + sd->name + " has no field '" + e->text + "'");
    }
    default:
      return std::nullopt;
    }
  }

  LRef lref(const ExprPtr &e) {
    auto r = try_lref(e);
    if (!r) {
      if (e->kind == ExprKind::Ident)
        throw UnknownIdentifier("unknown identifier '" + e->text + "' at line " + std::to_string(e->pos.line));
      unsupported("assignment target", e->pos);
    }
    if (r->fixed_array_len)
      unsupported("assignment to fixed array length", e->pos);
    return *r;
  }

  Operand load(const LRef &r, Pos p) {
    if (!r.storage)
      return Operand::local(r.name);
    if (r.fixed_array_len)
      return Operand::cnst(r.name);
    if (!is_leaf(r.type))
      unsupported("non-scalar storage value", p);
    ir::Stmt s = mk(ir::Kind::Load);
    s.var = r.name;
    s.keys = r.keys;
    return assign_tmp(s);
  }

  void store(const LRef &r, const Operand &v) {
    if (!r.storage) {
      assign_local(r.name, v);
      return;
    }
    ir::Stmt s = mk(ir::Kind::Store);
    s.var = r.name;
    s.keys = r.keys;
    s.a = v;
    emit(s);
  }

  // x := v, folding into the defining statement of a fresh temp
  void assign_local(const std::string &name, const Operand &v) {
    if (v.kind == Operand::Kind::Local && v.name.rfind("$t", 0) == 0 && !prog_.stmts.empty()) {
      ir::Stmt &last = prog_.stmts.back();
      if (last.func == cur_func_ && last.dst == v.name && last.kind != ir::Kind::Assign) {
        last.dst = name;
        return;
      }
    }
    ir::Stmt s = mk(ir::Kind::Assign);
    s.dst = name;
    s.a = v;
    emit(s);
  }

  void zero_out(const LRef &r, Pos p) {
    if (is_leaf(r.type)) {
      store(r, Operand::cnst("0"));
      return;
    }
    if (is_struct(r.type)) {
      for (auto &f : flat_.structs.at(r.type->name)->fields) {
        LRef sub = r;
        sub.name += "." + f.name;
        sub.type = f.type;
        zero_out(sub, p);
      }
      return;
    }
    unsupported("delete of mapping or array", p);
  }

  // ---- expressions ----

  static std::string binop_for(const std::string &assign_op) { return assign_op.substr(0, assign_op.size() - 1); }

  static bool is_cmp(const std::string &op) {
    return op == "==" || op == "!=" || op == "<" || op == ">" || op == "<=" || op == ">=" || op == "&&" ||
           op == "||";
  }

  Val binary(const std::string &op, const Val &a, const Val &b) {
    if (op == "**") {
      if (a.op.kind == Operand::Kind::Const && b.op.kind == Operand::Kind::Const) {
        cpp_int base(a.op.name), r = 1;
        unsigned long ex = static_cast<unsigned long>(cpp_int(b.op.name));
        cpp_int mod = cpp_int(1) << 256;
        for (unsigned long i = 0; i < ex && i < 1024; ++i)
          r = (r * base) % mod;
        return {Operand::cnst(r.str()), uint_t()};
      }
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "pow";
      h.note_args = {a.op, b.op};
      return {assign_tmp(h), uint_t()};
    }
    ir::Stmt s = mk(ir::Kind::Binary);
    s.op = op;
    s.a = a.op;
    s.b = b.op;
    return {assign_tmp(s), is_cmp(op) ? bool_t() : (a.type ? a.type : uint_t())};
  }

  Val rv(const ExprPtr &e, bool discard = false) {
    switch (e->kind) {
    case ExprKind::Number:
      return {Operand::cnst(e->text), uint_t()};
    case ExprKind::Bool:
      return {Operand::cnst(e->text == "true" ? "1" : "0"), bool_t()};
    case ExprKind::String:
      return {Operand::str(e->text), elem(Type::Kind::String)};
    case ExprKind::Ident:
      return ident(e);
    case ExprKind::Member:
      return member(e);
    case ExprKind::Index: {
      if (auto r = try_lref(e))
        return {load(*r, e->pos), r->type};
      Val b = rv(e->args[0]);
      Val k = rv(e->args[1]);
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "index";
      h.note_args = {b.op, k.op};
      return {assign_tmp(h), uint_t()};
    }
    case ExprKind::Unary:
      return unary(e);
    case ExprKind::Binary: {
      Val a = rv(e->args[0]);
      Val b = rv(e->args[1]);
      return binary(e->text, a, b);
    }
    case ExprKind::Ternary: {
      Val c = rv(e->args[0]);
      ir::Stmt b = mk(ir::Kind::Branch);
      b.a = c.op;
      int id = emit(b);
      std::string t = fresh_tmp();
      preds_ = {{id, 0}};
      Val x = rv(e->args[1]);
      ir::Stmt ax = mk(ir::Kind::Assign);
      ax.dst = t;
      ax.a = x.op;
      emit(ax);
      auto then_preds = preds_;
      preds_ = {{id, 1}};
      Val y = rv(e->args[2]);
      ir::Stmt ay = mk(ir::Kind::Assign);
      ay.dst = t;
      ay.a = y.op;
      emit(ay);
      preds_.insert(preds_.end(), then_preds.begin(), then_preds.end());
      return {Operand::local(t), x.type};
    }
    case ExprKind::Assign: {
      LRef r = lref(e->args[0]);
      Val v = rv(e->args[1]);
      if (e->text != "=") {
        Val cur{load(r, e->pos), r.type};
        v = binary(binop_for(e->text), cur, v);
      }
      store(r, v.op);
      return {r.storage ? v.op : Operand::local(r.name), r.type};
    }
    case ExprKind::IncDec: {
      LRef r = lref(e->args[0]);
      Val cur{load(r, e->pos), r.type};
      if (!discard && !r.storage) {
        // keep the old value alive for the caller
        ir::Stmt a = mk(ir::Kind::Assign);
        a.dst = fresh_tmp();
        a.a = cur.op;
        emit(a);
        cur.op = Operand::local(a.dst);
      }
      Val n = binary(e->text == "++" ? "+" : "-", cur, {Operand::cnst("1"), uint_t()});
      store(r, n.op);
      return cur;
    }
    case ExprKind::Call:
      return call(e, discard);
    case ExprKind::New:
      unsupported("'new' without constructor call", e->pos);
    case ExprKind::TypeExpr:
      unsupported("type used as value", e->pos);
    }
    unsupported("expression", e->pos);
  }

  Val ident(const ExprPtr &e) {
    const std::string &n = e->text;
    if (auto *l = find_local(n))
      return {l->op, l->type};
    if (auto it = constants_.find(n); it != constants_.end())
      return rv(it->second);
    if (auto it = state_types_.find(n); it != state_types_.end()) {
      LRef r{true, n, {}, it->second};
      return {load(r, e->pos), r.type};
    }
    if (n == "now")
      return {Operand::env("block.timestamp"), uint_t()};
    if (n == "this")
      return {Operand::env("this"), named_t(flat_.main->name)};
    throw UnknownIdentifier("unknown identifier '" + n + "' at line " + std::to_string(e->pos.line));
  }

  bool is_this(const ExprPtr &e) const {
    if (e->kind == ExprKind::Ident && e->text == "this" && !find_local("this"))
      return true;
    if (e->kind == ExprKind::Call && e->args.size() == 2 && e->args[0]->kind == ExprKind::TypeExpr)
      return is_this(e->args[1]);
    return false;
  }

  Val member(const ExprPtr &e) {
    const ExprPtr &base = e->args[0];
    if (base->kind == ExprKind::Ident && !find_local(base->text) && !state_types_.count(base->text)) {
      const std::string &b = base->text;
      if (b == "msg" || b == "tx" || b == "block") {
        std::string n = b + "." + e->text;
        if (n == "msg.sender" || n == "tx.origin" || n == "block.coinbase")
          return {Operand::env(n), addr_t()};
        return {Operand::env(n), uint_t()};
      }
    }
    if (e->text == "balance") {
      if (is_this(base))
        return {Operand::env("this.balance"), uint_t()};
      Val b = rv(base);
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "balance";
      h.note_args = {b.op};
      return {assign_tmp(h), uint_t()};
    }
    if (auto r = try_lref(e))
      return {load(*r, e->pos), r->type};
    Val b = rv(base);
    if (e->text == "length") {
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "length";
      h.note_args = {b.op};
      return {assign_tmp(h), uint_t()};
    }
    unsupported("member access '." + e->text + "'", e->pos);
  }

  Val unary(const ExprPtr &e) {
    const std::string &op = e->text;
    if (op == "delete") {
      LRef r = lref(e->args[0]);
      zero_out(r, e->pos);
      return {Operand::cnst("0"), uint_t()};
    }
    if (op == "++" || op == "--") {
      LRef r = lref(e->args[0]);
      Val cur{load(r, e->pos), r.type};
      Val n = binary(op == "++" ? "+" : "-", cur, {Operand::cnst("1"), uint_t()});
      store(r, n.op);
      return {r.storage ? n.op : Operand::local(r.name), r.type};
    }
    Val a = rv(e->args[0]);
    if (op == "-" && a.op.kind == Operand::Kind::Const) {
      cpp_int mod = cpp_int(1) << 256;
      cpp_int v(a.op.name);
      return {Operand::cnst(cpp_int((mod - v) % mod).str()), a.type};
    }
    ir::Stmt s = mk(ir::Kind::Unary);
    s.op = op;
    s.a = a.op;
    return {assign_tmp(s), op == "!" ? bool_t() : a.type};
  }

  // literal function signature carried by a call payload, if any
  static std::string payload_sig(const std::vector<ExprPtr> &args) {
    if (args.empty())
      return "";
    std::function<std::string(const ExprPtr &)> sig = [&](const ExprPtr &e) -> std::string {
      if (e->kind == ExprKind::String)
        return e->text;
      if (e->kind == ExprKind::Call && e->args.size() >= 2) {
        const ExprPtr &c = e->args[0];
        if (c->kind == ExprKind::Member && c->args[0]->kind == ExprKind::Ident && c->args[0]->text == "abi" &&
            (c->text == "encodeWithSignature" || c->text == "encodeWithSelector"))
          return sig(e->args[1]);
        if (c->kind == ExprKind::TypeExpr)
          return sig(e->args[1]);
        if (c->kind == ExprKind::Ident && (c->text == "keccak256" || c->text == "sha3"))
          return sig(e->args[1]);
      }
      return "";
    };
    return sig(args[0]);
  }

  std::vector<Operand> lower_args(const std::vector<ExprPtr> &args, size_t from) {
    std::vector<Operand> out;
    for (size_t i = from; i < args.size(); ++i)
      out.push_back(rv(args[i]).op);
    return out;
  }

  const ContractDecl *contract_named(const std::string &n) const {
    if (find_local(n) || state_types_.count(n))
      return nullptr;
    return unit_.find(n);
  }

  const FunctionDecl *library_function(const std::string &name) const {
    for (auto &c : unit_.contracts)
      if (c.kind == ContractDecl::Kind::Library)
        for (auto &f : c.functions)
          if (f.name == name && f.body)
            return &f;
    return nullptr;
  }

  bool addressish(const TypePtr &t) const {
    return !t || t->kind == Type::Kind::Address ||
           (t->kind == Type::Kind::Named && unit_.find(t->name) &&
            unit_.find(t->name)->kind != ContractDecl::Kind::Library);
  }

  Val call(const ExprPtr &e, bool discard) {
    ExprPtr callee = e->args[0];
    ExprPtr value_expr = e->call_value;
    // peel legacy .value(v) / .gas(g)
    while (callee->kind == ExprKind::Call && callee->args.size() == 2 && callee->args[0]->kind == ExprKind::Member &&
           (callee->args[0]->text == "value" || callee->args[0]->text == "gas")) {
      if (callee->args[0]->text == "value")
        value_expr = callee->args[1];
      if (callee->call_value && !value_expr)
        value_expr = callee->call_value;
      callee = callee->args[0]->args[0];
    }
    std::vector<ExprPtr> args(e->args.begin() + 1, e->args.end());

    switch (callee->kind) {
    case ExprKind::Member:
      return member_call(e, callee, args, value_expr, discard);
    case ExprKind::Ident:
      return named_call(e, callee, args);
    case ExprKind::TypeExpr: {
      if (args.size() != 1)
        unsupported("type conversion arity", e->pos);
      if (is_this(args[0]))
        return {Operand::env("this"), callee->type};
      Val v = rv(args[0]);
      return {v.op, callee->type};
    }
    case ExprKind::New: {
      if (!unit_.find(callee->text))
        throw UnknownIdentifier("unknown contract '" + callee->text + "'");
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "new " + callee->text;
      h.note_args = lower_args(args, 0);
      return {assign_tmp(h), named_t(callee->text)};
    }
    default:
      unsupported("call target", e->pos);
    }
  }

  Val ext(ir::ExtKind k, Val dest, std::vector<Operand> args, Operand value, const std::string &method,
          const std::string &data, TypePtr result) {
    ir::Stmt s = mk(ir::Kind::ExtCall);
    s.ext.kind = k;
    s.ext.dest = dest.op;
    s.ext.args = std::move(args);
    s.ext.value = value;
    s.ext.method = method;
    s.ext.data = data;
    if (k == ir::ExtKind::Transfer) {
      emit(s);
      return {Operand::cnst("0"), uint_t()};
    }
    return {assign_tmp(s), result};
  }

  Val member_call(const ExprPtr &e, const ExprPtr &callee, const std::vector<ExprPtr> &args,
                  const ExprPtr &value_expr, bool) {
    const std::string &m = callee->text;
    const ExprPtr &base = callee->args[0];

    if (base->kind == ExprKind::Ident && base->text == "abi" && !find_local("abi")) {
      std::vector<Operand> ops = lower_args(args, 0);
      std::string sig = (m == "encodeWithSignature" || m == "encodeWithSelector") ? payload_sig(args) : "";
      if (!sig.empty())
        return {Operand::str(sig), elem(Type::Kind::Bytes)};
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = "abi." + m;
      h.note_args = ops;
      return {assign_tmp(h), elem(Type::Kind::Bytes)};
    }
    if (base->kind == ExprKind::Ident && base->text == "super")
      unsupported("super calls", e->pos);

    // library call `L.f(...)` or contract-qualified internal call
    if (base->kind == ExprKind::Ident) {
      if (const ContractDecl *c = contract_named(base->text)) {
        for (auto &f : c->functions)
          if (f.name == m && f.body) {
            std::vector<Val> vs;
            for (auto &a : args)
              vs.push_back(rv(a));
            return inline_call(f, vs, e->pos);
          }
        throw UnknownIdentifier("unknown function '" + base->text + "." + m + "'");
      }
    }

    if (m == "push") {
      auto r = try_lref(base);
      if (!r || !r->storage || r->type->kind != Type::Kind::Array || r->type->size)
        unsupported("push on non-storage array", e->pos);
      if (args.size() != 1)
        unsupported("push arity", e->pos);
      Val v = rv(args[0]);
      LRef len = *r;
      len.name += ".length";
      len.type = uint_t();
      Operand n = load(len, e->pos);
      LRef cell = *r;
      cell.keys.push_back(n);
      cell.type = r->type->value;
      store(cell, v.op);
      Val n1 = binary("+", {n, uint_t()}, {Operand::cnst("1"), uint_t()});
      store(len, n1.op);
      return {n1.op, uint_t()};
    }

    Val dest = rv(base);
    Operand value = value_expr ? rv(value_expr).op : Operand::none();
    if (m == "call" && addressish(dest.type))
      return ext(value.is_none() ? ir::ExtKind::Call : ir::ExtKind::CallValue, dest, lower_args(args, 0), value, "",
                 payload_sig(args), bool_t());
    if (m == "delegatecall" && addressish(dest.type)) {
      ir::Stmt s = mk(ir::Kind::DelegateCall);
      s.ext.dest = dest.op;
      s.ext.args = lower_args(args, 0);
      s.ext.data = payload_sig(args);
      return {assign_tmp(s), bool_t()};
    }
    bool contract_typed = dest.type && dest.type->kind == Type::Kind::Named;
    if (m == "transfer" && args.size() == 1 && !contract_typed) {
      Val amt = rv(args[0]);
      return ext(ir::ExtKind::Transfer, dest, {}, amt.op, "", "", uint_t());
    }
    if (m == "send" && args.size() == 1 && !contract_typed) {
      Val amt = rv(args[0]);
      return ext(ir::ExtKind::Send, dest, {}, amt.op, "", "", bool_t());
    }
    // `using L for T` style call on an elementary value
    if (!contract_typed && dest.type && dest.type->kind != Type::Kind::Address) {
      if (const FunctionDecl *lf = library_function(m)) {
        std::vector<Val> vs{dest};
        for (auto &a : args)
          vs.push_back(rv(a));
        return inline_call(*lf, vs, e->pos);
      }
    }
    if (addressish(dest.type)) {
      TypePtr rt = uint_t();
      if (contract_typed) {
        if (const ContractDecl *c = unit_.find(dest.type->name))
          for (auto &f : c->functions)
            if (f.name == m && !f.returns.empty())
              rt = f.returns[0].type;
      }
      return ext(ir::ExtKind::Method, dest, lower_args(args, 0), value, m, "", rt);
    }
    unsupported("call of member '" + m + "'", e->pos);
  }

  Val named_call(const ExprPtr &e, const ExprPtr &callee, const std::vector<ExprPtr> &args) {
    const std::string &n = callee->text;
    if (find_local(n) || state_types_.count(n))
      unsupported("call through variable '" + n + "'", e->pos);
    if (n == "require" || n == "assert") {
      if (args.empty())
        unsupported(n + " without condition", e->pos);
      Val c = rv(args[0]);
      ir::Stmt r = mk(ir::Kind::Require);
      r.a = c.op;
      emit(r);
      return {Operand::cnst("1"), bool_t()};
    }
    if (n == "revert") {
      ir::Stmt r = mk(ir::Kind::Require);
      r.a = Operand::cnst("0");
      emit(r);
      return {Operand::cnst("0"), bool_t()};
    }
    if (n == "selfdestruct" || n == "suicide") {
      if (args.size() != 1)
        unsupported(n + " arity", e->pos);
      Val d = rv(args[0]);
      ir::Stmt s = mk(ir::Kind::SelfDestruct);
      s.a = d.op;
      emit(s);
      return {Operand::cnst("0"), uint_t()};
    }
    static const std::set<std::string> opaque = {"keccak256", "sha3",    "sha256", "ripemd160", "ecrecover",
                                                 "blockhash", "gasleft", "addmod", "mulmod"};
    if (opaque.count(n)) {
      ir::Stmt h = mk(ir::Kind::Havoc);
      h.note = n;
      h.note_args = lower_args(args, 0);
      return {assign_tmp(h), n == "ecrecover" ? addr_t() : uint_t()};
    }
    if (auto it = flat_.funcs.find(n); it != flat_.funcs.end()) {
      std::vector<Val> vs;
      for (auto &a : args)
        vs.push_back(rv(a));
      return inline_call(*it->second, vs, e->pos);
    }
    if (flat_.events.count(n)) {
      lower_args(args, 0);
      emit(mk(ir::Kind::Nop));
      return {Operand::cnst("0"), uint_t()};
    }
    if (flat_.structs.count(n))
      unsupported("struct constructor '" + n + "'", e->pos);
    if (unit_.find(n)) {
      if (args.size() != 1)
        unsupported("contract conversion arity", e->pos);
      Val v = rv(args[0]);
      return {v.op, named_t(n)};
    }
    throw UnknownIdentifier("unknown function '" + n + "' at line " + std::to_string(e->pos.line));
  }
};

} // namespace

ir::Program lower(const SourceUnit &unit, const std::string &contract) {
  const ContractDecl *c = unit.find(contract);
  if (!c)
    throw UnknownIdentifier("unknown contract '" + contract + "'");
  Lowerer l(unit, *c);
  return l.run();
}

ir::Program lower(const SourceUnit &unit) {
  for (auto it = unit.contracts.rbegin(); it != unit.contracts.rend(); ++it)
    if (it->kind == ContractDecl::Kind::Contract)
      return lower(unit, it->name);
  throw Error("no deployable contract in unit");
}

std::vector<ir::Program> lower_all(const SourceUnit &unit) {
  std::vector<ir::Program> out;
  for (auto &c : unit.contracts)
    if (c.kind == ContractDecl::Kind::Contract)
      out.push_back(lower(unit, c.name));
  return out;
}

} // namespace stinc
