#include <stinc/ir.hpp>

#include <sstream>

namespace stinc::ir {

std::string to_string(const Operand &o) {
  switch (o.kind) {
  case Operand::Kind::None:
    return "_";
  case Operand::Kind::Const:
    return o.name;
  case Operand::Kind::Str:
    return "\"" + o.name + "\"";
  case Operand::Kind::Local:
    return o.name;
  case Operand::Kind::Param:
    return "%" + o.name;
  case Operand::Kind::Env:
    return "$" + o.name;
  }
  return "?";
}

const char *kind_name(Kind k) {
  switch (k) {
  case Kind::Entry: return "entry";
  case Kind::Exit: return "exit";
  case Kind::Assign: return "assign";
  case Kind::Unary: return "unop";
  case Kind::Binary: return "binop";
  case Kind::Load: return "load";
  case Kind::Store: return "store";
  case Kind::Branch: return "if-goto";
  case Kind::Goto: return "goto";
  case Kind::Require: return "require";
  case Kind::Return: return "return";
  case Kind::ExtCall: return "extcall";
  case Kind::DelegateCall: return "delegatecall";
  case Kind::SelfDestruct: return "selfdestruct";
  case Kind::Havoc: return "havoc";
  case Kind::Nop: return "nop";
  }
  return "?";
}

static const char *ext_name(ExtKind k) {
  switch (k) {
  case ExtKind::Call: return "call";
  case ExtKind::CallValue: return "call.value";
  case ExtKind::Transfer: return "transfer";
  case ExtKind::Send: return "send";
  case ExtKind::Method: return "method";
  }
  return "?";
}

static std::string keys_str(const std::vector<Operand> &ks) {
  std::string s;
  for (auto &k : ks)
    s += "[" + to_string(k) + "]";
  return s;
}

static std::string args_str(const std::vector<Operand> &as) {
  std::string s = "(";
  for (size_t i = 0; i < as.size(); ++i)
    s += (i ? ", " : "") + to_string(as[i]);
  return s + ")";
}

std::string to_string(const Stmt &s) {
  std::ostringstream o;
  o << "#" << s.id << " L" << s.line << " ";
  std::string lhs = s.dst.empty() ? "" : s.dst + " := ";
  switch (s.kind) {
  case Kind::Entry:
  case Kind::Exit:
  case Kind::Goto:
  case Kind::Nop:
    o << kind_name(s.kind);
    break;
  case Kind::Assign:
    o << lhs << to_string(s.a);
    break;
  case Kind::Unary:
    o << lhs << s.op << " " << to_string(s.a);
    break;
  case Kind::Binary:
    o << lhs << to_string(s.a) << " " << s.op << " " << to_string(s.b);
    break;
  case Kind::Load:
    o << lhs << "@" << s.var << keys_str(s.keys);
    break;
  case Kind::Store:
    o << "@" << s.var << keys_str(s.keys) << " := " << to_string(s.a);
    break;
  case Kind::Branch:
    o << "if " << to_string(s.a);
    break;
  case Kind::Require:
    o << "require " << to_string(s.a);
    break;
  case Kind::Return:
    o << "return " << to_string(s.a);
    break;
  case Kind::ExtCall:
    o << lhs << ext_name(s.ext.kind) << " " << to_string(s.ext.dest);
    if (!s.ext.method.empty())
      o << "." << s.ext.method;
    if (!s.ext.value.is_none())
      o << " value=" << to_string(s.ext.value);
    o << args_str(s.ext.args);
    break;
  case Kind::DelegateCall:
    o << lhs << "delegatecall " << to_string(s.ext.dest) << args_str(s.ext.args);
    break;
  case Kind::SelfDestruct:
    o << "selfdestruct " << to_string(s.a);
    break;
  case Kind::Havoc:
    o << lhs << "havoc " << s.note << args_str(s.note_args);
    break;
  }
  o << " ->";
  for (int n : s.succ)
    o << " " << n;
  return o.str();
}

std::vector<Operand> operands(const Stmt &s) {
  std::vector<Operand> out;
  auto add = [&](const Operand &o) {
    if (!o.is_none())
      out.push_back(o);
  };
  add(s.a);
  add(s.b);
  for (auto &k : s.keys)
    add(k);
  if (s.kind == Kind::ExtCall || s.kind == Kind::DelegateCall) {
    add(s.ext.dest);
    add(s.ext.value);
    for (auto &x : s.ext.args)
      add(x);
  }
  for (auto &x : s.note_args)
    add(x);
  return out;
}

const StateVar *Program::find_var(const std::string &n) const {
  for (auto &v : vars)
    if (v.name == n)
      return &v;
  return nullptr;
}

int Program::find_func(const std::string &n) const {
  for (size_t i = 0; i < funcs.size(); ++i)
    if (funcs[i].name == n)
      return static_cast<int>(i);
  return -1;
}

int Program::constructor() const {
  for (size_t i = 0; i < funcs.size(); ++i)
    if (funcs[i].kind == Function::Kind::Constructor)
      return static_cast<int>(i);
  return -1;
}

std::string Program::node_name(int id) const {
  const Stmt &s = stmts.at(id);
  const Function &f = funcs.at(s.func);
  for (size_t i = 0; i < f.stmts.size(); ++i)
    if (f.stmts[i] == id)
      return f.name + "#" + std::to_string(i);
  return f.name + "#?";
}

std::string serialize(const Program &p) {
  std::ostringstream o;
  o << "contract " << p.name << "\n";
  for (auto &v : p.vars)
    o << "  var " << v.name << " keys=" << v.key_count << " : " << v.value_type << (v.constant ? " const" : "")
      << "\n";
  for (auto &f : p.funcs) {
    o << "  func " << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i)
      o << (i ? ", " : "") << f.params[i];
    o << ")";
    if (f.kind == Function::Kind::Constructor)
      o << " constructor";
    if (f.payable)
      o << " payable";
    o << "\n";
    for (int id : f.stmts)
      o << "    " << to_string(p.stmts[id]) << "\n";
  }
  return o.str();
}

} // namespace stinc::ir
