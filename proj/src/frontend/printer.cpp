#include <stinc/frontend/parser.hpp>

#include <sstream>

namespace stinc {

using namespace ast;

namespace {

std::string type_str(const TypePtr &t) {
  switch (t->kind) {
  case Type::Kind::Uint:
    return "uint" + std::to_string(t->bits);
  case Type::Kind::Int:
    return "int" + std::to_string(t->bits);
  case Type::Kind::Bool:
    return "bool";
  case Type::Kind::Address:
    return t->payable ? "address payable" : "address";
  case Type::Kind::Bytes:
    if (t->bits == 0)
      return "bytes";
    if (t->bits == 1)
      return "byte";
    return "bytes" + std::to_string(t->bits);
  case Type::Kind::String:
    return "string";
  case Type::Kind::Mapping:
    return "mapping(" + type_str(t->key) + " => " + type_str(t->value) + ")";
  case Type::Kind::Array:
    return type_str(t->value) + "[" + (t->size ? std::to_string(*t->size) : "") + "]";
  case Type::Kind::Named:
    return t->name;
  }
  return "?";
}

std::string quote(const std::string &s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      o.push_back('\\');
    o.push_back(c);
  }
  return o + "\"";
}

std::string expr_str(const ExprPtr &e) {
  switch (e->kind) {
  case ExprKind::Number:
  case ExprKind::Bool:
  case ExprKind::Ident:
    return e->text;
  case ExprKind::String:
    return quote(e->text);
  case ExprKind::Member:
    return expr_str(e->args[0]) + "." + e->text;
  case ExprKind::Index:
    return expr_str(e->args[0]) + "[" + expr_str(e->args[1]) + "]";
  case ExprKind::Call: {
    std::string s = expr_str(e->args[0]);
    if (e->call_value)
      s += "{value: " + expr_str(e->call_value) + "}";
    s += "(";
    for (size_t i = 1; i < e->args.size(); ++i)
      s += (i > 1 ? ", " : "") + expr_str(e->args[i]);
    return s + ")";
  }
  case ExprKind::Unary:
    return e->text + (e->text == "delete" ? " " : "") + "(" + expr_str(e->args[0]) + ")";
  case ExprKind::Binary:
    return "(" + expr_str(e->args[0]) + " " + e->text + " " + expr_str(e->args[1]) + ")";
  case ExprKind::Ternary:
    return "(" + expr_str(e->args[0]) + " ? " + expr_str(e->args[1]) + " : " + expr_str(e->args[2]) + ")";
  case ExprKind::Assign:
    return expr_str(e->args[0]) + " " + e->text + " " + expr_str(e->args[1]);
  case ExprKind::IncDec:
    return "(" + expr_str(e->args[0]) + ")" + e->text;
  case ExprKind::New:
    return "new " + e->text;
  case ExprKind::TypeExpr:
    return type_str(e->type);
  }
  return "?";
}

class Printer {
public:
  std::ostringstream out;

  void line(int depth, const std::string &s) { out << std::string(depth * 2, ' ') << s << "\n"; }

  std::string simple(const StmtPtr &s) {
    if (s->kind == StmtKind::VarDecl)
      return type_str(s->var_type) + " " + s->name + (s->value ? " = " + expr_str(s->value) : "") + ";";
    return expr_str(s->value) + ";";
  }

  void stmt(const StmtPtr &s, int d) {
    switch (s->kind) {
    case StmtKind::Block:
      line(d, "{");
      for (auto &b : s->body)
        stmt(b, d + 1);
      line(d, "}");
      break;
    case StmtKind::If:
      line(d, "if (" + expr_str(s->cond) + ")");
      stmt(s->body[0], d + 1);
      if (s->body.size() > 1) {
        line(d, "else");
        stmt(s->body[1], d + 1);
      }
      break;
    case StmtKind::While:
      line(d, "while (" + expr_str(s->cond) + ")");
      stmt(s->body[0], d + 1);
      break;
    case StmtKind::For: {
      std::string h = "for (";
      h += s->body[0] ? simple(s->body[0]) : ";";
      h += " " + (s->cond ? expr_str(s->cond) : std::string()) + "; ";
      h += (s->step ? expr_str(s->step) : std::string()) + ")";
      line(d, h);
      stmt(s->body[1], d + 1);
      break;
    }
    case StmtKind::Return:
      line(d, s->value ? "return " + expr_str(s->value) + ";" : "return;");
      break;
    case StmtKind::VarDecl:
    case StmtKind::ExprStmt:
      line(d, simple(s));
      break;
    case StmtKind::Placeholder:
      line(d, "_;");
      break;
    case StmtKind::Break:
      line(d, "break;");
      break;
    case StmtKind::Continue:
      line(d, "continue;");
      break;
    case StmtKind::Emit:
      line(d, "emit " + expr_str(s->value) + ";");
      break;
    case StmtKind::Throw:
      line(d, "throw;");
      break;
    }
  }

  static std::string params(const std::vector<Param> &ps) {
    std::string s = "(";
    for (size_t i = 0; i < ps.size(); ++i) {
      s += (i ? ", " : "") + type_str(ps[i].type);
      if (!ps[i].name.empty())
        s += " " + ps[i].name;
    }
    return s + ")";
  }

  static const char *vis(Visibility v) {
    switch (v) {
    case Visibility::Public:
      return "public";
    case Visibility::External:
      return "external";
    case Visibility::Internal:
      return "internal";
    case Visibility::Private:
      return "private";
    }
    return "";
  }

  void function(const FunctionDecl &f, int d) {
    std::string h;
    switch (f.kind) {
    case FunctionDecl::Kind::Function:
      h = "function " + f.name;
      break;
    case FunctionDecl::Kind::Constructor:
      h = "constructor";
      break;
    case FunctionDecl::Kind::Fallback:
      h = "fallback";
      break;
    case FunctionDecl::Kind::Modifier:
      h = "modifier " + f.name;
      break;
    }
    h += params(f.params);
    if (f.kind != FunctionDecl::Kind::Modifier) {
      h += std::string(" ") + vis(f.visibility);
      if (f.payable)
        h += " payable";
      if (!f.mutability.empty())
        h += " " + f.mutability;
      for (auto &m : f.modifiers) {
        h += " " + m.name + "(";
        for (size_t i = 0; i < m.args.size(); ++i)
          h += (i ? ", " : "") + expr_str(m.args[i]);
        h += ")";
      }
      if (!f.returns.empty())
        h += " returns " + params(f.returns);
    }
    if (!f.body) {
      line(d, h + ";");
      return;
    }
    line(d, h);
    stmt(*f.body, d);
  }
};

bool eq(const TypePtr &a, const TypePtr &b) {
  if (!a || !b)
    return !a && !b;
  return a->kind == b->kind && a->bits == b->bits && a->payable == b->payable && a->name == b->name &&
         a->size == b->size && eq(a->key, b->key) && eq(a->value, b->value);
}

bool eq(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b)
    return !a && !b;
  if (a->kind != b->kind || a->text != b->text || a->args.size() != b->args.size())
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!eq(a->args[i], b->args[i]))
      return false;
  return eq(a->call_value, b->call_value) && eq(a->type, b->type);
}

bool eq(const StmtPtr &a, const StmtPtr &b) {
  if (!a || !b)
    return !a && !b;
  if (a->kind != b->kind || a->name != b->name || a->body.size() != b->body.size())
    return false;
  for (size_t i = 0; i < a->body.size(); ++i)
    if (!eq(a->body[i], b->body[i]))
      return false;
  return eq(a->cond, b->cond) && eq(a->step, b->step) && eq(a->value, b->value) && eq(a->var_type, b->var_type);
}

bool eq(const std::vector<Param> &a, const std::vector<Param> &b) {
  if (a.size() != b.size())
    return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !eq(a[i].type, b[i].type))
      return false;
  return true;
}

bool eq(const FunctionDecl &a, const FunctionDecl &b) {
  if (a.kind != b.kind || a.name != b.name || !eq(a.params, b.params) || !eq(a.returns, b.returns) ||
      a.visibility != b.visibility || a.payable != b.payable || a.mutability != b.mutability ||
      a.modifiers.size() != b.modifiers.size() || a.body.has_value() != b.body.has_value())
    return false;
  for (size_t i = 0; i < a.modifiers.size(); ++i) {
    auto &x = a.modifiers[i], &y = b.modifiers[i];
    if (x.name != y.name || x.args.size() != y.args.size())
      return false;
    for (size_t j = 0; j < x.args.size(); ++j)
      if (!eq(x.args[j], y.args[j]))
        return false;
  }
  return !a.body || eq(*a.body, *b.body);
}

bool eq(const ContractDecl &a, const ContractDecl &b) {
  if (a.kind != b.kind || a.name != b.name || a.bases != b.bases || a.state_vars.size() != b.state_vars.size() ||
      a.structs.size() != b.structs.size() || a.functions.size() != b.functions.size() ||
      a.modifiers.size() != b.modifiers.size() || a.events != b.events)
    return false;
  for (size_t i = 0; i < a.state_vars.size(); ++i) {
    auto &x = a.state_vars[i], &y = b.state_vars[i];
    if (x.name != y.name || !eq(x.type, y.type) || x.visibility != y.visibility || x.constant != y.constant ||
        !eq(x.init, y.init))
      return false;
  }
  for (size_t i = 0; i < a.structs.size(); ++i)
    if (a.structs[i].name != b.structs[i].name || !eq(a.structs[i].fields, b.structs[i].fields))
      return false;
  for (size_t i = 0; i < a.functions.size(); ++i)
    if (!eq(a.functions[i], b.functions[i]))
      return false;
  for (size_t i = 0; i < a.modifiers.size(); ++i)
    if (!eq(a.modifiers[i], b.modifiers[i]))
      return false;
  return true;
}

} // namespace

bool ast::equal(const SourceUnit &a, const SourceUnit &b) {
  if (a.contracts.size() != b.contracts.size())
    return false;
  for (size_t i = 0; i < a.contracts.size(); ++i)
    if (!eq(a.contracts[i], b.contracts[i]))
      return false;
  return true;
}

std::string print_source(const SourceUnit &unit) {
  Printer p;
  for (auto &c : unit.contracts) {
    std::string h;
    switch (c.kind) {
    case ContractDecl::Kind::Contract:
      h = "contract ";
      break;
    case ContractDecl::Kind::Interface:
      h = "interface ";
      break;
    case ContractDecl::Kind::Library:
      h = "library ";
      break;
    }
    h += c.name;
    for (size_t i = 0; i < c.bases.size(); ++i)
      h += (i ? ", " : " is ") + c.bases[i];
    p.line(0, h + " {");
    for (auto &e : c.events)
      p.line(1, "event " + e + "();");
    for (auto &s : c.structs) {
      p.line(1, "struct " + s.name + " {");
      for (auto &f : s.fields)
        p.line(2, type_str(f.type) + " " + f.name + ";");
      p.line(1, "}");
    }
    for (auto &v : c.state_vars) {
      std::string s = type_str(v.type) + " " + Printer::vis(v.visibility);
      if (v.constant)
        s += " constant";
      s += " " + v.name;
      if (v.init)
        s += " = " + expr_str(v.init);
      p.line(1, s + ";");
    }
    for (auto &m : c.modifiers)
      p.function(m, 1);
    for (auto &f : c.functions)
      p.function(f, 1);
    p.line(0, "}");
  }
  return p.out.str();
}

} // namespace stinc
