#include <stinc/error.hpp>
#include <stinc/frontend/parser.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <map>
#include <set>

namespace stinc {

using namespace ast;

namespace {

using boost::multiprecision::cpp_int;

const std::map<std::string, cpp_int> &units() {
  static const std::map<std::string, cpp_int> u = {
      {"wei", 1},
      {"gwei", cpp_int(1000000000)},
      {"szabo", cpp_int("1000000000000")},
      {"finney", cpp_int("1000000000000000")},
      {"ether", cpp_int("1000000000000000000")},
      {"seconds", 1},
      {"minutes", 60},
      {"hours", 3600},
      {"days", 86400},
      {"weeks", 604800},
      {"years", 31536000},
  };
  return u;
}

cpp_int number_value(const Token &t) {
  std::string s;
  for (char c : t.text)
    if (c != '_')
      s.push_back(c);
  try {
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X'))
      return cpp_int(s);
    auto e = s.find_first_of("eE");
    if (e == std::string::npos)
      return cpp_int(s);
    cpp_int base(s.substr(0, e));
    int ex = std::stoi(s.substr(e + 1));
    for (int i = 0; i < ex; ++i)
      base *= 10;
    return base;
  } catch (const std::exception &) {
    throw SyntaxError(t.line, t.col, "malformed number '" + t.text + "'");
  }
}

bool is_elementary(const std::string &s) {
  if (s == "bool" || s == "address" || s == "string" || s == "byte" || s == "bytes" || s == "uint" ||
      s == "int")
    return true;
  auto digits_after = [&](size_t n) {
    if (s.size() <= n)
      return false;
    for (size_t i = n; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        return false;
    return true;
  };
  if (s.rfind("uint", 0) == 0)
    return digits_after(4);
  if (s.rfind("int", 0) == 0)
    return digits_after(3);
  if (s.rfind("bytes", 0) == 0)
    return digits_after(5);
  return false;
}

const std::set<std::string> kLocations = {"storage", "memory", "calldata"};

class Parser {
public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  SourceUnit unit() {
    SourceUnit u;
    while (!at_end()) {
      if (accept("pragma") || accept("import")) {
        skip_past(";");
        continue;
      }
      if (peek().text == "enum")
        unsupported("enum declarations");
      if (peek().text == "struct")
        unsupported("top-level struct declarations");
      u.contracts.push_back(contract());
    }
    return u;
  }

private:
  std::vector<Token> toks_;
  size_t p_ = 0;

  const Token &peek(size_t k = 0) const { return toks_[std::min(p_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  Pos pos() const { return {peek().line, peek().col}; }
  const Token &next() {
    const Token &t = peek();
    if (p_ < toks_.size() - 1)
      ++p_;
    return t;
  }
  bool is(const std::string &s, size_t k = 0) const {
    const Token &t = peek(k);
    return (t.kind == Token::Kind::Punct || t.kind == Token::Kind::Ident) && t.text == s;
  }
  bool accept(const std::string &s) {
    if (is(s)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.line, t.col, msg + ", got " + got);
  }
  [[noreturn]] void unsupported(const std::string &what) const {
    throw UnsupportedFeature(peek().line, peek().col, "unsupported: " + what);
  }
  void expect(const std::string &s) {
    if (!accept(s))
      fail("expected '" + s + "'");
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident)
      fail("expected identifier");
    return next().text;
  }
  void skip_past(const std::string &s) {
    while (!at_end() && !is(s))
      next();
    expect(s);
  }

  ContractDecl contract() {
    ContractDecl c;
    c.pos = pos();
    if (accept("contract") || accept("abstract")) {
      accept("contract");
      c.kind = ContractDecl::Kind::Contract;
    } else if (accept("interface")) {
      c.kind = ContractDecl::Kind::Interface;
    } else if (accept("library")) {
      c.kind = ContractDecl::Kind::Library;
    } else {
      fail("expected contract, interface or library");
    }
    c.name = ident();
    if (accept("is")) {
      do {
        c.bases.push_back(ident());
        if (is("("))
          unsupported("base constructor arguments");
      } while (accept(","));
    }
    expect("{");
    while (!accept("}")) {
      if (at_end())
        fail("expected '}'");
      member(c);
    }
    return c;
  }

  void member(ContractDecl &c) {
    if (is("enum"))
      unsupported("enum declarations");
    if (is("assembly"))
      unsupported("inline assembly");
    if (accept("event")) {
      c.events.push_back(ident());
      skip_past(";");
      return;
    }
    if (accept("using")) {
      skip_past(";");
      return;
    }
    if (is("struct")) {
      StructDecl s;
      s.pos = pos();
      next();
      s.name = ident();
      expect("{");
      while (!accept("}")) {
        Param f;
        f.type = type();
        f.name = ident();
        expect(";");
        s.fields.push_back(std::move(f));
      }
      c.structs.push_back(std::move(s));
      return;
    }
    if (is("modifier")) {
      FunctionDecl m;
      m.kind = FunctionDecl::Kind::Modifier;
      m.pos = pos();
      next();
      m.name = ident();
      if (is("("))
        m.params = params();
      while (accept("virtual") || accept("override")) {
      }
      m.body = block();
      c.modifiers.push_back(std::move(m));
      return;
    }
    if (is("function") || is("constructor") || is("fallback") || is("receive")) {
      c.functions.push_back(function(c.name));
      return;
    }
    state_var(c);
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    expect("(");
    if (accept(")"))
      return out;
    do {
      Param p;
      p.type = type();
      while (peek().kind == Token::Kind::Ident && (kLocations.count(peek().text) || peek().text == "indexed"))
        next();
      if (peek().kind == Token::Kind::Ident)
        p.name = next().text;
      out.push_back(std::move(p));
    } while (accept(","));
    expect(")");
    return out;
  }

  FunctionDecl function(const std::string &contract_name) {
    FunctionDecl f;
    f.pos = pos();
    if (accept("constructor")) {
      f.kind = FunctionDecl::Kind::Constructor;
    } else if (accept("fallback") || accept("receive")) {
      f.kind = FunctionDecl::Kind::Fallback;
    } else {
      expect("function");
      if (is("(")) {
        f.kind = FunctionDecl::Kind::Fallback;
      } else {
        f.name = ident();
        if (f.name == contract_name) {
          f.kind = FunctionDecl::Kind::Constructor;
          f.name.clear();
        }
      }
    }
    f.params = params();
    for (;;) {
      if (accept("public"))
        f.visibility = Visibility::Public;
      else if (accept("external"))
        f.visibility = Visibility::External;
      else if (accept("internal"))
        f.visibility = Visibility::Internal;
      else if (accept("private"))
        f.visibility = Visibility::Private;
      else if (accept("payable"))
        f.payable = true;
      else if (is("view") || is("pure") || is("constant"))
        f.mutability = next().text;
      else if (accept("virtual"))
        continue;
      else if (accept("override")) {
        if (is("("))
          skip_past(")");
      } else if (accept("returns"))
        f.returns = params();
      else if (peek().kind == Token::Kind::Ident) {
        ModifierInvocation m;
        m.pos = pos();
        m.name = next().text;
        if (accept("(")) {
          if (!accept(")")) {
            do
              m.args.push_back(expr());
            while (accept(","));
            expect(")");
          }
        }
        f.modifiers.push_back(std::move(m));
      } else
        break;
    }
    if (accept(";"))
      return f;
    f.body = block();
    return f;
  }

  void state_var(ContractDecl &c) {
    StateVarDecl v;
    v.pos = pos();
    v.type = type();
    for (;;) {
      if (accept("public"))
        v.visibility = Visibility::Public;
      else if (accept("private"))
        v.visibility = Visibility::Private;
      else if (accept("internal"))
        v.visibility = Visibility::Internal;
      else if (accept("constant") || accept("immutable"))
        v.constant = true;
      else if (accept("override"))
        continue;
      else
        break;
    }
    v.name = ident();
    if (accept("="))
      v.init = expr();
    expect(";");
    c.state_vars.push_back(std::move(v));
  }

  TypePtr type() {
    auto t = std::make_shared<Type>();
    if (accept("mapping")) {
      expect("(");
      t->kind = Type::Kind::Mapping;
      t->key = type();
      expect("=>");
      t->value = type();
      expect(")");
    } else {
      if (peek().kind != Token::Kind::Ident)
        fail("expected type");
      std::string n = next().text;
      if (n == "function")
        unsupported("function types");
      if (is_elementary(n)) {
        if (n == "bool") {
          t->kind = Type::Kind::Bool;
        } else if (n == "address") {
          t->kind = Type::Kind::Address;
          if (accept("payable"))
            t->payable = true;
        } else if (n == "string") {
          t->kind = Type::Kind::String;
        } else if (n == "byte") {
          t->kind = Type::Kind::Bytes;
          t->bits = 1;
        } else if (n.rfind("bytes", 0) == 0) {
          t->kind = Type::Kind::Bytes;
          t->bits = n.size() > 5 ? std::stoi(n.substr(5)) : 0;
        } else if (n.rfind("uint", 0) == 0) {
          t->kind = Type::Kind::Uint;
          t->bits = n.size() > 4 ? std::stoi(n.substr(4)) : 256;
        } else {
          t->kind = Type::Kind::Int;
          t->bits = n.size() > 3 ? std::stoi(n.substr(3)) : 256;
        }
      } else {
        t->kind = Type::Kind::Named;
        t->name = n;
        while (is(".") && peek(1).kind == Token::Kind::Ident) {
          next();
          t->name += "." + next().text;
        }
      }
    }
    while (is("[")) {
      next();
      auto a = std::make_shared<Type>();
      a->kind = Type::Kind::Array;
      a->value = t;
      if (!is("]")) {
        if (peek().kind != Token::Kind::Number)
          unsupported("non-literal array length");
        a->size = static_cast<unsigned>(number_value(next()));
      }
      expect("]");
      t = a;
    }
    return t;
  }

  // Speculatively decide whether a statement starts with a declaration.
  bool looks_like_decl() {
    const Token &t = peek();
    if (t.kind != Token::Kind::Ident)
      return false;
    if (t.text == "mapping" || is_elementary(t.text)) {
      // `address(x)` / `uint(x)` casts start expression statements
      return !is("(", 1);
    }
    size_t save = p_;
    bool ok = false;
    try {
      type();
      ok = peek().kind == Token::Kind::Ident;
    } catch (const SyntaxError &) {
      ok = false;
    }
    p_ = save;
    return ok;
  }

  StmtPtr block() {
    auto s = std::make_shared<Stmt>();
    s->kind = StmtKind::Block;
    s->pos = pos();
    expect("{");
    while (!accept("}")) {
      if (at_end())
        fail("expected '}'");
      s->body.push_back(statement());
    }
    return s;
  }

  StmtPtr statement() {
    auto s = std::make_shared<Stmt>();
    s->pos = pos();
    if (is("{"))
      return block();
    if (is("assembly"))
      unsupported("inline assembly");
    if (is("do"))
      unsupported("do-while loops");
    if (is("try"))
      unsupported("try/catch");
    if (is("unchecked"))
      unsupported("unchecked blocks");
    if (accept("if")) {
      s->kind = StmtKind::If;
      expect("(");
      s->cond = expr();
      expect(")");
      s->body.push_back(statement());
      if (accept("else"))
        s->body.push_back(statement());
      return s;
    }
    if (accept("while")) {
      s->kind = StmtKind::While;
      expect("(");
      s->cond = expr();
      expect(")");
      s->body.push_back(statement());
      return s;
    }
    if (accept("for")) {
      s->kind = StmtKind::For;
      expect("(");
      if (accept(";"))
        s->body.push_back(nullptr);
      else
        s->body.push_back(simple_statement());
      if (!is(";"))
        s->cond = expr();
      expect(";");
      if (!is(")"))
        s->step = expr();
      expect(")");
      s->body.push_back(statement());
      return s;
    }
    if (accept("return")) {
      s->kind = StmtKind::Return;
      if (!is(";"))
        s->value = expr();
      expect(";");
      return s;
    }
    if (accept("emit")) {
      s->kind = StmtKind::Emit;
      s->value = expr();
      expect(";");
      return s;
    }
    if (accept("break")) {
      s->kind = StmtKind::Break;
      expect(";");
      return s;
    }
    if (accept("continue")) {
      s->kind = StmtKind::Continue;
      expect(";");
      return s;
    }
    if (accept("throw")) {
      s->kind = StmtKind::Throw;
      expect(";");
      return s;
    }
    if (is("_") && is(";", 1)) {
      next();
      next();
      s->kind = StmtKind::Placeholder;
      return s;
    }
    return simple_statement();
  }

  // variable declaration or expression statement, including the `;`
  StmtPtr simple_statement() {
    auto s = std::make_shared<Stmt>();
    s->pos = pos();
    if (is("(") && looks_like_tuple_decl())
      unsupported("tuple declarations");
    if (is("var"))
      unsupported("'var' declarations");
    if (looks_like_decl()) {
      s->kind = StmtKind::VarDecl;
      s->var_type = type();
      while (peek().kind == Token::Kind::Ident && kLocations.count(peek().text))
        next();
      s->name = ident();
      if (accept("="))
        s->value = expr();
      expect(";");
      return s;
    }
    s->kind = StmtKind::ExprStmt;
    s->value = expr();
    expect(";");
    return s;
  }

  bool looks_like_tuple_decl() {
    // `(uint a, uint b) = ...`
    return peek(1).kind == Token::Kind::Ident && (is_elementary(peek(1).text) || peek(1).text == "mapping") &&
           peek(2).kind == Token::Kind::Ident;
  }

  ExprPtr mk(ExprKind k, Pos p, std::string text = {}, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->pos = p;
    e->text = std::move(text);
    e->args = std::move(args);
    return e;
  }

  ExprPtr expr() { return assignment(); }

  ExprPtr assignment() {
    ExprPtr lhs = ternary();
    static const std::set<std::string> ops = {"=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>="};
    if (peek().kind == Token::Kind::Punct && ops.count(peek().text)) {
      std::string op = next().text;
      ExprPtr rhs = assignment();
      return mk(ExprKind::Assign, lhs->pos, op, {lhs, rhs});
    }
    return lhs;
  }

  ExprPtr ternary() {
    ExprPtr c = binary(0);
    if (accept("?")) {
      ExprPtr a = assignment();
      expect(":");
      ExprPtr b = assignment();
      return mk(ExprKind::Ternary, c->pos, {}, {c, a, b});
    }
    return c;
  }

  static int prec(const std::string &op) {
    static const std::map<std::string, int> p = {
        {"||", 1}, {"&&", 2}, {"|", 3},  {"^", 4},  {"&", 5},  {"==", 6}, {"!=", 6},
        {"<", 7},  {">", 7},  {"<=", 7}, {">=", 7}, {"<<", 8}, {">>", 8}, {"+", 9},
        {"-", 9},  {"*", 10}, {"/", 10}, {"%", 10}, {"**", 11}};
    auto it = p.find(op);
    return it == p.end() ? -1 : it->second;
  }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = unary();
    for (;;) {
      if (peek().kind != Token::Kind::Punct)
        return lhs;
      std::string op = peek().text;
      int pr = prec(op);
      if (pr < 0 || pr < min_prec)
        return lhs;
      next();
      // `**` is right associative
      ExprPtr rhs = binary(op == "**" ? pr : pr + 1);
      lhs = mk(ExprKind::Binary, lhs->pos, op, {lhs, rhs});
    }
  }

  ExprPtr unary() {
    Pos p = pos();
    if (is("!") || is("-") || is("~") || is("++") || is("--")) {
      std::string op = next().text;
      return mk(ExprKind::Unary, p, op, {unary()});
    }
    if (accept("delete"))
      return mk(ExprKind::Unary, p, "delete", {unary()});
    return postfix(primary());
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      if (accept(".")) {
        std::string m = ident();
        e = mk(ExprKind::Member, e->pos, m, {e});
      } else if (accept("[")) {
        if (is("]"))
          unsupported("index-less type expressions");
        ExprPtr i = expr();
        expect("]");
        e = mk(ExprKind::Index, e->pos, {}, {e, i});
      } else if (is("{") && peek(1).kind == Token::Kind::Ident && is(":", 2)) {
        // call options, kept only for the immediately following call
        next();
        ExprPtr value;
        do {
          std::string k = ident();
          expect(":");
          ExprPtr v = expr();
          if (k == "value")
            value = v;
        } while (accept(","));
        expect("}");
        if (!is("("))
          fail("expected call after call options");
        ExprPtr c = call(e);
        c->call_value = value;
        e = c;
      } else if (is("(")) {
        e = call(e);
      } else if (is("++") || is("--")) {
        e = mk(ExprKind::IncDec, e->pos, next().text, {e});
      } else {
        return e;
      }
    }
  }

  ExprPtr call(ExprPtr callee) {
    expect("(");
    std::vector<ExprPtr> args{callee};
    if (!accept(")")) {
      if (is("{"))
        unsupported("named call arguments");
      do
        args.push_back(expr());
      while (accept(","));
      expect(")");
    }
    return mk(ExprKind::Call, callee->pos, {}, std::move(args));
  }

  ExprPtr primary() {
    Pos p = pos();
    const Token &t = peek();
    if (t.kind == Token::Kind::Number) {
      cpp_int v = number_value(next());
      if (peek().kind == Token::Kind::Ident && units().count(peek().text))
        v *= units().at(next().text);
      return mk(ExprKind::Number, p, v.str());
    }
    if (t.kind == Token::Kind::String) {
      std::string s = next().text;
      // adjacent literals concatenate
      while (peek().kind == Token::Kind::String)
        s += next().text;
      return mk(ExprKind::String, p, s);
    }
    if (accept("(")) {
      ExprPtr e = expr();
      if (is(","))
        unsupported("tuple expressions");
      expect(")");
      return e;
    }
    if (is("["))
      unsupported("inline array literals");
    if (t.kind != Token::Kind::Ident)
      fail("expected expression");
    if (t.text == "true" || t.text == "false")
      return mk(ExprKind::Bool, p, next().text);
    if (t.text == "new") {
      next();
      std::string name = ident();
      if (is("["))
        unsupported("array allocation");
      ExprPtr callee = mk(ExprKind::New, p, name);
      return callee;
    }
    if (t.text == "type" && is("(", 1))
      unsupported("type() expressions");
    if (is_elementary(t.text) || t.text == "payable") {
      if (t.text == "payable") {
        next();
        auto te = mk(ExprKind::TypeExpr, p);
        te->type = std::make_shared<Type>();
        te->type->kind = Type::Kind::Address;
        te->type->payable = true;
        return te;
      }
      auto te = mk(ExprKind::TypeExpr, p);
      te->type = type();
      return te;
    }
    return mk(ExprKind::Ident, p, next().text);
  }
};

} // namespace

ast::SourceUnit parse_source(std::string_view text) {
  Parser p(text);
  return p.unit();
}

} // namespace stinc
