#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace stinc::ast {

struct Pos {
  int line = 0;
  int col = 0;
};

struct Type;
using TypePtr = std::shared_ptr<Type>;

// Semantic type of a declaration. `Named` covers struct, contract and
// interface names; which one it is gets resolved during lowering.
struct Type {
  enum class Kind { Uint, Int, Bool, Address, Bytes, String, Mapping, Array, Named };
  Kind kind = Kind::Uint;
  int bits = 256;            // uintN / intN / bytesN (0 = dynamic bytes)
  bool payable = false;      // address payable
  std::string name;          // Named
  TypePtr key;               // Mapping
  TypePtr value;             // Mapping value, Array element
  std::optional<unsigned> size;  // fixed array length; nullopt = dynamic
};

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

enum class ExprKind {
  Number,   // text = decimal digits of the literal value
  Bool,     // text = "true" / "false"
  String,   // text = literal contents
  Ident,    // text = name
  Member,   // args[0] . text
  Index,    // args[0] [ args[1] ]
  Call,     // args[0] ( args[1..] ); call_value = {value: ...} option
  Unary,    // text = op, args[0]
  Binary,   // text = op, args[0], args[1]
  Ternary,  // args[0] ? args[1] : args[2]
  Assign,   // text = "=", "+=", ... ; args[0] = lhs, args[1] = rhs
  IncDec,   // text = "++" / "--"; args[0]
  New,      // text = contract name; args = ctor args
  TypeExpr, // elementary type used as a cast callee; type holds it
};

struct Expr {
  ExprKind kind = ExprKind::Number;
  Pos pos;
  std::string text;
  std::vector<ExprPtr> args;
  ExprPtr call_value;  // Call only: `{value: e}` call option
  TypePtr type;        // TypeExpr only
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

enum class StmtKind {
  Block,       // body
  If,          // cond, body[0] then, body[1] optional else
  While,       // cond, body[0]
  For,         // body[0] init (optional, may be null), cond (optional), step (optional), body[1]
  Return,      // value optional
  VarDecl,     // var_type, name, value optional
  ExprStmt,    // value
  Placeholder, // `_;` inside modifiers
  Break,
  Continue,
  Emit,        // value = event call expression (ignored by lowering)
  Throw,       // `throw;` / `revert(...)` handled as ExprStmt; this is the legacy keyword
};

struct Stmt {
  StmtKind kind = StmtKind::Block;
  Pos pos;
  std::vector<StmtPtr> body;
  ExprPtr cond;
  ExprPtr step;
  ExprPtr value;
  TypePtr var_type;
  std::string name;
};

struct Param {
  TypePtr type;
  std::string name;  // may be empty for unnamed return values
};

enum class Visibility { Public, External, Internal, Private };

struct ModifierInvocation {
  std::string name;
  std::vector<ExprPtr> args;
  Pos pos;
};

struct FunctionDecl {
  enum class Kind { Function, Constructor, Fallback, Modifier };
  Kind kind = Kind::Function;
  std::string name;
  Pos pos;
  std::vector<Param> params;
  std::vector<Param> returns;
  Visibility visibility = Visibility::Public;
  bool payable = false;
  std::string mutability;  // "", "view", "pure", "constant"
  std::vector<ModifierInvocation> modifiers;
  std::optional<StmtPtr> body;  // absent for interface declarations
};

struct StateVarDecl {
  std::string name;
  TypePtr type;
  Visibility visibility = Visibility::Internal;
  bool constant = false;
  ExprPtr init;
  Pos pos;
};

struct StructDecl {
  std::string name;
  std::vector<Param> fields;
  Pos pos;
};

struct ContractDecl {
  enum class Kind { Contract, Interface, Library };
  Kind kind = Kind::Contract;
  std::string name;
  std::vector<std::string> bases;
  std::vector<StateVarDecl> state_vars;
  std::vector<StructDecl> structs;
  std::vector<FunctionDecl> functions;  // includes constructor / fallback
  std::vector<FunctionDecl> modifiers;
  std::vector<std::string> events;  // names only, arguments are dropped
  Pos pos;
};

struct SourceUnit {
  std::vector<ContractDecl> contracts;

  const ContractDecl *find(const std::string &name) const {
    for (const auto &c : contracts)
      if (c.name == name)
        return &c;
    return nullptr;
  }
};

// Structural equality ignoring source positions.
bool equal(const SourceUnit &a, const SourceUnit &b);

} // namespace stinc::ast
