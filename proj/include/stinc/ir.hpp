#pragma once

#include <optional>
#include <string>
#include <vector>

namespace stinc::ir {

// Operands never name storage directly; storage is only touched by Load and
// Store so that read/write facts fall out of the statement kind.
struct Operand {
  enum class Kind { None, Const, Str, Local, Param, Env };
  Kind kind = Kind::None;
  std::string name;  // Const: decimal value; Str: literal text; Env: msg.sender, msg.value, this.balance, this, ...

  static Operand none() { return {}; }
  static Operand cnst(std::string v) { return {Kind::Const, std::move(v)}; }
  static Operand str(std::string v) { return {Kind::Str, std::move(v)}; }
  static Operand local(std::string v) { return {Kind::Local, std::move(v)}; }
  static Operand param(std::string v) { return {Kind::Param, std::move(v)}; }
  static Operand env(std::string v) { return {Kind::Env, std::move(v)}; }

  bool is_none() const { return kind == Kind::None; }
  bool is_var() const { return kind == Kind::Local || kind == Kind::Param; }
  bool operator==(const Operand &) const = default;
};

std::string to_string(const Operand &o);

enum class ExtKind { Call, CallValue, Transfer, Send, Method };

struct ExtCall {
  ExtKind kind = ExtKind::Call;
  Operand dest;
  Operand value;               // None when no ether is attached
  std::vector<Operand> args;   // payload / method arguments
  std::string method;          // Method calls
  std::string data;            // literal payload signature when known, e.g. "init()"
};

enum class Kind {
  Entry,
  Exit,
  Assign,       // dst := a
  Unary,        // dst := op a
  Binary,       // dst := a op b
  Load,         // dst := var[keys]
  Store,        // var[keys] := a
  Branch,       // if a goto succ[0] else succ[1]
  Goto,
  Require,      // abort unless a
  Return,       // a optional; continues to the function exit
  ExtCall,      // dst optional := ext(...)
  DelegateCall, // dst optional := dest.delegatecall(args)
  SelfDestruct, // selfdestruct(a)
  Havoc,        // dst := unknown; note says why ("new C", "keccak256", ...)
  Nop,
};

const char *kind_name(Kind k);

struct Stmt {
  int id = -1;
  int func = -1;  // index into Program::funcs
  Kind kind = Kind::Nop;
  int line = 0;
  std::string dst;  // local written, "" if none
  Operand a, b;
  std::string op;
  std::string var;  // storage var for Load/Store
  std::vector<Operand> keys;
  ExtCall ext;      // ExtCall / DelegateCall (dest, args, data)
  std::string note;
  std::vector<Operand> note_args;  // Havoc for `new C(args)`
  std::vector<int> succ;           // Branch: [true, false]
};

struct StateVar {
  std::string name;
  int key_count = 0;         // >0 for mappings and arrays (collapsed collections)
  std::string value_type;    // "uint", "int", "bool", "address", "bytes", "string", or a contract name
  bool constant = false;
  int line = 0;
  bool is_collection() const { return key_count > 0; }
};

struct Function {
  enum class Kind { Public, Constructor, Fallback };
  std::string name;
  Kind kind = Kind::Public;
  bool payable = false;
  std::vector<std::string> params;
  int entry = -1;
  int exit = -1;
  std::vector<int> stmts;  // in emission order, entry first, exit last
  int line = 0;

  // constructors are not attacker-callable
  bool is_public() const { return kind != Kind::Constructor; }
};

struct Program {
  std::string name;
  std::vector<StateVar> vars;
  std::vector<Function> funcs;
  std::vector<Stmt> stmts;

  const StateVar *find_var(const std::string &n) const;
  int find_func(const std::string &n) const;
  int constructor() const;
  std::string node_name(int id) const;  // stable "func#index"
};

// Every operand read by the statement (a, b, keys, call parts, havoc args).
std::vector<Operand> operands(const Stmt &s);

// Deterministic text form, one statement per line.
std::string to_string(const Stmt &s);
std::string serialize(const Program &p);

} // namespace stinc::ir
