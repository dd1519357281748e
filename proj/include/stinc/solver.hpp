#pragma once

#include <stinc/term.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <string>

namespace stinc::sym {

enum class SatResult { Sat, Unsat, Unknown };
const char *sat_name(SatResult r);

class Solver {
public:
  virtual ~Solver() = default;
  // `model` is filled on Sat when the backend can produce one.
  virtual SatResult check(Terms &tm, T formula, Model *model = nullptr) = 0;
  virtual std::string name() const = 0;

  std::optional<std::chrono::steady_clock::time_point> deadline;
  long query_timeout_ms = 5000;  // per check, external backends
  bool expired() const { return deadline && std::chrono::steady_clock::now() > *deadline; }
};

// Simplification, equality propagation, case splits on disjunctions and a
// bounded model search. Never claims Unsat without a derivation.
std::unique_ptr<Solver> make_builtin_solver();

// Talks SMT-LIB 2 to an external process over pipes (default "z3 -in").
std::unique_ptr<Solver> make_external_solver(const std::string &command = "z3 -in -smt2");

// SMT-LIB 2 script (declarations, assertion, check-sat) for `formula`.
std::string to_smtlib(const Terms &tm, T formula);

} // namespace stinc::sym
