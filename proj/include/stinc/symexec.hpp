#pragma once

#include <stinc/icfg.hpp>
#include <stinc/queries.hpp>
#include <stinc/solver.hpp>
#include <stinc/vsa.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stinc {

enum class RefineMode { Havoc, Summary };

// Mapping/array contents: uninterpreted base plus writes in order. After an
// attacker boundary in summary mode, `below` holds the contents before it and
// reads are constrained by the summary against `scalars_at`.
struct CollState {
  std::string var;
  std::string base;
  std::vector<std::pair<std::vector<sym::T>, sym::T>> writes;
  std::shared_ptr<const CollState> below;
  std::shared_ptr<const std::map<std::string, sym::T>> scalars_at;
};

struct Frame {
  int func = -1;
  int tx = 0;
  std::map<std::string, sym::T> regs;
};

struct MachineState {
  int pc = -1;
  int next = -1;  // successor chosen by the last executed statement, -1 = path ended
  std::vector<Frame> frames;
  std::map<std::string, sym::T> scalars;
  std::map<std::string, CollState> colls;
  sym::T path = -1;
  std::vector<sym::T> assumptions;  // instantiated summary constraints, also part of `path`
  std::size_t wi = 0;                // next waypoint to reach
  std::map<int, int> visits;
  std::map<std::pair<const CollState *, std::vector<sym::T>>, sym::T> boundary_reads;
  std::vector<sym::T> observed;  // operand values at the final waypoint
};

struct RefineResult {
  Verdict verdict = Verdict::Potential;
  sym::SatResult sat = sym::SatResult::Unknown;
  std::string reason;
};

struct ExecConfig {
  RefineMode mode = RefineMode::Havoc;
  const ValueSummary *summary = nullptr;
  int max_steps = 20000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class Executor {
public:
  Executor(const ICFG &g, sym::Terms &tm, sym::Solver &solver, ExecConfig cfg);

  // Storage holds the pre-state symbols; one frame for `entry`'s function.
  MachineState initial(int entry, int tx);

  // One statement: effects plus the chosen successor(s) in `next`.
  std::vector<MachineState> exec(const MachineState &st, bool at_anchor = false);

  // exec followed by moving to the successor (no waypoint logic).
  std::vector<MachineState> interpret_step(const MachineState &st);

  // Storage after an attacker boundary; `only` restricts it to some vars.
  void apply_boundary(MachineState &st, const std::set<std::string> *only = nullptr);

  sym::T load(MachineState &st, const std::string &var, const std::vector<sym::T> &keys);

  struct Outcome {
    std::vector<MachineState> goals;  // satisfiable (or undecided) arrivals at the last waypoint
    bool any_sat = false;
    bool complete = true;  // false if budget, visit bound or solver gave up somewhere
  };
  Outcome explore(MachineState init, const std::vector<int> &waypoints, bool stop_at_sat);

private:
  const ICFG &g_;
  const ir::Program &p_;
  sym::Terms &tm_;
  sym::Solver &solver_;
  ExecConfig cfg_;
  std::map<int, LoopInfo> loops_;
  int next_tx_ = 100;

  const LoopInfo &loops(int func);
  sym::T val(MachineState &st, const ir::Operand &o);
  std::pair<sym::T, sym::T> instantiate(const SummaryPair &sp, const std::map<std::string, sym::T> &at);
  sym::T read(MachineState &st, const CollState &c, const std::vector<sym::T> &keys);
  void havoc_all(MachineState &st, const std::string &why);
  void enter(MachineState &st, int target);
  void jump(MachineState &st, int target);
  void observe(MachineState &st);
};

RefineResult refine(const Finding &f, const ICFG &g, sym::Terms &tm, sym::Solver &solver, const ExecConfig &cfg);
RefineResult refine_tod(const Finding &f, const ICFG &g, sym::Terms &tm, sym::Solver &solver,
                        const ExecConfig &cfg);

} // namespace stinc
