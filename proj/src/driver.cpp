#include <stinc/driver.hpp>

#include <stinc/error.hpp>
#include <stinc/frontend/lower.hpp>
#include <stinc/frontend/parser.hpp>
#include <stinc/symexec.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace stinc {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const char *mode_name(Mode m) {
  switch (m) {
  case Mode::SO: return "so";
  case Mode::StHv: return "st-hv";
  case Mode::StVs: return "st-vs";
  }
  return "?";
}

Mode parse_mode(const std::string &s) {
  if (s == "so") return Mode::SO;
  if (s == "st-hv") return Mode::StHv;
  if (s == "st-vs") return Mode::StVs;
  throw Error("unknown mode " + s);
}

namespace {

struct Timeout {};

long us_since(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - t).count();
}

int rank(Verdict v) {
  switch (v) {
  case Verdict::Confirmed: return 2;
  case Verdict::Potential: return 1;
  case Verdict::Refuted: return 0;
  }
  return 0;
}

std::unique_ptr<sym::Solver> make_solver(const AnalysisConfig &cfg) {
  if (cfg.solver == "external")
    return sym::make_external_solver(cfg.solver_command);
  if (cfg.solver == "builtin")
    return sym::make_builtin_solver();
  throw Error("unknown solver " + cfg.solver);
}

std::vector<Finding> explore(const SDG &sdg, const std::set<std::string> &det) {
  std::vector<Finding> out;
  auto add = [&](std::vector<Finding> fs) { out.insert(out.end(), fs.begin(), fs.end()); };
  if (det.count("reentrancy")) add(detect_reentrancy(sdg));
  if (det.count("tod")) add(detect_tod(sdg));
  if (det.count("suicide")) add(detect_suicide(sdg));
  if (det.count("ether-withdrawal")) add(detect_eth_withdrawal(sdg));
  return out;
}

struct Refined {
  Finding f;
  std::string reason;
};

void analyze_program(ContractReport &cr, const ir::Program &prog, const AnalysisConfig &cfg,
                     Clock::time_point deadline) {
  auto check_time = [&] {
    if (Clock::now() > deadline)
      throw Timeout{};
  };
  auto t0 = Clock::now();
  ICFG g(prog);
  FactBase fb = derive_facts(g);
  SDG sdg = build_sdg(fb);
  std::vector<Finding> found = explore(sdg, cfg.detectors);
  cr.timing.explore_us = us_since(t0);
  check_time();

  if (cfg.dumps.count("icfg"))
    cr.dumps["icfg"] = g.dump();
  if (cfg.dumps.count("facts")) {
    std::string s;
    for (auto &[rel, rows] : dump_facts(fb))
      s += "== " + rel + "\n" + rows;
    cr.dumps["facts"] = s;
  }
  if (cfg.dumps.count("sdg"))
    cr.dumps["sdg"] = sdg.dump();

  sym::Terms tm;
  ValueSummary vs;
  bool need_vs = cfg.mode == Mode::StVs && !found.empty();
  if (need_vs || cfg.dumps.count("summary")) {
    auto t1 = Clock::now();
    vs = compute_summary(g, tm);
    cr.timing.vsa_us = us_since(t1);
    if (cfg.dumps.count("summary"))
      cr.dumps["summary"] = vs.dump(tm);
    check_time();
  }

  std::vector<Refined> refined;
  auto t2 = Clock::now();
  if (cfg.mode == Mode::SO) {
    for (auto &f : found)
      refined.push_back({f, "static only"});
  } else {
    auto solver = make_solver(cfg);
    solver->deadline = deadline;
    ExecConfig hv;
    hv.mode = RefineMode::Havoc;
    hv.deadline = deadline;
    ExecConfig sv = hv;
    sv.mode = RefineMode::Summary;
    sv.summary = &vs;
    for (auto &f : found) {
      check_time();
      RefineResult r = refine(f, g, tm, *solver, hv);
      // summary mode only adds constraints, so a havoc refutation stands
      if (cfg.mode == Mode::StVs && r.verdict != Verdict::Refuted)
        r = refine(f, g, tm, *solver, sv);
      Finding x = f;
      x.verdict = r.verdict;
      refined.push_back({x, r.reason});
    }
    check_time();
  }
  cr.timing.refine_us = us_since(t2);

  // one entry per kind/var/lines/anchor, strongest verdict wins
  std::map<std::tuple<std::string, std::string, int, int, int>, size_t> slot;
  std::vector<int> kept;
  for (auto &[f, reason] : refined) {
    FindingReport r;
    r.kind = kind_name(f.kind);
    r.var = f.pair ? f.pair->var : "";
    r.s1_line = f.pair ? line_of(prog, f.pair->s1) : 0;
    r.s2_line = f.pair && f.pair->s2 >= 0 ? line_of(prog, f.pair->s2) : 0;
    r.anchor_line = line_of(prog, f.anchor);
    r.attacker = f.attacker_func >= 0 ? prog.funcs[f.attacker_func].name : "";
    r.verdict = verdict_name(f.verdict);
    r.reason = reason;
    r.cex = f.cex.lines;
    auto key = std::make_tuple(r.kind, r.var, std::min(r.s1_line, r.s2_line), std::max(r.s1_line, r.s2_line),
                               r.anchor_line);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot[key] = cr.findings.size();
      kept.push_back(rank(f.verdict));
      cr.findings.push_back(std::move(r));
    } else if (rank(f.verdict) > kept[it->second]) {
      kept[it->second] = rank(f.verdict);
      cr.findings[it->second] = std::move(r);
    }
  }
  bool unsafe = std::any_of(cr.findings.begin(), cr.findings.end(),
                            [&](const FindingReport &f) { return cr.surviving(f); });
  cr.outcome = unsafe ? "unsafe" : "safe";
}

// the program to analyze for `p`: merged with any contract it creates
ir::Program with_created(const ir::Program &p, const std::vector<ir::Program> &all) {
  ir::Program cur = p;
  for (auto &name : created_contracts(p))
    for (auto &q : all)
      if (q.name == name && q.name != p.name)
        cur = combine_programs(cur, q, false);
  return cur;
}

} // namespace

std::vector<ContractReport> analyze_source(const std::string &file, const std::string &text,
                                           const AnalysisConfig &cfg) {
  std::vector<ContractReport> out;
  auto start = Clock::now();
  auto budget = std::chrono::microseconds(static_cast<long>(cfg.timeout_secs * 1e6));
  std::vector<ir::Program> progs;
  try {
    progs = lower_all(parse_source(text));
  } catch (const std::exception &e) {
    ContractReport cr;
    cr.file = file;
    cr.outcome = "error";
    cr.error = e.what();
    cr.timing.total_us = us_since(start);
    out.push_back(std::move(cr));
    return out;
  }
  for (auto &p : progs) {
    ContractReport cr;
    cr.file = file;
    cr.contract = p.name;
    auto t = Clock::now();
    try {
      analyze_program(cr, with_created(p, progs), cfg, t + budget);
    } catch (const Timeout &) {
      cr.outcome = "timeout";
      cr.findings.clear();
    } catch (const std::exception &e) {
      cr.outcome = "error";
      cr.error = e.what();
      cr.findings.clear();
    }
    cr.timing.total_us = us_since(t);
    out.push_back(std::move(cr));
  }
  return out;
}

Report analyze(const std::vector<std::string> &paths, const AnalysisConfig &cfg) {
  if (cfg.timeout_secs <= 0)
    throw Error("timeout must be positive");
  std::vector<std::string> files;
  for (auto &p : paths) {
    if (!fs::exists(p))
      throw IOError("no such file or directory: " + p);
    if (fs::is_directory(p)) {
      for (auto &e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".sol")
          files.push_back(e.path().string());
    } else {
      files.push_back(p);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());

  std::vector<std::vector<ContractReport>> per_file(files.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < files.size();) {
      std::ifstream in(files[i]);
      if (!in) {
        ContractReport cr;
        cr.file = files[i];
        cr.outcome = "error";
        cr.error = "cannot read file";
        per_file[i].push_back(cr);
        continue;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      per_file[i] = analyze_source(files[i], ss.str(), cfg);
    }
  };
  unsigned n = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, std::max<size_t>(files.size(), 1));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  Report r;
  r.mode = mode_name(cfg.mode);
  for (auto &v : per_file)
    for (auto &c : v)
      r.contracts.push_back(std::move(c));
  return r;
}

} // namespace stinc
