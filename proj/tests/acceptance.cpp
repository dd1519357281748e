// One line per acceptance criterion; exit status 1 if any fails.

#include "oracles.hpp"

#include <stinc/facts.hpp>
#include <stinc/sdg.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace stinc;
using Clock = std::chrono::steady_clock;

namespace {

double secs_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Result {
  bool pass = true;
  std::string detail;
};

std::vector<ContractReport> run(const std::string &file, std::set<std::string> det, Mode mode) {
  AnalysisConfig cfg;
  cfg.detectors = std::move(det);
  cfg.mode = mode;
  cfg.timeout_secs = 60;
  return analyze_source(file, oracle::read_file(file), cfg);
}

std::string fig(const std::string &name) { return oracle::corpus_dir() + "/figures/" + name; }

bool has(const ContractReport &c, const std::function<bool(const FindingReport &)> &pred) {
  for (auto &f : c.findings)
    if (c.surviving(f) && pred(f))
      return true;
  return false;
}

Result verdicts() {
  struct Case {
    std::string name, file, det;
    Mode mode;
    std::string outcome;
    std::function<bool(const FindingReport &)> need;
  };
  auto kind = [](std::string k) { return [k](const FindingReport &f) { return f.kind == k; }; };
  auto tod = [](const FindingReport &f) { return f.kind.rfind("tod_", 0) == 0; };
  std::vector<Case> cases{
      {"bank", "fig01a_bank.sol", "reentrancy", Mode::StVs, "unsafe",
       [](const FindingReport &f) { return f.kind == "reentrancy" && f.var == "accounts"; }},
      {"queue", "fig01b_queue.sol", "tod", Mode::StVs, "unsafe", tod},
      {"splitter", "fig02_splitter.sol", "reentrancy", Mode::StVs, "unsafe",
       [](const FindingReport &f) {
         return f.kind == "reentrancy" && f.var == "splits" && std::min(f.s1_line, f.s2_line) == 5 &&
                std::max(f.s1_line, f.s2_line) == 16 && f.cex == std::vector<int>{11, 12, 16, 4, 5};
       }},
      {"splitter without update", "fig02_splitter_no_update.sol", "reentrancy", Mode::StVs, "safe", nullptr},
      {"mutex st-vs", "fig03_mutex.sol", "reentrancy", Mode::StVs, "safe", nullptr},
      {"mutex st-hv", "fig03_mutex.sol", "reentrancy", Mode::StHv, "unsafe", kind("reentrancy")},
      {"mutex so", "fig03_mutex.sol", "reentrancy", Mode::SO, "unsafe", kind("reentrancy")},
      {"suicide", "fig12_suicide.sol", "suicide", Mode::StVs, "unsafe",
       [](const FindingReport &f) { return f.kind == "cond_suicide" && f.s1_line == 9 && f.s2_line == 5; }},
      {"withdrawal", "fig13_withdrawal.sol", "ether-withdrawal", Mode::StVs, "unsafe", kind("eth_withdrawal")},
      {"delegate", "fig14_delegate.sol", "reentrancy", Mode::StVs, "unsafe", kind("reentrancy")},
      {"lock", "fig15_lock.sol", "reentrancy", Mode::StVs, "safe", nullptr},
      {"bet", "fig18_bet.sol", "tod", Mode::StVs, "unsafe", kind("tod_amount")},
      {"vault", "fig16_vault.sol", "reentrancy", Mode::StVs, "unsafe", kind("reentrancy")},
      {"donations", "fig17_donations.sol", "tod", Mode::StVs, "unsafe", tod},
  };
  Result r;
  int ok = 0;
  auto t = Clock::now();
  for (auto &c : cases) {
    auto reps = run(fig(c.file), {c.det}, c.mode);
    bool good = reps.size() == 1 && reps[0].outcome == c.outcome && (!c.need || has(reps[0], c.need));
    if (good)
      ++ok;
    else
      r.detail += " [" + c.name + ": got " + (reps.empty() ? "nothing" : reps[0].outcome) + "]";
  }
  double s = secs_since(t);
  r.pass = ok == static_cast<int>(cases.size()) && s < 5;
  std::ostringstream o;
  o << ok << "/" << cases.size() << " verdicts, " << s << " s" << r.detail;
  r.detail = o.str();
  return r;
}

Result mutex_summary() {
  auto t = Clock::now();
  auto p = oracle::load_program(fig("fig03_mutex.sol"));
  ICFG g(p);
  sym::Terms tm;
  ValueSummary vs = compute_summary(g, tm);
  Result r;
  auto &pairs = vs.pairs["mutex"];
  // expected: {<true, mutex=false>, <false, mutex=false>}
  std::vector<std::pair<int, std::function<bool(sym::u256)>>> want{{1, [](sym::u256 m) { return m == 0; }},
                                                                    {0, [](sym::u256 m) { return m == 0; }}};
  std::vector<bool> used(want.size(), false);
  int matched = 0;
  for (auto &sp : pairs) {
    for (size_t i = 0; i < want.size(); ++i) {
      if (used[i])
        continue;
      bool same = true;
      std::set<sym::T> syms;
      tm.vars(sp.value, syms);
      tm.vars(sp.cond, syms);
      for (sym::u256 m : {sym::u256(0), sym::u256(1)}) {
        sym::Model md;
        for (sym::T x : syms)
          if (tm.node(x).name == pre_symbol("mutex"))
            md.vars[x] = m;
        bool c = tm.eval(sp.cond, md) != 0;
        if (c != want[i].second(m) || (c && tm.eval(sp.value, md) != sym::u256(want[i].first)))
          same = false;
      }
      if (same) {
        used[i] = true;
        ++matched;
        break;
      }
    }
  }
  double s = secs_since(t);
  r.pass = matched == 2 && pairs.size() == 2 && s < 1;
  std::ostringstream o;
  o << "mutex pairs: ";
  for (auto &sp : pairs)
    o << "<" << tm.str(sp.value) << ", " << tm.str(sp.cond) << "> ";
  o << "matched " << matched << "/2, " << s << " s";
  r.detail = o.str();
  return r;
}

std::string key(const FindingReport &f) {
  std::ostringstream o;
  o << f.kind << ":" << f.var << ":" << std::min(f.s1_line, f.s2_line) << "-" << std::max(f.s1_line, f.s2_line)
    << "@" << f.anchor_line;
  return o.str();
}

Result oracle_soundness() {
  auto t = Clock::now();
  Result r;
  auto files = oracle::fixture_files();
  int witnesses = 0, missed = 0, refuted = 0;
  for (auto &file : files) {
    auto p = oracle::load_program(file);
    ICFG g(p);
    auto ws = oracle::interleaving_witnesses(g);
    witnesses += static_cast<int>(ws.size());
    std::set<std::string> all{all_detectors().begin(), all_detectors().end()};
    auto so = run(file, all, Mode::SO);
    auto hv = run(file, all, Mode::StHv);
    auto vs = run(file, all, Mode::StVs);
    for (auto &w : ws) {
      auto match = [&](const FindingReport &f) {
        bool fam = w.kind == "reentrancy" ? f.kind == "reentrancy" : f.kind.rfind("tod_", 0) == 0;
        return fam && f.anchor_line == w.anchor_line && (w.attacker.empty() || f.attacker == w.attacker);
      };
      auto found = [&](const std::vector<ContractReport> &reps, bool surviving_only) {
        for (auto &c : reps)
          for (auto &f : c.findings)
            if (match(f) && (!surviving_only || c.surviving(f)))
              return true;
        return false;
      };
      std::string where = file.substr(file.find_last_of('/') + 1) + " " + w.kind + "@" +
                          std::to_string(w.anchor_line) + " (" + w.detail + ")";
      if (!found(so, false)) {
        ++missed;
        r.detail += " [missed " + where + "]";
      } else if (!found(hv, true) || !found(vs, true)) {
        ++refuted;
        r.detail += " [refuted " + where + "]";
      }
    }
  }
  double s = secs_since(t);
  r.pass = files.size() >= 20 && missed == 0 && refuted == 0 && s < 120;
  std::ostringstream o;
  o << files.size() << " fixtures, " << witnesses << " concrete witnesses, " << missed << " missed, " << refuted
    << " refuted, " << s << " s" << r.detail;
  r.detail = o.str();
  return r;
}

Result horn_equivalence() {
  auto t = Clock::now();
  datalog::Interner in;
  std::vector<std::vector<datalog::Rule>> sets;
  sets.push_back(datalog::parse_rules(fact_rules(), in));
  sets.push_back(datalog::parse_rules(std::string(fact_rules()) + sdg_rules(), in));
  sets.push_back(datalog::parse_rules("t(X, Y) :- e(X, Y).\n"
                                      "t(X, Z) :- t(X, Y), e(Y, Z).\n"
                                      "n(X) :- v(X), !t(X, X).\n"
                                      "d(X, Y) :- t(X, Y), !t(Y, X), X != Y.\n",
                                      in));
  std::mt19937 rng(2024);
  int bad = 0;
  for (int i = 0; i < 100; ++i) {
    auto &rules = sets[static_cast<size_t>(i) % sets.size()];
    auto base = oracle::random_base(rules, in, rng, 50);
    if (!(datalog::saturate(rules, base) == oracle::naive_saturate(rules, base)))
      ++bad;
  }
  double s = secs_since(t);
  Result r;
  r.pass = bad == 0 && s < 30;
  std::ostringstream o;
  o << "100 random bases, " << bad << " mismatches, " << s << " s";
  r.detail = o.str();
  return r;
}

Result monotonicity() {
  std::vector<std::string> files = oracle::figure_files();
  for (auto &f : oracle::fixture_files())
    files.push_back(f);
  std::set<std::string> all{all_detectors().begin(), all_detectors().end()};
  int bad = 0;
  Result r;
  for (auto &file : files) {
    std::map<Mode, std::set<std::string>> keys;
    for (Mode m : {Mode::SO, Mode::StHv, Mode::StVs})
      for (auto &c : run(file, all, m))
        for (auto &f : c.findings)
          if (c.surviving(f))
            keys[m].insert(c.contract + "/" + key(f));
    auto subset = [&](Mode a, Mode b) {
      for (auto &k : keys[a])
        if (!keys[b].count(k)) {
          ++bad;
          r.detail += " [" + k + " in " + mode_name(a) + " only]";
        }
    };
    subset(Mode::StVs, Mode::StHv);
    subset(Mode::StHv, Mode::SO);
  }
  r.pass = bad == 0;
  r.detail = std::to_string(files.size()) + " contracts, " + std::to_string(bad) + " violations" + r.detail;
  return r;
}

Result summary_cover() {
  Result r;
  int bad = 0;
  auto files = oracle::fixture_files();
  for (auto &file : files) {
    auto p = oracle::load_program(file);
    ICFG g(p);
    sym::Terms tm;
    auto vs = compute_summary(g, tm);
    auto v = oracle::summary_violations(g, tm, vs);
    bad += static_cast<int>(v.size());
    for (size_t i = 0; i < v.size() && i < 3; ++i)
      r.detail += " [" + v[i] + "]";
  }
  r.pass = bad == 0;
  r.detail = std::to_string(files.size()) + " fixtures, " + std::to_string(bad) + " uncovered values" + r.detail;
  return r;
}

Result performance() {
  std::vector<std::string> files = oracle::figure_files();
  for (auto &f : oracle::fixture_files())
    files.push_back(f);
  std::set<std::string> all{all_detectors().begin(), all_detectors().end()};
  double worst = 0;
  std::string worst_file;
  Result r;
  for (auto &file : files)
    for (auto &c : run(file, all, Mode::StVs)) {
      double s = static_cast<double>(c.timing.total_us) / 1e6;
      if (s > worst) {
        worst = s;
        worst_file = file.substr(file.find_last_of('/') + 1);
      }
      if (c.outcome == "timeout" || c.outcome == "error")
        r.detail += " [" + c.file + " " + c.outcome + "]";
    }
  r.pass = worst < 10 && r.detail.empty();
  std::ostringstream o;
  o << files.size() << " contracts, slowest " << worst << " s (" << worst_file << ")" << r.detail;
  r.detail = o.str();
  return r;
}

} // namespace

int main(int argc, char **argv) {
  std::vector<std::pair<std::string, std::function<Result()>>> crit{
      {"verdict reproduction", verdicts},       {"value summary of the mutex contract", mutex_summary},
      {"oracle soundness", oracle_soundness},   {"horn engine equivalence", horn_equivalence},
      {"mode monotonicity", monotonicity},      {"summary over-approximation", summary_cover},
      {"performance", performance},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (size_t i = 0; i < crit.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(n))
      continue;
    Result r;
    try {
      r = crit[i].second();
    } catch (const std::exception &e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failed += r.pass ? 0 : 1;
    std::cout << "criterion " << n << " (" << crit[i].first << "): " << (r.pass ? "PASS" : "FAIL") << " - "
              << r.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
