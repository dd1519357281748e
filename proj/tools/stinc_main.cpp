#include <stinc/driver.hpp>
#include <stinc/error.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

std::set<std::string> split_list(const std::vector<std::string> &items) {
  std::set<std::string> out;
  for (auto &it : items) {
    size_t start = 0;
    while (start <= it.size()) {
      size_t c = it.find(',', start);
      std::string s = it.substr(start, c == std::string::npos ? std::string::npos : c - start);
      if (!s.empty())
        out.insert(s);
      if (c == std::string::npos)
        break;
      start = c + 1;
    }
  }
  return out;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Static detector for state-inconsistency bugs in Solidity contracts"};
  app.require_subcommand(1);
  auto *an = app.add_subcommand("analyze", "analyze files or directories");

  std::vector<std::string> paths, detect{"reentrancy,tod,suicide,ether-withdrawal"}, dump;
  std::string mode = "st-vs", format = "text", solver = "builtin", solver_cmd = "z3 -in -smt2";
  double timeout = 60;
  int jobs = 0;
  an->add_option("paths", paths, "source files or directories")->required();
  an->add_option("--detect", detect, "comma separated: reentrancy,tod,suicide,ether-withdrawal")->delimiter(',');
  an->add_option("--mode", mode, "so, st-hv or st-vs")->check(CLI::IsMember({"so", "st-hv", "st-vs"}));
  an->add_option("--timeout", timeout, "seconds per contract")->check(CLI::PositiveNumber);
  an->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  an->add_option("--solver", solver, "builtin or external")->check(CLI::IsMember({"builtin", "external"}));
  an->add_option("--solver-cmd", solver_cmd, "external solver command line");
  an->add_option("--dump", dump, "comma separated: facts,sdg,icfg,summary")->delimiter(',');
  an->add_option("--jobs", jobs, "worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  stinc::AnalysisConfig cfg;
  cfg.detectors = split_list(detect);
  for (auto &d : cfg.detectors)
    if (std::find(stinc::all_detectors().begin(), stinc::all_detectors().end(), d) == stinc::all_detectors().end()) {
      std::cerr << "unknown detector: " << d << "\n";
      return 2;
    }
  cfg.dumps = split_list(dump);
  for (auto &d : cfg.dumps)
    if (d != "facts" && d != "sdg" && d != "icfg" && d != "summary") {
      std::cerr << "unknown dump: " << d << "\n";
      return 2;
    }
  cfg.mode = stinc::parse_mode(mode);
  cfg.timeout_secs = timeout;
  cfg.solver = solver;
  cfg.solver_command = solver_cmd;
  cfg.jobs = jobs;

  try {
    stinc::Report r = stinc::analyze(paths, cfg);
    if (format == "text")
      for (auto &c : r.contracts)
        for (auto &[what, text] : c.dumps)
          std::cout << "== " << what << " " << c.file << " " << c.contract << "\n" << text;
    std::cout << stinc::render(r, format);
    return stinc::exit_code(r);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
