#include "unit_util.hpp"

#include <stinc/error.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

using namespace stinc;
namespace fs = std::filesystem;

namespace {

AnalysisConfig config(std::set<std::string> det, Mode m = Mode::StVs) {
  AnalysisConfig c;
  c.detectors = std::move(det);
  c.mode = m;
  c.timeout_secs = 30;
  return c;
}

std::string fig(const std::string &n) { return oracle::corpus_dir() + "/figures/" + n; }

int cli(const std::string &args) {
  int st = std::system((std::string(STINC_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string &name) {
  auto d = fs::temp_directory_path() / ("stinc_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST(Driver, ModeNames) {
  for (Mode m : {Mode::SO, Mode::StHv, Mode::StVs})
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  EXPECT_THROW(parse_mode("fast"), Error);
}

TEST(Driver, JsonRoundTrip) {
  auto cfg = config({"reentrancy", "tod"});
  cfg.dumps = {"summary"};
  Report r = analyze({fig("fig02_splitter.sol"), fig("fig03_mutex.sol")}, cfg);
  std::string a = render(r, "json");
  EXPECT_EQ(render(report_from_json(a), "json"), a);
}

TEST(Driver, TextNamesKind) {
  Report r = analyze({fig("fig01a_bank.sol")}, config({"reentrancy"}));
  auto t = render(r, "text");
  EXPECT_NE(t.find("reentrancy on accounts"), std::string::npos);
  EXPECT_NE(t.find("fig01a_bank.sol:4"), std::string::npos);
}

TEST(Driver, EmptyDirectory) {
  auto d = scratch("empty");
  Report r = analyze({d.string()}, config({"reentrancy"}));
  EXPECT_TRUE(r.contracts.empty());
  EXPECT_EQ(exit_code(r), 0);
}

TEST(Driver, MissingPath) { EXPECT_THROW(analyze({"/nonexistent/x.sol"}, config({"tod"})), IOError); }

TEST(Driver, SyntaxErrorReported) {
  auto reps = analyze_source("bad.sol", "contract {", config({"tod"}));
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].outcome, "error");
  Report r{"st-vs", reps};
  EXPECT_EQ(exit_code(r), 2);
}

TEST(Driver, ModesNest) {
  for (const char *f : {"fig03_mutex.sol", "fig15_lock.sol", "fig02_splitter.sol"}) {
    std::map<Mode, int> n;
    for (Mode m : {Mode::SO, Mode::StHv, Mode::StVs})
      for (auto &c : analyze({fig(f)}, config({"reentrancy"}, m)).contracts)
        for (auto &x : c.findings)
          n[m] += c.surviving(x);
    EXPECT_LE(n[Mode::StVs], n[Mode::StHv]) << f;
    EXPECT_LE(n[Mode::StHv], n[Mode::SO]) << f;
  }
}

TEST(Driver, DirectoryWalkSorted) {
  auto d = scratch("walk");
  fs::copy_file(fig("fig15_lock.sol"), d / "b.sol");
  fs::create_directories(d / "sub");
  fs::copy_file(fig("fig01a_bank.sol"), d / "sub" / "a.sol");
  std::ofstream(d / "notes.txt") << "x";
  Report r = analyze({d.string(), (d / "b.sol").string()}, config({"reentrancy"}));
  ASSERT_EQ(r.contracts.size(), 2u);
  EXPECT_LT(r.contracts[0].file, r.contracts[1].file);
}

TEST(Driver, CliExitCodes) {
  EXPECT_EQ(cli("analyze " + fig("fig03_mutex.sol") + " --detect reentrancy --mode st-vs"), 0);
  EXPECT_EQ(cli("analyze " + fig("fig01a_bank.sol") + " --detect reentrancy"), 1);
  EXPECT_EQ(cli("analyze " + fig("fig01a_bank.sol") + " --detect nonsense"), 2);
  EXPECT_EQ(cli("analyze /nonexistent.sol"), 2);
  EXPECT_EQ(cli("analyze " + fig("fig01a_bank.sol") + " --mode bogus"), 2);
}

TEST(Driver, CliJsonOutput) {
  auto d = scratch("cli");
  auto out = d / "o.json";
  int rc = std::system((std::string(STINC_CLI) + " analyze " + fig("fig18_bet.sol") +
                        " --detect tod --format json --dump sdg > " + out.string())
                           .c_str());
  ASSERT_TRUE(WIFEXITED(rc));
  EXPECT_EQ(WEXITSTATUS(rc), 1);
  std::ifstream in(out);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  Report r = report_from_json(s);
  ASSERT_EQ(r.contracts.size(), 1u);
  EXPECT_TRUE(r.contracts[0].dumps.count("sdg"));
  EXPECT_EQ(r.mode, "st-vs");
}
