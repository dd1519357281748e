#include <stinc/driver.hpp>

#include <stinc/error.hpp>

#include <json.hpp>

#include <sstream>

namespace stinc {

using nlohmann::json;

namespace {

json to_json(const FindingReport &f) {
  return {{"kind", f.kind},
          {"var", f.var},
          {"lines", {{"s1", f.s1_line}, {"s2", f.s2_line}, {"anchor", f.anchor_line}}},
          {"attacker", f.attacker},
          {"verdict", f.verdict},
          {"reason", f.reason},
          {"cex", f.cex}};
}

json to_json(const ContractReport &c) {
  json fs = json::array();
  for (auto &f : c.findings)
    fs.push_back(to_json(f));
  json j{{"file", c.file},
         {"contract", c.contract},
         {"outcome", c.outcome},
         {"findings", fs},
         {"timing",
          {{"explore_us", c.timing.explore_us},
           {"vsa_us", c.timing.vsa_us},
           {"refine_us", c.timing.refine_us},
           {"total_us", c.timing.total_us}}}};
  if (!c.error.empty())
    j["error"] = c.error;
  if (!c.dumps.empty())
    j["dumps"] = c.dumps;
  return j;
}

} // namespace

std::string render(const Report &r, const std::string &format) {
  if (format == "json") {
    json cs = json::array();
    for (auto &c : r.contracts)
      cs.push_back(to_json(c));
    json j{{"version", 1}, {"mode", r.mode}, {"contracts", cs}};
    return j.dump(2) + "\n";
  }
  if (format != "text")
    throw Error("unknown format " + format);
  std::ostringstream o;
  for (auto &c : r.contracts) {
    if (c.outcome == "error" || c.outcome == "timeout") {
      o << c.file << ": " << c.outcome;
      if (!c.contract.empty())
        o << " in " << c.contract;
      if (!c.error.empty())
        o << ": " << c.error;
      o << "\n";
      continue;
    }
    for (auto &f : c.findings)
      if (c.surviving(f))
        o << c.file << ":" << f.anchor_line << " " << f.kind << " on " << (f.var.empty() ? "-" : f.var) << " ["
          << f.verdict << "]\n";
  }
  return o.str();
}

Report report_from_json(const std::string &text) {
  json j = json::parse(text);
  Report r;
  r.mode = j.at("mode").get<std::string>();
  for (auto &jc : j.at("contracts")) {
    ContractReport c;
    c.file = jc.at("file").get<std::string>();
    c.contract = jc.at("contract").get<std::string>();
    c.outcome = jc.at("outcome").get<std::string>();
    if (jc.contains("error"))
      c.error = jc["error"].get<std::string>();
    if (jc.contains("dumps"))
      c.dumps = jc["dumps"].get<std::map<std::string, std::string>>();
    auto &t = jc.at("timing");
    c.timing.explore_us = t.at("explore_us").get<long>();
    c.timing.vsa_us = t.at("vsa_us").get<long>();
    c.timing.refine_us = t.at("refine_us").get<long>();
    c.timing.total_us = t.at("total_us").get<long>();
    for (auto &jf : jc.at("findings")) {
      FindingReport f;
      f.kind = jf.at("kind").get<std::string>();
      f.var = jf.at("var").get<std::string>();
      f.s1_line = jf.at("lines").at("s1").get<int>();
      f.s2_line = jf.at("lines").at("s2").get<int>();
      f.anchor_line = jf.at("lines").at("anchor").get<int>();
      f.attacker = jf.at("attacker").get<std::string>();
      f.verdict = jf.at("verdict").get<std::string>();
      f.reason = jf.at("reason").get<std::string>();
      f.cex = jf.at("cex").get<std::vector<int>>();
      c.findings.push_back(std::move(f));
    }
    r.contracts.push_back(std::move(c));
  }
  return r;
}

int exit_code(const Report &r) {
  bool findings = false;
  for (auto &c : r.contracts) {
    if (c.outcome == "error" || c.outcome == "timeout")
      return 2;
    if (c.outcome == "unsafe")
      findings = true;
  }
  return findings ? 1 : 0;
}

} // namespace stinc
