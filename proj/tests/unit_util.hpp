#pragma once

#include "oracles.hpp"

#include <stinc/facts.hpp>
#include <stinc/frontend/lower.hpp>
#include <stinc/frontend/parser.hpp>
#include <stinc/queries.hpp>
#include <stinc/sdg.hpp>

#include <memory>

// program -> icfg -> facts -> sdg, kept at stable addresses
struct Pipeline {
  stinc::ir::Program p;
  std::unique_ptr<stinc::ICFG> g;
  std::unique_ptr<stinc::FactBase> fb;
  stinc::SDG sdg;

  int stmt_at(int line, stinc::ir::Kind k) const {
    for (auto &s : p.stmts)
      if (s.line == line && s.kind == k)
        return s.id;
    return -1;
  }
};

inline std::unique_ptr<Pipeline> pipeline(stinc::ir::Program prog) {
  auto r = std::make_unique<Pipeline>();
  r->p = std::move(prog);
  r->g = std::make_unique<stinc::ICFG>(r->p);
  r->fb = std::make_unique<stinc::FactBase>(stinc::derive_facts(*r->g));
  r->sdg = stinc::build_sdg(*r->fb);
  return r;
}

inline std::unique_ptr<Pipeline> pipeline_src(const std::string &src) {
  return pipeline(stinc::lower(stinc::parse_source(src)));
}

inline std::unique_ptr<Pipeline> pipeline_fig(const std::string &name) {
  return pipeline(oracle::load_program(oracle::corpus_dir() + "/figures/" + name));
}
