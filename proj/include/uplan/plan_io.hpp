#pragma once

// Universal plan files: a small line-oriented header (algorithm tag, domain
// skeleton, variable layout) followed by the diagram dump of the state-action
// rules. Plans can be reloaded and queried without the original domain text.

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "uplan/plan.hpp"

namespace uplan::plan {

void write_plan_file(std::ostream& os, const enc::transition_system& ts,
                     const universal_plan& plan);

struct loaded_plan {
  std::string algorithm_tag;
  unsigned iterations = 0;
  // Variable kinds/ranges and agent action names only; formulas are `true`.
  nadl::domain_desc skeleton;
  enc::encoding enc;
  std::shared_ptr<bdd::manager> mgr;
  bdd::node_ref rules;
  std::string diagram_text;  // verbatim, for re-parsing into another manager
};

loaded_plan read_plan_file(std::istream& is);

// Advised joint actions at a fully specified state (every variable named
// once). Throws on unknown names, repeats, gaps, or out-of-range values.
std::vector<joint_action> query_plan(
    const loaded_plan& lp,
    const std::vector<std::pair<std::string, std::uint64_t>>& state);

// Structural compatibility between a plan file and a parsed domain.
bool matches_domain(const loaded_plan& lp, const nadl::domain_desc& dd,
                    std::string* why = nullptr);

}  // namespace uplan::plan
