#pragma once

// Text serialization of diagrams. One `node <id> <var> <low> <high>` line per
// internal node (children always defined before use), terminals are the fixed
// ids 0 and 1, and a final `root <id>` line names the function.

#include <iosfwd>
#include <string>

#include "uplan/bdd.hpp"

namespace uplan::bdd {

void dump_text(std::ostream& os, manager& m, node_ref root);
std::string dump_text(manager& m, node_ref root);

// Rebuilds a dumped diagram inside `m`. Fails on malformed input, unknown
// ids, variables outside the manager, or order violations.
node_ref parse_text(std::istream& is, manager& m);

// Graphviz export for debugging; high edges solid, low edges dotted.
void write_dot(std::ostream& os, manager& m, node_ref root);

}  // namespace uplan::bdd
