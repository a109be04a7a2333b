#include "uplan/bdd_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace uplan::bdd {

namespace {

// Deterministic ids: post-order depth-first walk, low child first, so every
// node line only references ids that were printed earlier.
void assign_ids(manager& m, node_ref root,
                std::unordered_map<std::uint64_t, std::uint64_t>& ids,
                std::vector<node_ref>& order) {
  if (m.is_terminal(root)) return;
  struct frame {
    node_ref n;
    int state;
  };
  std::vector<frame> stack{{root, 0}};
  while (!stack.empty()) {
    frame& f = stack.back();
    if (ids.count(f.n.key()) || m.is_terminal(f.n)) {
      stack.pop_back();
      continue;
    }
    if (f.state == 0) {
      f.state = 1;
      stack.push_back({m.low(f.n), 0});
    } else if (f.state == 1) {
      f.state = 2;
      stack.push_back({m.high(f.n), 0});
    } else {
      ids.emplace(f.n.key(), ids.size() + 2);
      order.push_back(f.n);
      stack.pop_back();
    }
  }
}

std::uint64_t id_of(manager& m, node_ref n,
                    const std::unordered_map<std::uint64_t, std::uint64_t>& ids) {
  if (m.is_terminal(n)) return n == m.one() ? 1 : 0;
  return ids.at(n.key());
}

}  // namespace

void dump_text(std::ostream& os, manager& m, node_ref root) {
  std::unordered_map<std::uint64_t, std::uint64_t> ids;
  std::vector<node_ref> order;
  assign_ids(m, root, ids, order);
  for (node_ref n : order) {
    os << "node " << id_of(m, n, ids) << ' ' << m.node_var(n) << ' '
       << id_of(m, m.low(n), ids) << ' ' << id_of(m, m.high(n), ids) << '\n';
  }
  os << "root " << id_of(m, root, ids) << '\n';
}

std::string dump_text(manager& m, node_ref root) {
  std::ostringstream os;
  dump_text(os, m, root);
  return os.str();
}

node_ref parse_text(std::istream& is, manager& m) {
  std::unordered_map<std::uint64_t, node_ref> by_id;
  by_id.emplace(0, m.zero());
  by_id.emplace(1, m.one());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "node") {
      std::uint64_t id, lo, hi;
      unsigned var;
      if (!(ls >> id >> var >> lo >> hi))
        throw error("diagram parse: malformed node line: " + line);
      if (by_id.count(id)) throw error("diagram parse: duplicate node id");
      auto lo_it = by_id.find(lo);
      auto hi_it = by_id.find(hi);
      if (lo_it == by_id.end() || hi_it == by_id.end())
        throw error("diagram parse: node references undefined id");
      if (var >= m.var_count())
        throw error("diagram parse: variable index out of range");
      for (node_ref child : {lo_it->second, hi_it->second})
        if (!m.is_terminal(child) && m.node_var(child) <= var)
          throw error("diagram parse: variable order violated");
      // ite on a fresh variable reconstructs exactly the (var, low, high) node.
      node_ref n = m.ite(m.var(var), hi_it->second, lo_it->second);
      by_id.emplace(id, n);
    } else if (kind == "root") {
      std::uint64_t id;
      if (!(ls >> id)) throw error("diagram parse: malformed root line");
      auto it = by_id.find(id);
      if (it == by_id.end()) throw error("diagram parse: undefined root id");
      return it->second;
    } else {
      throw error("diagram parse: unexpected line: " + line);
    }
  }
  throw error("diagram parse: missing root line");
}

void write_dot(std::ostream& os, manager& m, node_ref root) {
  std::unordered_map<std::uint64_t, std::uint64_t> ids;
  std::vector<node_ref> order;
  assign_ids(m, root, ids, order);
  os << "digraph bdd {\n";
  os << "  t0 [shape=box,label=\"0\"];\n";
  os << "  t1 [shape=box,label=\"1\"];\n";
  auto name = [&](node_ref n) {
    if (m.is_terminal(n)) return std::string(n == m.one() ? "t1" : "t0");
    return "n" + std::to_string(ids.at(n.key()));
  };
  for (node_ref n : order) {
    os << "  " << name(n) << " [label=\"x" << m.node_var(n) << "\"];\n";
    os << "  " << name(n) << " -> " << name(m.low(n)) << " [style=dotted];\n";
    os << "  " << name(n) << " -> " << name(m.high(n)) << ";\n";
  }
  os << "  root -> " << name(root) << " [style=bold];\n";
  os << "  root [shape=plaintext];\n";
  os << "}\n";
}

}  // namespace uplan::bdd
