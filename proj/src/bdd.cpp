#include "uplan/bdd.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <unordered_map>

namespace uplan::bdd {

namespace {

constexpr std::uint32_t kTagNot = 1;
constexpr std::uint32_t kTagIte = 2;
constexpr std::uint32_t kTagRestrict = 3;
constexpr std::uint32_t kTagExists = 4;
constexpr std::uint32_t kTagAndExists = 5;
constexpr std::uint32_t kTagRename = 6;
constexpr std::uint32_t kTagApplyBase = 16;  // + op

inline std::uint64_t mix(std::uint64_t h, std::uint32_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

inline std::size_t hash3(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  std::uint64_t h = 0x243f6a8885a308d3ull;
  h = mix(h, a);
  h = mix(h, b);
  h = mix(h, c);
  return static_cast<std::size_t>(h ^ (h >> 32));
}

}  // namespace

std::uint32_t manager::next_mgr_id() {
  static std::atomic<std::uint32_t> counter{1};
  return counter.fetch_add(1);
}

manager::manager(unsigned var_count)
    : n_vars_(var_count), mgr_id_(next_mgr_id()) {
  nodes_.reserve(1024);
  // Terminals sit below every decision variable: their level is n_vars_.
  nodes_.push_back(node{n_vars_, 0, 0});  // ZERO
  nodes_.push_back(node{n_vars_, 1, 1});  // ONE
  table_.assign(1 << 12, 0);
  table_mask_ = table_.size() - 1;
  cache_.assign(1 << 18, cache_entry{});
  cache_mask_ = cache_.size() - 1;
}

std::uint32_t manager::idx(node_ref r, const char* where) const {
  if (r.mgr_ != mgr_id_)
    throw error(std::string(where) + ": node from a different manager");
  if (r.index_ >= nodes_.size())
    throw error(std::string(where) + ": stale node reference");
  return r.index_;
}

void manager::grow_table() {
  std::vector<std::uint32_t> old;
  old.swap(table_);
  table_.assign(old.size() * 2, 0);
  table_mask_ = table_.size() - 1;
  for (std::uint32_t slot : old) {
    if (slot == 0) continue;
    const node& n = nodes_[slot - 1];
    std::size_t h = hash3(n.var, n.low, n.high) & table_mask_;
    while (table_[h] != 0) h = (h + 1) & table_mask_;
    table_[h] = slot;
  }
}

std::uint32_t manager::mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi) {
  if (lo == hi) return lo;
  assert(var < level(lo) && var < level(hi));
  std::size_t h = hash3(var, lo, hi) & table_mask_;
  while (table_[h] != 0) {
    const node& n = nodes_[table_[h] - 1];
    if (n.var == var && n.low == lo && n.high == hi) return table_[h] - 1;
    h = (h + 1) & table_mask_;
  }
  nodes_.push_back(node{var, lo, hi});
  std::uint32_t id = static_cast<std::uint32_t>(nodes_.size() - 1);
  table_[h] = id + 1;
  if (nodes_.size() * 10 > table_.size() * 7) grow_table();
  return id;
}

bool manager::cache_lookup(std::uint32_t tag, std::uint32_t a, std::uint32_t b,
                           std::uint32_t c, std::uint32_t& out) const {
  if (!cache_enabled_) return false;
  const cache_entry& e = cache_[hash3(a, b, c ^ (tag << 24)) & cache_mask_];
  if (e.a == a && e.b == b && e.c == c && e.tag == tag && e.a != kInvalid) {
    out = e.result;
    return true;
  }
  return false;
}

void manager::cache_store(std::uint32_t tag, std::uint32_t a, std::uint32_t b,
                          std::uint32_t c, std::uint32_t result) {
  if (!cache_enabled_) return;
  cache_entry& e = cache_[hash3(a, b, c ^ (tag << 24)) & cache_mask_];
  e = cache_entry{a, b, c, tag, result};
}

void manager::set_op_cache_enabled(bool on) {
  cache_enabled_ = on;
  if (!on)
    for (auto& e : cache_) e.a = kInvalid;
}

node_ref manager::var(unsigned v) {
  if (v >= n_vars_) throw error("var: variable index out of range");
  return make_ref(mk(v, 0, 1));
}

node_ref manager::nvar(unsigned v) {
  if (v >= n_vars_) throw error("nvar: variable index out of range");
  return make_ref(mk(v, 1, 0));
}

std::uint32_t manager::not_rec(std::uint32_t f) {
  if (f < 2) return f ^ 1u;
  std::uint32_t out;
  if (cache_lookup(kTagNot, f, 0, 0, out)) return out;
  const node n = nodes_[f];
  std::uint32_t r = mk(n.var, not_rec(n.low), not_rec(n.high));
  cache_store(kTagNot, f, 0, 0, r);
  return r;
}

node_ref manager::negate(node_ref f) { return make_ref(not_rec(idx(f, "negate"))); }

std::uint32_t manager::apply_rec(bool_op op, std::uint32_t f, std::uint32_t g) {
  switch (op) {
    case bool_op::AND:
      if (f == 0 || g == 0) return 0;
      if (f == 1) return g;
      if (g == 1) return f;
      if (f == g) return f;
      break;
    case bool_op::OR:
      if (f == 1 || g == 1) return 1;
      if (f == 0) return g;
      if (g == 0) return f;
      if (f == g) return f;
      break;
    case bool_op::XOR:
      if (f == g) return 0;
      if (f == 0) return g;
      if (g == 0) return f;
      if (f == 1) return not_rec(g);
      if (g == 1) return not_rec(f);
      break;
    case bool_op::IMPLIES:
      if (f == 0 || g == 1) return 1;
      if (f == 1) return g;
      if (f == g) return 1;
      if (g == 0) return not_rec(f);
      break;
    case bool_op::IFF:
      if (f == g) return 1;
      if (f == 1) return g;
      if (g == 1) return f;
      if (f == 0) return not_rec(g);
      if (g == 0) return not_rec(f);
      break;
    case bool_op::DIFF:
      if (f == 0 || g == 1 || f == g) return 0;
      if (g == 0) return f;
      if (f == 1) return not_rec(g);
      break;
  }
  std::uint32_t a = f, b = g;
  bool commutative = op == bool_op::AND || op == bool_op::OR ||
                     op == bool_op::XOR || op == bool_op::IFF;
  if (commutative && a > b) std::swap(a, b);
  std::uint32_t tag = kTagApplyBase + static_cast<std::uint32_t>(op);
  std::uint32_t out;
  if (cache_lookup(tag, a, b, 0, out)) return out;

  std::uint32_t top = std::min(level(a), level(b));
  std::uint32_t a0 = a, a1 = a, b0 = b, b1 = b;
  if (level(a) == top) { a0 = nodes_[a].low; a1 = nodes_[a].high; }
  if (level(b) == top) { b0 = nodes_[b].low; b1 = nodes_[b].high; }
  std::uint32_t r = mk(top, apply_rec(op, a0, b0), apply_rec(op, a1, b1));
  cache_store(tag, a, b, 0, r);
  return r;
}

node_ref manager::apply(bool_op op, node_ref f, node_ref g) {
  return make_ref(apply_rec(op, idx(f, "apply"), idx(g, "apply")));
}

std::uint32_t manager::ite_rec(std::uint32_t c, std::uint32_t t, std::uint32_t e) {
  if (c == 1) return t;
  if (c == 0) return e;
  if (t == e) return t;
  if (t == 1 && e == 0) return c;
  if (t == 0 && e == 1) return not_rec(c);
  std::uint32_t out;
  if (cache_lookup(kTagIte, c, t, e, out)) return out;
  std::uint32_t top = std::min(level(c), std::min(level(t), level(e)));
  auto part = [&](std::uint32_t f, std::uint32_t& f0, std::uint32_t& f1) {
    if (level(f) == top) { f0 = nodes_[f].low; f1 = nodes_[f].high; }
    else { f0 = f1 = f; }
  };
  std::uint32_t c0, c1, t0, t1, e0, e1;
  part(c, c0, c1);
  part(t, t0, t1);
  part(e, e0, e1);
  std::uint32_t r = mk(top, ite_rec(c0, t0, e0), ite_rec(c1, t1, e1));
  cache_store(kTagIte, c, t, e, r);
  return r;
}

node_ref manager::ite(node_ref c, node_ref t, node_ref e) {
  return make_ref(ite_rec(idx(c, "ite"), idx(t, "ite"), idx(e, "ite")));
}

std::uint32_t manager::restrict_rec(std::uint32_t f, std::uint32_t v, bool value) {
  if (level(f) > v) return f;
  std::uint32_t out;
  if (cache_lookup(kTagRestrict, f, (v << 1) | (value ? 1u : 0u), 0, out)) return out;
  const node n = nodes_[f];
  std::uint32_t r;
  if (n.var == v) {
    r = value ? n.high : n.low;
  } else {
    r = mk(n.var, restrict_rec(n.low, v, value), restrict_rec(n.high, v, value));
  }
  cache_store(kTagRestrict, f, (v << 1) | (value ? 1u : 0u), 0, r);
  return r;
}

node_ref manager::restrict_var(node_ref f, unsigned v, bool value) {
  if (v >= n_vars_) throw error("restrict_var: variable index out of range");
  return make_ref(restrict_rec(idx(f, "restrict_var"), v, value));
}

node_ref manager::cube(const var_set& vars) {
  std::uint32_t r = 1;
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
    if (*it >= n_vars_) throw error("cube: variable index out of range");
    if (r != 1 && level(r) <= *it)
      throw error("cube: variable set must be sorted and duplicate-free");
    r = mk(*it, 0, r);
  }
  return make_ref(r);
}

var_set manager::cube_vars(node_ref cube) const {
  var_set vs;
  std::uint32_t f = idx(cube, "cube_vars");
  while (f >= 2) {
    const node& n = nodes_[f];
    if (n.low != 0) throw error("cube_vars: not a positive cube");
    vs.push_back(n.var);
    f = n.high;
  }
  if (f != 1) throw error("cube_vars: not a positive cube");
  return vs;
}

std::uint32_t manager::exists_rec(std::uint32_t f, std::uint32_t cube) {
  if (f < 2) return f;
  while (cube >= 2 && level(cube) < level(f)) cube = nodes_[cube].high;
  if (cube < 2) return f;
  std::uint32_t out;
  if (cache_lookup(kTagExists, f, cube, 0, out)) return out;
  const node n = nodes_[f];
  std::uint32_t r;
  if (n.var == level(cube)) {
    std::uint32_t rest = nodes_[cube].high;
    std::uint32_t a = exists_rec(n.low, rest);
    r = (a == 1) ? 1 : apply_rec(bool_op::OR, a, exists_rec(n.high, rest));
  } else {
    r = mk(n.var, exists_rec(n.low, cube), exists_rec(n.high, cube));
  }
  cache_store(kTagExists, f, cube, 0, r);
  return r;
}

node_ref manager::exists(node_ref f, node_ref vars_cube) {
  std::uint32_t c = idx(vars_cube, "exists");
  cube_vars(vars_cube);  // validates shape
  return make_ref(exists_rec(idx(f, "exists"), c));
}

std::uint32_t manager::and_exists_rec(std::uint32_t f, std::uint32_t g,
                                      std::uint32_t cube) {
  if (f == 0 || g == 0) return 0;
  if (f == 1 && g == 1) return 1;
  if (f == 1) return exists_rec(g, cube);
  if (g == 1) return exists_rec(f, cube);
  if (f == g) return exists_rec(f, cube);
  if (f > g) std::swap(f, g);
  std::uint32_t top = std::min(level(f), level(g));
  while (cube >= 2 && level(cube) < top) cube = nodes_[cube].high;
  if (cube < 2) return apply_rec(bool_op::AND, f, g);
  std::uint32_t out;
  if (cache_lookup(kTagAndExists, f, g, cube, out)) return out;
  std::uint32_t f0 = f, f1 = f, g0 = g, g1 = g;
  if (level(f) == top) { f0 = nodes_[f].low; f1 = nodes_[f].high; }
  if (level(g) == top) { g0 = nodes_[g].low; g1 = nodes_[g].high; }
  std::uint32_t r;
  if (level(cube) == top) {
    std::uint32_t rest = nodes_[cube].high;
    std::uint32_t a = and_exists_rec(f0, g0, rest);
    r = (a == 1) ? 1 : apply_rec(bool_op::OR, a, and_exists_rec(f1, g1, rest));
  } else {
    r = mk(top, and_exists_rec(f0, g0, cube), and_exists_rec(f1, g1, cube));
  }
  cache_store(kTagAndExists, f, g, cube, r);
  return r;
}

node_ref manager::and_exists(node_ref f, node_ref g, node_ref vars_cube) {
  std::uint32_t c = idx(vars_cube, "and_exists");
  cube_vars(vars_cube);
  return make_ref(and_exists_rec(idx(f, "and_exists"), idx(g, "and_exists"), c));
}

var_pairing manager::make_pairing(std::vector<std::pair<unsigned, unsigned>> pairs) {
  pairing_data data;
  data.map.resize(n_vars_);
  data.is_target.assign(n_vars_, false);
  for (unsigned v = 0; v < n_vars_; ++v) data.map[v] = v;
  std::vector<bool> is_from(n_vars_, false);
  for (const auto& [from, to] : pairs) {
    if (from >= n_vars_ || to >= n_vars_)
      throw error("make_pairing: variable index out of range");
    if (is_from[from] || data.is_target[from] || is_from[to] || data.is_target[to])
      throw error("make_pairing: pairs must be disjoint");
    is_from[from] = true;
    data.is_target[to] = true;
    data.map[from] = to;
  }
  var_pairing p;
  p.mgr_ = mgr_id_;
  p.id_ = static_cast<std::uint32_t>(pairings_.size());
  p.pairs_ = std::move(pairs);
  pairings_.push_back(std::move(data));
  return p;
}

std::uint32_t manager::rename_rec(std::uint32_t f, const pairing_data& p,
                                  std::uint32_t pid) {
  if (f < 2) return f;
  std::uint32_t out;
  if (cache_lookup(kTagRename, f, pid, 0, out)) return out;
  const node n = nodes_[f];
  if (p.is_target[n.var])
    throw error("rename: target variable present in support");
  std::uint32_t lo = rename_rec(n.low, p, pid);
  std::uint32_t hi = rename_rec(n.high, p, pid);
  std::uint32_t nv = p.map[n.var];
  if (nv >= level(lo) || nv >= level(hi))
    throw error("rename: pairing does not preserve the variable order");
  std::uint32_t r = mk(nv, lo, hi);
  cache_store(kTagRename, f, pid, 0, r);
  return r;
}

node_ref manager::rename(node_ref f, const var_pairing& pairing) {
  if (pairing.mgr_ != mgr_id_)
    throw error("rename: pairing from a different manager");
  return make_ref(rename_rec(idx(f, "rename"), pairings_[pairing.id_], pairing.id_));
}

bool manager::evaluate(node_ref f, const std::vector<bool>& values) const {
  if (values.size() != n_vars_)
    throw error("evaluate: assignment must cover all variables");
  std::uint32_t cur = idx(f, "evaluate");
  while (cur >= 2) {
    const node& n = nodes_[cur];
    cur = values[n.var] ? n.high : n.low;
  }
  return cur == 1;
}

void manager::collect_support(std::uint32_t f, std::vector<bool>& seen,
                              std::vector<std::uint32_t>& stack) const {
  std::vector<bool> visited(nodes_.size(), false);
  stack.push_back(f);
  while (!stack.empty()) {
    std::uint32_t cur = stack.back();
    stack.pop_back();
    if (cur < 2 || visited[cur]) continue;
    visited[cur] = true;
    seen[nodes_[cur].var] = true;
    stack.push_back(nodes_[cur].low);
    stack.push_back(nodes_[cur].high);
  }
}

var_set manager::support(node_ref f) const {
  std::vector<bool> seen(n_vars_, false);
  std::vector<std::uint32_t> stack;
  collect_support(idx(f, "support"), seen, stack);
  var_set vs;
  for (unsigned v = 0; v < n_vars_; ++v)
    if (seen[v]) vs.push_back(v);
  return vs;
}

std::size_t manager::node_count(node_ref f) const {
  std::uint32_t root = idx(f, "node_count");
  if (root < 2) return 0;
  std::vector<bool> visited(nodes_.size(), false);
  std::vector<std::uint32_t> stack{root};
  std::size_t count = 0;
  while (!stack.empty()) {
    std::uint32_t cur = stack.back();
    stack.pop_back();
    if (cur < 2 || visited[cur]) continue;
    visited[cur] = true;
    ++count;
    stack.push_back(nodes_[cur].low);
    stack.push_back(nodes_[cur].high);
  }
  return count;
}

namespace {

// DP over (node, position in the variable list); counts can exceed 64 bits
// for wide variable sets, so accumulate in 128 bits and saturate on output.
struct sat_counter {
  const std::function<std::uint32_t(std::uint32_t, bool)>& child;
  const std::function<std::uint32_t(std::uint32_t)>& var_of;
  const var_set& over;
  std::unordered_map<std::uint64_t, unsigned __int128> memo;

  unsigned __int128 run(std::uint32_t f, std::size_t pos) {
    if (f == 0) return 0;
    if (pos == over.size()) return 1;  // support covered, so f == 1 here
    std::uint64_t key = (std::uint64_t(f) << 16) | pos;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    unsigned __int128 r;
    if (f < 2 || var_of(f) > over[pos]) {
      r = 2 * run(f, pos + 1);
    } else {
      r = run(child(f, false), pos + 1) + run(child(f, true), pos + 1);
    }
    memo.emplace(key, r);
    return r;
  }
};

std::uint64_t saturate(unsigned __int128 v) {
  return v > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t manager::count_sat(node_ref f, const var_set& over) {
  if (over.size() >= (1u << 16)) throw error("count_sat: variable set too large");
  for (std::size_t i = 1; i < over.size(); ++i)
    if (over[i - 1] >= over[i])
      throw error("count_sat: variable set must be sorted and duplicate-free");
  var_set sup = support(f);
  if (!std::includes(over.begin(), over.end(), sup.begin(), sup.end()))
    throw error("count_sat: support not covered by the variable set");

  std::function<std::uint32_t(std::uint32_t, bool)> child =
      [&](std::uint32_t n, bool hi) { return hi ? nodes_[n].high : nodes_[n].low; };
  std::function<std::uint32_t(std::uint32_t)> var_of = [&](std::uint32_t n) {
    return nodes_[n].var;
  };
  sat_counter counter{child, var_of, over, {}};
  return saturate(counter.run(idx(f, "count_sat"), 0));
}

void manager::enumerate_sat(
    node_ref f, const var_set& over,
    const std::function<bool(const sat_assignment&)>& visit) {
  for (std::size_t i = 1; i < over.size(); ++i)
    if (over[i - 1] >= over[i])
      throw error("enumerate_sat: variable set must be sorted and duplicate-free");
  var_set sup = support(f);
  if (!std::includes(over.begin(), over.end(), sup.begin(), sup.end()))
    throw error("enumerate_sat: support not covered by the variable set");

  sat_assignment current(over.size());
  for (std::size_t i = 0; i < over.size(); ++i)
    current[i] = assignment_entry{over[i], false};

  struct walker {
    const manager& m;
    const var_set& over;
    sat_assignment& current;
    const std::function<bool(const sat_assignment&)>& visit;
    bool run(std::uint32_t f, std::size_t pos) {  // returns false to stop
      if (f == 0) return true;
      if (pos == over.size()) return visit(current);
      std::uint32_t lo = f, hi = f;
      if (f >= 2 && m.nodes_[f].var == over[pos]) {
        lo = m.nodes_[f].low;
        hi = m.nodes_[f].high;
      }
      current[pos].value = false;
      if (!run(lo, pos + 1)) return false;
      current[pos].value = true;
      return run(hi, pos + 1);
    }
  };
  walker w{*this, over, current, visit};
  w.run(idx(f, "enumerate_sat"), 0);
}

std::vector<sat_assignment> manager::all_sat(node_ref f, const var_set& over) {
  std::vector<sat_assignment> out;
  enumerate_sat(f, over, [&](const sat_assignment& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

sat_assignment manager::pick_sat(node_ref f, const var_set& over, std::uint64_t k) {
  std::function<std::uint32_t(std::uint32_t, bool)> child =
      [&](std::uint32_t n, bool hi) { return hi ? nodes_[n].high : nodes_[n].low; };
  std::function<std::uint32_t(std::uint32_t)> var_of = [&](std::uint32_t n) {
    return nodes_[n].var;
  };
  sat_counter cnt{child, var_of, over, {}};
  std::uint32_t root = idx(f, "pick_sat");
  if (count_sat(f, over) <= k && cnt.run(root, 0) <= k)
    throw error("pick_sat: index out of range");
  unsigned __int128 want = k;
  sat_assignment out(over.size());
  std::uint32_t cur = root;
  for (std::size_t pos = 0; pos < over.size(); ++pos) {
    std::uint32_t lo = cur, hi = cur;
    if (cur >= 2 && nodes_[cur].var == over[pos]) {
      lo = nodes_[cur].low;
      hi = nodes_[cur].high;
    }
    unsigned __int128 nlo = cnt.run(lo, pos + 1);
    bool value = want >= nlo;
    if (value) want -= nlo;
    out[pos] = assignment_entry{over[pos], value};
    cur = value ? hi : lo;
  }
  return out;
}

bool manager::is_terminal(node_ref f) const { return idx(f, "is_terminal") < 2; }

unsigned manager::node_var(node_ref f) const {
  std::uint32_t i = idx(f, "node_var");
  if (i < 2) throw error("node_var: terminal node");
  return nodes_[i].var;
}

node_ref manager::low(node_ref f) const {
  std::uint32_t i = idx(f, "low");
  if (i < 2) throw error("low: terminal node");
  return make_ref(nodes_[i].low);
}

node_ref manager::high(node_ref f) const {
  std::uint32_t i = idx(f, "high");
  if (i < 2) throw error("high: terminal node");
  return make_ref(nodes_[i].high);
}

}  // namespace uplan::bdd
