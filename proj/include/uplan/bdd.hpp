#pragma once

// Reduced ordered binary decision diagram engine: shared unique table,
// memoized boolean operations, quantification, renaming, and satisfying
// assignment queries. Node handles are canonical: two handles from the same
// manager denote the same function iff they are identical.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uplan {

class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace bdd {

class manager;

// Opaque handle to a node owned by one manager. The manager id is part of
// the handle so that refs from distinct managers never mix silently.
class node_ref {
public:
  node_ref() = default;
  bool operator==(const node_ref&) const = default;
  bool operator<(const node_ref& o) const {
    return mgr_ != o.mgr_ ? mgr_ < o.mgr_ : index_ < o.index_;
  }
  std::uint64_t key() const {
    return (std::uint64_t(mgr_) << 32) | index_;
  }

private:
  friend class manager;
  node_ref(std::uint32_t mgr, std::uint32_t index) : mgr_(mgr), index_(index) {}
  std::uint32_t mgr_ = 0;
  std::uint32_t index_ = 0;
};

// Sorted, duplicate-free set of decision variable indices.
using var_set = std::vector<unsigned>;

// Disjoint (from, to) variable pairs used for substitution. Created and
// interned by the owning manager.
class var_pairing {
public:
  const std::vector<std::pair<unsigned, unsigned>>& pairs() const { return pairs_; }

private:
  friend class manager;
  std::uint32_t mgr_ = 0;
  std::uint32_t id_ = 0;
  std::vector<std::pair<unsigned, unsigned>> pairs_;
};

enum class bool_op : std::uint8_t { AND, OR, XOR, IMPLIES, IFF, DIFF };

struct assignment_entry {
  unsigned var;
  bool value;
  bool operator==(const assignment_entry&) const = default;
};
// Sorted by variable index.
using sat_assignment = std::vector<assignment_entry>;

class manager {
public:
  explicit manager(unsigned var_count);
  manager(const manager&) = delete;
  manager& operator=(const manager&) = delete;

  unsigned var_count() const { return n_vars_; }

  node_ref zero() const { return make_ref(0); }
  node_ref one() const { return make_ref(1); }
  node_ref constant(bool b) const { return make_ref(b ? 1 : 0); }

  // Single-variable function; throws on out-of-range index.
  node_ref var(unsigned v);
  node_ref nvar(unsigned v);

  node_ref apply(bool_op op, node_ref f, node_ref g);
  node_ref land(node_ref f, node_ref g) { return apply(bool_op::AND, f, g); }
  node_ref lor(node_ref f, node_ref g) { return apply(bool_op::OR, f, g); }
  node_ref lxor(node_ref f, node_ref g) { return apply(bool_op::XOR, f, g); }
  node_ref implies(node_ref f, node_ref g) { return apply(bool_op::IMPLIES, f, g); }
  node_ref iff(node_ref f, node_ref g) { return apply(bool_op::IFF, f, g); }
  node_ref diff(node_ref f, node_ref g) { return apply(bool_op::DIFF, f, g); }

  node_ref negate(node_ref f);
  node_ref ite(node_ref c, node_ref t, node_ref e);

  // Cofactor of f with variable v fixed to value.
  node_ref restrict_var(node_ref f, unsigned v, bool value);

  // Positive cube over a variable set; used to drive quantification.
  node_ref cube(const var_set& vars);
  var_set cube_vars(node_ref cube) const;

  node_ref exists(node_ref f, node_ref vars_cube);
  node_ref exists(node_ref f, const var_set& vars) { return exists(f, cube(vars)); }

  // Fused exists(land(f, g), vars) in a single traversal.
  node_ref and_exists(node_ref f, node_ref g, node_ref vars_cube);

  var_pairing make_pairing(std::vector<std::pair<unsigned, unsigned>> pairs);

  // Substitutes each from-variable by its to-variable. Requires that no
  // to-variable occurs in the support of f and that the substitution is
  // monotone on the support (both hold for the interleaved state encoding).
  node_ref rename(node_ref f, const var_pairing& pairing);

  // Truth value under a full assignment (values.size() == var_count()).
  bool evaluate(node_ref f, const std::vector<bool>& values) const;

  // Number of satisfying assignments over the given variables, saturating
  // at UINT64_MAX. Requires support(f) to be a subset of `over`.
  std::uint64_t count_sat(node_ref f, const var_set& over);

  // Visits every satisfying assignment over `over` exactly once, in
  // lexicographic order of the variable order (false before true).
  // The visitor returns false to stop early.
  void enumerate_sat(node_ref f, const var_set& over,
                     const std::function<bool(const sat_assignment&)>& visit);
  std::vector<sat_assignment> all_sat(node_ref f, const var_set& over);

  // k-th satisfying assignment in the enumerate_sat order.
  sat_assignment pick_sat(node_ref f, const var_set& over, std::uint64_t k);

  // Distinct internal nodes reachable from f (terminals excluded).
  std::size_t node_count(node_ref f) const;

  var_set support(node_ref f) const;

  // Structural access for serialization and audits.
  bool is_terminal(node_ref f) const;
  unsigned node_var(node_ref f) const;
  node_ref low(node_ref f) const;
  node_ref high(node_ref f) const;

  std::size_t total_nodes() const { return nodes_.size(); }

  // Disabling the operation cache must not change any result; used by the
  // determinism checks.
  void set_op_cache_enabled(bool on);

private:
  struct node {
    std::uint32_t var;
    std::uint32_t low;
    std::uint32_t high;
  };

  struct cache_entry {
    std::uint32_t a = kInvalid;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
    std::uint32_t tag = 0;
    std::uint32_t result = 0;
  };

  struct pairing_data {
    std::vector<std::uint32_t> map;     // identity outside the pairs
    std::vector<bool> is_target;
  };

  static constexpr std::uint32_t kInvalid = 0xffffffffu;

  std::uint32_t idx(node_ref r, const char* where) const;
  node_ref make_ref(std::uint32_t i) const { return node_ref(mgr_id_, i); }
  std::uint32_t level(std::uint32_t f) const { return nodes_[f].var; }

  std::uint32_t mk(std::uint32_t var, std::uint32_t lo, std::uint32_t hi);
  void grow_table();
  std::uint32_t table_insert(std::uint32_t var, std::uint32_t lo, std::uint32_t hi);

  bool cache_lookup(std::uint32_t tag, std::uint32_t a, std::uint32_t b,
                    std::uint32_t c, std::uint32_t& out) const;
  void cache_store(std::uint32_t tag, std::uint32_t a, std::uint32_t b,
                   std::uint32_t c, std::uint32_t result);

  std::uint32_t apply_rec(bool_op op, std::uint32_t f, std::uint32_t g);
  std::uint32_t not_rec(std::uint32_t f);
  std::uint32_t ite_rec(std::uint32_t c, std::uint32_t t, std::uint32_t e);
  std::uint32_t restrict_rec(std::uint32_t f, std::uint32_t v, bool value);
  std::uint32_t exists_rec(std::uint32_t f, std::uint32_t cube);
  std::uint32_t and_exists_rec(std::uint32_t f, std::uint32_t g, std::uint32_t cube);
  std::uint32_t rename_rec(std::uint32_t f, const pairing_data& p, std::uint32_t pid);

  void collect_support(std::uint32_t f, std::vector<bool>& seen,
                       std::vector<std::uint32_t>& stack) const;

  unsigned n_vars_;
  std::uint32_t mgr_id_;
  std::vector<node> nodes_;
  std::vector<std::uint32_t> table_;  // open addressing; value = node index + 1
  std::size_t table_mask_ = 0;
  std::vector<cache_entry> cache_;
  std::size_t cache_mask_ = 0;
  bool cache_enabled_ = true;
  std::vector<pairing_data> pairings_;

  static std::uint32_t next_mgr_id();
};

}  // namespace bdd
}  // namespace uplan
