#pragma once

// Compiles a validated domain description into decision variables and a
// (partitioned) symbolic transition system.
//
// Variable order: environment action blocks, then system action blocks, then
// the state variables in declaration order with current and next bits
// interleaved per bit. Bit k of a block is the k-th least significant bit.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uplan/bdd.hpp"
#include "uplan/nadl.hpp"

namespace uplan::enc {

enum class var_role { env_action, sys_action, current, next };

struct layout_entry {
  var_role role;
  std::string name;  // agent name for action bits, state variable otherwise
  unsigned bit;      // significance within the block
};

struct var_layout {
  bool numeric = false;
  unsigned range = 2;  // value count; values are 0..range-1
  std::vector<unsigned> cur;  // decision variable indices, LSB first
  std::vector<unsigned> nxt;
};

struct agent_layout {
  unsigned action_count = 0;
  std::vector<unsigned> id_bits;  // LSB first; empty for a single action
};

struct encoding {
  unsigned total_vars = 0;
  std::vector<var_layout> state_vars;    // parallel to domain_desc::vars
  std::vector<agent_layout> env_agents;  // parallel to environment_agents
  std::vector<agent_layout> sys_agents;
  std::vector<layout_entry> layout;      // indexed by decision variable

  bdd::var_set current_vars;
  bdd::var_set next_vars;
  bdd::var_set env_action_vars;
  bdd::var_set sys_action_vars;

  // Environment agents first, then system agents (the global agent order).
  const agent_layout& agent(std::size_t i) const {
    return i < env_agents.size() ? env_agents[i] : sys_agents[i - env_agents.size()];
  }
  std::size_t agent_count() const { return env_agents.size() + sys_agents.size(); }
};

// Bits needed to represent `count` distinct values (0 for a single value).
unsigned bits_for(std::uint64_t count);

encoding allocate(const nadl::domain_desc& dd);

// One `var <index> <role> <name> <bit>` line per decision variable.
std::string layout_text(const encoding& enc);

// Arithmetic bit vectors, least significant bit first. Addition and
// subtraction widen by one bit, so values never wrap within the computed
// width and an underflowed subtraction cannot collide with in-range codes.
struct bitvec {
  std::vector<bdd::node_ref> bits;
};

bitvec bv_constant(bdd::manager& m, std::uint64_t value);
bitvec bv_add(bdd::manager& m, const bitvec& a, const bitvec& b);
bitvec bv_sub(bdd::manager& m, const bitvec& a, const bitvec& b);
bdd::node_ref bv_compare(bdd::manager& m, nadl::rel_op op, const bitvec& a,
                         const bitvec& b);

bitvec encode_arith(bdd::manager& m, const encoding& enc, const nadl::arith& a);

// Formula must be if-then-else free (see nadl::desugar_ite) and validated.
bdd::node_ref encode_formula(bdd::manager& m, const encoding& enc,
                             const nadl::formula& f);

// True exactly on the valid codes 0..range-1 of a state variable.
bdd::node_ref range_constraint(bdd::manager& m, const encoding& enc,
                               std::size_t var_idx, bool next);

// i(agent) = action_id over the agent's id block (global agent index).
bdd::node_ref action_eq(bdd::manager& m, const encoding& enc,
                        std::size_t agent_idx, unsigned action_id);

// Cube pinning every current-state bit to the given values (one value per
// state variable, in declaration order). Values are range checked.
bdd::node_ref state_cube(bdd::manager& m, const encoding& enc,
                         const std::vector<std::uint64_t>& values);

// The three relation families plus range constraints, as conjunct lists.
std::vector<bdd::node_ref> build_action_constraint(bdd::manager& m,
                                                   const nadl::domain_desc& dd,
                                                   const encoding& enc);
std::vector<bdd::node_ref> build_frame(bdd::manager& m,
                                       const nadl::domain_desc& dd,
                                       const encoding& enc);
std::vector<bdd::node_ref> build_interference(bdd::manager& m,
                                              const nadl::domain_desc& dd,
                                              const encoding& enc);
std::vector<bdd::node_ref> build_range_constraints(bdd::manager& m,
                                                   const nadl::domain_desc& dd,
                                                   const encoding& enc);

bdd::node_ref build_init(bdd::manager& m, const nadl::domain_desc& dd,
                         const encoding& enc);
bdd::node_ref build_goal(bdd::manager& m, const nadl::domain_desc& dd,
                         const encoding& enc);

enum class encode_mode { monolithic, partitioned };

struct partition {
  bdd::node_ref rel;
  bdd::node_ref quant;  // next-state and environment-action cube scheduled here
};

// Transition system over one manager. Partitions are listed in application
// order; every next-state and environment-action variable is quantified at
// the last partition that mentions it, so conjoining the partitions in order
// with and_exists computes the same relation as the monolithic product.
class transition_system {
public:
  transition_system(bdd::manager& m, const nadl::domain_desc& dd,
                    encode_mode mode, unsigned partition_budget = 10);

  bdd::manager& mgr() const { return *mgr_; }
  const nadl::domain_desc& domain() const { return *dd_; }
  const encoding& enc() const { return enc_; }
  encode_mode mode() const { return mode_; }

  bdd::node_ref init() const { return init_; }
  bdd::node_ref goal() const { return goal_; }
  const std::vector<partition>& partitions() const { return partitions_; }
  std::size_t basic_group_count() const { return basic_group_count_; }

  bdd::node_ref current_cube() const { return current_cube_; }
  bdd::node_ref next_cube() const { return next_cube_; }
  bdd::node_ref sys_action_cube() const { return sys_action_cube_; }
  bdd::node_ref env_action_cube() const { return env_action_cube_; }
  const bdd::var_pairing& prime() const { return prime_; }
  const bdd::var_pairing& unprime() const { return unprime_; }

  // Conjunction of all basic conjuncts, environment choices still visible.
  bdd::node_ref full_relation() const;
  // Same with environment action variables existentially quantified.
  bdd::node_ref monolithic() const;

  // Every (state, system action) pair has at most one successor.
  bool deterministic() const;

private:
  void build_partitions(std::vector<bdd::node_ref> conjuncts, unsigned budget);

  bdd::manager* mgr_;
  const nadl::domain_desc* dd_;
  encoding enc_;
  encode_mode mode_;
  bdd::node_ref init_, goal_;
  std::vector<bdd::node_ref> basic_conjuncts_;
  std::vector<partition> partitions_;
  std::size_t basic_group_count_ = 0;
  bdd::node_ref current_cube_, next_cube_, sys_action_cube_, env_action_cube_;
  bdd::var_pairing prime_, unprime_;
  mutable std::optional<bdd::node_ref> full_, mono_;
  mutable std::optional<bool> det_;
};

}  // namespace uplan::enc
