#pragma once

// NADL front end: syntax tree, parser, semantic validator, desugaring and
// pretty printing for multi-agent non-deterministic domain descriptions.
//
// Concrete syntax sketch (line comments start with %):
//
//   variables
//     nat(4) pos
//     bool robot_works
//   system
//     agt: Robot
//       Lift-Block
//         con: pos
//         pre: pos < 3
//         eff: robot_works -> pos' = pos + 1, pos' = pos
//   environment
//     agt: Baby
//       Hit-Robot
//         con: robot_works
//         pre: true
//         eff: ~robot_works => ~robot_works'
//   initially
//     pos = 0 /\ robot_works
//   goal
//     pos = 3
//
// Connectives: ~ /\ \/ => <=> and `c -> t, e` (if-then-else, loosest);
// relations < > <= >= = !=; arithmetic + - * / mod over nat variables;
// a trailing ' refers to the next-state value of a variable.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "uplan/bdd.hpp"

namespace uplan::nadl {

struct source_loc {
  unsigned line = 0;
  unsigned col = 0;
};

class parse_error : public error {
public:
  parse_error(source_loc where, const std::string& msg)
      : error(std::to_string(where.line) + ":" + std::to_string(where.col) +
              ": " + msg),
        loc(where) {}
  source_loc loc;
};

enum class rel_op { lt, le, gt, ge, eq, ne };
enum class arith_op { add, sub, mul, div, mod };
enum class connective { conj, disj, implies, iff };

struct arith;
using arith_ptr = std::unique_ptr<arith>;

struct arith {
  struct number {
    std::uint64_t value;
  };
  struct var_ref {
    std::string name;
    bool next;  // primed occurrence
    int index;  // position in domain_desc::vars
  };
  struct binary {
    arith_op op;
    arith_ptr lhs, rhs;
  };

  std::variant<number, var_ref, binary> node;
  source_loc loc;

  arith_ptr clone() const;
};

struct formula;
using formula_ptr = std::unique_ptr<formula>;

struct formula {
  struct constant {
    bool value;
  };
  struct prop_ref {
    std::string name;
    bool next;
    int index;
  };
  struct relation {
    rel_op op;
    arith_ptr lhs, rhs;
  };
  struct negation {
    formula_ptr arg;
  };
  struct binary {
    connective op;
    formula_ptr lhs, rhs;
  };
  struct if_then_else {
    formula_ptr cond, then_f, else_f;
  };

  std::variant<constant, prop_ref, relation, negation, binary, if_then_else> node;
  source_loc loc;

  formula_ptr clone() const;
};

struct state_var {
  std::string name;
  bool numeric;
  unsigned range;  // value count: 2 for bool, k for nat(k); values are 0..k-1
  source_loc loc;
};

struct action_desc {
  std::string name;
  std::vector<std::string> constrained;
  std::vector<int> constrained_idx;  // resolved, sorted
  formula_ptr pre;
  formula_ptr eff;
  source_loc loc;
};

struct agent_desc {
  std::string name;
  std::vector<action_desc> actions;
  source_loc loc;
};

// The parsed 7-tuple: state variables, system and environment agents with
// their action descriptions, and the initial and goal conditions.
struct domain_desc {
  std::vector<state_var> vars;
  std::vector<agent_desc> system_agents;
  std::vector<agent_desc> environment_agents;
  formula_ptr init;
  formula_ptr goal;

  int var_index(std::string_view name) const;
  std::size_t agent_count() const {
    return system_agents.size() + environment_agents.size();
  }
  // Environment agents first, then system agents (the encoding order).
  const agent_desc& agent(std::size_t i) const {
    return i < environment_agents.size()
               ? environment_agents[i]
               : system_agents[i - environment_agents.size()];
  }
};

domain_desc parse(std::string_view text);

struct violation {
  source_loc loc;
  std::string code;
  std::string message;
};

// Every invariant violation in the description; empty means valid.
std::vector<violation> validate(const domain_desc& dd);

// One line per violation: "ERROR <line>:<col> <code> <message>".
std::string format_violations(const std::vector<violation>& vs);

// Replaces every (c -> t, e) by (c /\ t) \/ (~c /\ e).
formula_ptr desugar_ite(const formula& f);
void desugar_ite(domain_desc& dd);

std::string to_text(const arith& a);
std::string to_text(const formula& f);
std::string to_text(const domain_desc& dd);

bool equal(const arith& a, const arith& b);
bool equal(const formula& a, const formula& b);
bool equal(const domain_desc& a, const domain_desc& b);

// True when the formula mentions no next-state variable.
bool is_state_formula(const formula& f);

}  // namespace uplan::nadl
