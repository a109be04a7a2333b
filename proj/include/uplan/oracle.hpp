#pragma once

// Brute-force explicit-state reference semantics: enumerates every
// range-valid state and joint action, evaluates the action/frame/interference
// conjunction directly on triples, and replicates the planning algorithms
// over plain sets. Used to cross-validate the symbolic implementation on
// desk-scale domains, so it deliberately shares no code with the encoder.

#include <cstdint>
#include <optional>
#include <vector>

#include "uplan/nadl.hpp"
#include "uplan/plan.hpp"

namespace uplan::oracle {

struct caps {
  std::size_t max_states = std::size_t(1) << 14;
  std::size_t max_joint = std::size_t(1) << 10;
};

// Independent evaluation of formulas over explicit values; if-then-else is
// evaluated as its abbreviation, arithmetic over signed integers.
long long eval_arith(const nadl::arith& a, const std::vector<std::uint64_t>& cur,
                     const std::vector<std::uint64_t>& nxt);
bool eval_formula(const nadl::formula& f, const std::vector<std::uint64_t>& cur,
                  const std::vector<std::uint64_t>& nxt);

struct explicit_nfa {
  const nadl::domain_desc* dd = nullptr;
  std::vector<std::uint64_t> radices;  // value count per state variable
  std::size_t state_count = 0;

  // Input alphabet: joint actions of system agents (action index per agent),
  // plus the environment completions.
  std::vector<std::vector<unsigned>> inputs;
  std::vector<std::vector<unsigned>> env_choices;

  // delta[s * inputs.size() + i]: sorted successor states.
  std::vector<std::vector<std::uint32_t>> delta;
  std::vector<char> goal_states;
  std::vector<char> init_states;

  std::vector<std::uint64_t> state_values(std::uint32_t id) const;
  std::uint32_t state_id(const std::vector<std::uint64_t>& values) const;
  const std::vector<std::uint32_t>& successors(std::uint32_t s,
                                               std::size_t i) const {
    return delta[s * inputs.size() + i];
  }
  bool has_transition(std::uint32_t s, std::size_t i, std::uint32_t t) const;
  std::size_t input_count() const { return inputs.size(); }
  std::size_t pair_count() const { return state_count * inputs.size(); }

  // Debug dump: one "<state> <input> <state'>" line per transition.
  std::string dump_transitions() const;
};

explicit_nfa expand(const nadl::domain_desc& dd, caps c = {});

using state_mask = std::vector<char>;  // indexed by state id
using sa_mask = std::vector<char>;     // indexed by s * inputs + i

state_mask states_of(const explicit_nfa& nfa, const sa_mask& sa);
sa_mask weak_preimage(const explicit_nfa& nfa, const state_mask& v);
// Applicability required: at least one transition, all inside v.
sa_mask strong_preimage(const explicit_nfa& nfa, const state_mask& v);

struct explicit_plan {
  sa_mask rules;
  unsigned iterations = 0;
  std::vector<state_mask> visited_layers;
  std::vector<plan::phase_event> phases;
};

struct oracle_outcome {
  std::optional<explicit_plan> plan;
  plan::failure_reason reason = plan::failure_reason::none;
  bool ok() const { return plan.has_value(); }
};

oracle_outcome oracle_plan(const explicit_nfa& nfa, plan::algorithm alg);

// Best and worst execution lengths of a universal plan from every state.
struct plan_evaluation {
  static constexpr std::uint64_t unbounded = UINT64_MAX;

  std::vector<std::uint64_t> best;   // shortest lucky execution; unbounded if none
  std::vector<std::uint64_t> worst;  // adversarial; unbounded when not finite
  std::vector<char> deadend_reachable;

  enum class worst_kind { finite, cycle, deadend };
  struct profile {
    std::uint64_t best;
    worst_kind kind;
    std::uint64_t worst;  // meaningful when kind == finite
  };
  profile at(std::uint32_t s) const;
};

plan_evaluation evaluate_plan(const explicit_nfa& nfa, const sa_mask& rules);

}  // namespace uplan::oracle
