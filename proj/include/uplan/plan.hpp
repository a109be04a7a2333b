#pragma once

// Universal planning over a symbolic transition system: weak and strong
// preimages computed through the partition schedule, the strong, strong
// cyclic and optimistic fixpoint algorithms, and plan execution helpers
// (action extraction, forward images, sequential plans).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uplan/encode.hpp"

namespace uplan::plan {

enum class algorithm { strong, strong_cyclic, optimistic, deterministic };

const char* algorithm_name(algorithm a);
std::optional<algorithm> algorithm_from(std::string_view name);

struct iteration_stat {
  std::uint64_t new_states = 0;  // saturating count
  std::size_t plan_nodes = 0;
};

// Commit structure of a run; strong cyclic alternates between the two kinds.
struct phase_event {
  bool strong = false;
  unsigned layers = 0;  // preimage layers contributing to the commit
};

struct universal_plan {
  bdd::node_ref rules;  // over current-state and system-action variables
  algorithm alg = algorithm::optimistic;
  unsigned iterations = 0;
  bool covers_init = true;  // false only for allow_partial fixpoint plans
  std::vector<iteration_stat> stats;
  std::vector<bdd::node_ref> visited_layers;  // V_0 = goal, then per commit
  std::vector<phase_event> phases;
};

enum class failure_reason {
  none,
  no_strong_plan,
  no_strong_cyclic_plan,
  no_optimistic_plan,
};

const char* failure_text(failure_reason r);

struct plan_outcome {
  std::optional<universal_plan> plan;
  failure_reason reason = failure_reason::none;
  bool ok() const { return plan.has_value(); }
};

struct plan_options {
  std::uint64_t iteration_cap = 0;  // 0: 2^(2 * state bits), saturated at 2^62
  bool prune = true;  // retained as a toggle for the coverage-identity checks
  // Return the accumulated fixpoint plan instead of failing when the preimage
  // stops contributing before the initial states are covered. Needed for
  // domains whose initial condition admits unsolvable configurations, such
  // as the obstacle grid with an obstacle parked on the goal cell.
  bool allow_partial = false;
};

// All (state, system action) pairs with some transition into v, environment
// choices resolved existentially. v ranges over current-state variables.
bdd::node_ref weak_preimage_sa(const enc::transition_system& ts, bdd::node_ref v);

// Applicable pairs all of whose transitions stay in v:
// weak(v) minus weak(complement of v).
bdd::node_ref strong_preimage_sa(const enc::transition_system& ts, bdd::node_ref v);

bdd::node_ref states_of(const enc::transition_system& ts, bdd::node_ref sa);

plan_outcome optimistic_plan(const enc::transition_system& ts,
                             const plan_options& opts = {});
plan_outcome strong_plan(const enc::transition_system& ts,
                         const plan_options& opts = {});
plan_outcome strong_cyclic_plan(const enc::transition_system& ts,
                                const plan_options& opts = {});

// Dispatch; `deterministic` runs the optimistic search and requires a
// deterministic domain.
plan_outcome plan_with(algorithm a, const enc::transition_system& ts,
                       const plan_options& opts = {});

// Successors of `states` under the system action(s) in `action_cube`, over
// any environment choice. Pass one() for all actions.
bdd::node_ref image(const enc::transition_system& ts, bdd::node_ref states,
                    bdd::node_ref action_cube);

// One value per domain variable, in declaration order (bools are 0/1).
using state_values = std::vector<std::uint64_t>;

bdd::node_ref state_cube(const enc::transition_system& ts, const state_values& s);
state_values values_from_assignment(const enc::encoding& enc,
                                    const bdd::sat_assignment& a, bool next);

struct joint_action {
  std::vector<unsigned> ids;  // one action id per system agent
  std::vector<std::pair<std::string, std::string>> named;  // (agent, action)
};

std::string to_text(const joint_action& a);

// Advised system joint actions at a concrete state, in lexicographic order
// of the action-id assignment. Empty when the state is outside every rule.
std::vector<joint_action> extract_actions(const enc::transition_system& ts,
                                          bdd::node_ref rules,
                                          const state_values& state);

bdd::node_ref joint_action_cube(const enc::transition_system& ts,
                                const std::vector<unsigned>& ids);

struct seq_failure {
  std::string message;
};

struct seq_result {
  std::vector<joint_action> steps;
  std::optional<seq_failure> failure;
  bool ok() const { return !failure.has_value(); }
};

// Deterministic-domain execution of a universal plan from a concrete start
// state, smallest action-id assignment first on ties.
seq_result sequential_plan(const enc::transition_system& ts, bdd::node_ref rules,
                           const state_values& start, std::uint64_t max_steps);

}  // namespace uplan::plan
