#include "uplan/plan.hpp"

#include <algorithm>
#include <sstream>

namespace uplan::plan {

const char* algorithm_name(algorithm a) {
  switch (a) {
    case algorithm::strong: return "strong";
    case algorithm::strong_cyclic: return "strong-cyclic";
    case algorithm::optimistic: return "optimistic";
    case algorithm::deterministic: return "deterministic";
  }
  return "?";
}

std::optional<algorithm> algorithm_from(std::string_view name) {
  if (name == "strong") return algorithm::strong;
  if (name == "strong-cyclic") return algorithm::strong_cyclic;
  if (name == "optimistic") return algorithm::optimistic;
  if (name == "deterministic") return algorithm::deterministic;
  return std::nullopt;
}

const char* failure_text(failure_reason r) {
  switch (r) {
    case failure_reason::no_strong_plan: return "No strong plan exists";
    case failure_reason::no_strong_cyclic_plan:
      return "No strong cyclic plan exists";
    case failure_reason::no_optimistic_plan: return "No optimistic plan exists";
    case failure_reason::none: break;
  }
  return "";
}

bdd::node_ref weak_preimage_sa(const enc::transition_system& ts, bdd::node_ref v) {
  bdd::manager& m = ts.mgr();
  bdd::node_ref u = m.rename(v, ts.prime());
  for (const enc::partition& p : ts.partitions())
    u = m.and_exists(p.rel, u, p.quant);
  return u;
}

bdd::node_ref strong_preimage_sa(const enc::transition_system& ts,
                                 bdd::node_ref v) {
  bdd::manager& m = ts.mgr();
  bdd::node_ref applicable = weak_preimage_sa(ts, v);
  bdd::node_ref escaping = weak_preimage_sa(ts, m.negate(v));
  return m.diff(applicable, escaping);
}

bdd::node_ref states_of(const enc::transition_system& ts, bdd::node_ref sa) {
  return ts.mgr().exists(sa, ts.sys_action_cube());
}

namespace {

std::uint64_t effective_cap(const enc::transition_system& ts,
                            const plan_options& opts) {
  if (opts.iteration_cap) return opts.iteration_cap;
  std::size_t bits = std::min<std::size_t>(62, 2 * ts.enc().current_vars.size());
  return std::uint64_t(1) << bits;
}

std::uint64_t state_count(const enc::transition_system& ts, bdd::node_ref s) {
  return ts.mgr().count_sat(s, ts.enc().current_vars);
}

struct run_state {
  bdd::node_ref visited;
  bdd::node_ref rules;
  universal_plan plan;
  std::uint64_t cap = 0;

  void commit(const enc::transition_system& ts, bdd::node_ref add_rules,
              bool strong, unsigned layers) {
    bdd::manager& m = ts.mgr();
    bdd::node_ref new_states = m.diff(states_of(ts, add_rules), visited);
    rules = m.lor(rules, add_rules);
    visited = m.lor(visited, new_states);
    plan.iterations += layers;
    plan.stats.push_back(
        iteration_stat{state_count(ts, new_states), m.node_count(rules)});
    plan.visited_layers.push_back(visited);
    plan.phases.push_back(phase_event{strong, layers});
  }
};

run_state start_run(const enc::transition_system& ts, algorithm alg,
                    const plan_options& opts) {
  run_state rs;
  rs.visited = ts.goal();
  rs.rules = ts.mgr().zero();
  rs.plan.alg = alg;
  rs.plan.visited_layers.push_back(rs.visited);
  rs.cap = effective_cap(ts, opts);
  return rs;
}

bool covered(const enc::transition_system& ts, const run_state& rs) {
  return ts.mgr().diff(ts.init(), rs.visited) == ts.mgr().zero();
}

plan_outcome finish(const enc::transition_system& ts, run_state&& rs) {
  rs.plan.rules = rs.rules;
  rs.plan.covers_init = ts.mgr().diff(ts.init(), rs.visited) == ts.mgr().zero();
  return plan_outcome{std::move(rs.plan), failure_reason::none};
}

// The shared skeleton: accumulate pruned preimages until the initial states
// are covered or the preimage stops contributing.
template <typename Preimage>
plan_outcome fixpoint_plan(const enc::transition_system& ts, algorithm alg,
                           failure_reason on_fail, Preimage&& preimage,
                           const plan_options& opts) {
  bdd::manager& m = ts.mgr();
  run_state rs = start_run(ts, alg, opts);
  while (!covered(ts, rs)) {
    if (rs.plan.iterations >= rs.cap)
      throw error("planning: iteration cap exceeded");
    bdd::node_ref sa = preimage(rs.visited);
    if (opts.prune) {
      bdd::node_ref pruned = m.diff(sa, rs.visited);
      if (pruned == m.zero()) {
        if (opts.allow_partial) return finish(ts, std::move(rs));
        return plan_outcome{std::nullopt, on_fail};
      }
      rs.commit(ts, pruned, alg == algorithm::strong, 1);
    } else {
      bdd::node_ref before = rs.visited;
      rs.commit(ts, sa, alg == algorithm::strong, 1);
      if (rs.visited == before) {
        if (opts.allow_partial) return finish(ts, std::move(rs));
        return plan_outcome{std::nullopt, on_fail};
      }
    }
  }
  return finish(ts, std::move(rs));
}

}  // namespace

plan_outcome optimistic_plan(const enc::transition_system& ts,
                             const plan_options& opts) {
  return fixpoint_plan(
      ts, algorithm::optimistic, failure_reason::no_optimistic_plan,
      [&](bdd::node_ref v) { return weak_preimage_sa(ts, v); }, opts);
}

plan_outcome strong_plan(const enc::transition_system& ts,
                         const plan_options& opts) {
  return fixpoint_plan(
      ts, algorithm::strong, failure_reason::no_strong_plan,
      [&](bdd::node_ref v) { return strong_preimage_sa(ts, v); }, opts);
}

plan_outcome strong_cyclic_plan(const enc::transition_system& ts,
                                const plan_options& opts) {
  bdd::manager& m = ts.mgr();
  run_state rs = start_run(ts, algorithm::strong_cyclic, opts);

  // Greatest subset of `candidates` whose rules keep every transition inside
  // the visited states plus the surviving candidates' own states.
  auto closure = [&](bdd::node_ref candidates) {
    bdd::node_ref c = candidates;
    for (;;) {
      bdd::node_ref good = m.lor(rs.visited, states_of(ts, c));
      bdd::node_ref escaping = weak_preimage_sa(ts, m.negate(good));
      bdd::node_ref kept = m.diff(c, escaping);
      if (kept == c) return c;
      c = kept;
    }
  };

  while (!covered(ts, rs)) {
    if (rs.plan.iterations >= rs.cap)
      throw error("planning: iteration cap exceeded");
    bdd::node_ref strong_sa = m.diff(strong_preimage_sa(ts, rs.visited), rs.visited);
    if (strong_sa != m.zero()) {
      rs.commit(ts, strong_sa, true, 1);
      continue;
    }
    // Weak phase: grow a candidate set layer by layer; commit the first
    // nonempty closed subset, fail when the candidates stop growing.
    bdd::node_ref candidates = m.zero();
    unsigned layers = 0;
    for (;;) {
      if (rs.plan.iterations + layers >= rs.cap)
        throw error("planning: iteration cap exceeded");
      bdd::node_ref good = m.lor(rs.visited, states_of(ts, candidates));
      bdd::node_ref wsa = m.diff(weak_preimage_sa(ts, good), good);
      bdd::node_ref grown = m.lor(candidates, wsa);
      if (grown == candidates) {
        if (opts.allow_partial) return finish(ts, std::move(rs));
        return plan_outcome{std::nullopt, failure_reason::no_strong_cyclic_plan};
      }
      candidates = grown;
      ++layers;
      bdd::node_ref closed = closure(candidates);
      if (closed != m.zero()) {
        rs.commit(ts, closed, false, layers);
        break;
      }
    }
  }
  return finish(ts, std::move(rs));
}

plan_outcome plan_with(algorithm a, const enc::transition_system& ts,
                       const plan_options& opts) {
  switch (a) {
    case algorithm::strong: return strong_plan(ts, opts);
    case algorithm::strong_cyclic: return strong_cyclic_plan(ts, opts);
    case algorithm::optimistic: return optimistic_plan(ts, opts);
    case algorithm::deterministic: {
      if (!ts.deterministic())
        throw error("deterministic planning requires a deterministic domain");
      plan_outcome out = optimistic_plan(ts, opts);
      if (out.ok()) out.plan->alg = algorithm::deterministic;
      if (!out.ok()) out.reason = failure_reason::no_optimistic_plan;
      return out;
    }
  }
  throw error("unknown algorithm");
}

bdd::node_ref image(const enc::transition_system& ts, bdd::node_ref states,
                    bdd::node_ref action_cube) {
  bdd::manager& m = ts.mgr();
  bdd::node_ref r = m.land(ts.monolithic(), m.land(states, action_cube));
  r = m.exists(r, ts.current_cube());
  r = m.exists(r, ts.sys_action_cube());
  return m.rename(r, ts.unprime());
}

bdd::node_ref state_cube(const enc::transition_system& ts, const state_values& s) {
  return enc::state_cube(ts.mgr(), ts.enc(), s);
}

state_values values_from_assignment(const enc::encoding& enc,
                                    const bdd::sat_assignment& a, bool next) {
  auto lookup = [&](unsigned var) {
    auto it = std::lower_bound(a.begin(), a.end(), var,
                               [](const bdd::assignment_entry& e, unsigned v) {
                                 return e.var < v;
                               });
    if (it == a.end() || it->var != var)
      throw error("values_from_assignment: missing variable");
    return it->value;
  };
  state_values out;
  for (const auto& vl : enc.state_vars) {
    std::uint64_t value = 0;
    const auto& bits = next ? vl.nxt : vl.cur;
    for (std::size_t k = 0; k < bits.size(); ++k)
      if (lookup(bits[k])) value |= std::uint64_t(1) << k;
    out.push_back(value);
  }
  return out;
}

std::string to_text(const joint_action& a) {
  std::ostringstream os;
  for (std::size_t i = 0; i < a.named.size(); ++i)
    os << (i ? " " : "") << a.named[i].first << '=' << a.named[i].second;
  return os.str();
}

std::vector<joint_action> extract_actions(const enc::transition_system& ts,
                                          bdd::node_ref rules,
                                          const state_values& state) {
  bdd::manager& m = ts.mgr();
  const enc::encoding& e = ts.enc();
  bdd::node_ref at_state = m.land(rules, state_cube(ts, state));
  bdd::node_ref ids_bdd = m.exists(at_state, ts.current_cube());
  std::vector<joint_action> out;
  m.enumerate_sat(ids_bdd, e.sys_action_vars, [&](const bdd::sat_assignment& a) {
    joint_action ja;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < e.sys_agents.size(); ++i) {
      unsigned id = 0;
      for (std::size_t k = 0; k < e.sys_agents[i].id_bits.size(); ++k, ++pos)
        if (a[pos].value) id |= 1u << k;
      ja.ids.push_back(id);
      const nadl::agent_desc& agent = ts.domain().system_agents[i];
      ja.named.emplace_back(agent.name, agent.actions.at(id).name);
    }
    out.push_back(std::move(ja));
    return true;
  });
  return out;
}

bdd::node_ref joint_action_cube(const enc::transition_system& ts,
                                const std::vector<unsigned>& ids) {
  bdd::manager& m = ts.mgr();
  const enc::encoding& e = ts.enc();
  if (ids.size() != e.sys_agents.size())
    throw error("joint_action_cube: expected one action per system agent");
  bdd::node_ref out = m.one();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out = m.land(out, enc::action_eq(m, e, e.env_agents.size() + i, ids[i]));
  }
  return out;
}

seq_result sequential_plan(const enc::transition_system& ts, bdd::node_ref rules,
                           const state_values& start, std::uint64_t max_steps) {
  bdd::manager& m = ts.mgr();
  if (!ts.deterministic())
    return seq_result{{}, seq_failure{"domain is not deterministic"}};
  seq_result out;
  state_values s = start;
  for (;;) {
    bdd::node_ref here = state_cube(ts, s);
    if (m.land(here, ts.goal()) != m.zero()) return out;  // goal reached
    if (out.steps.size() >= max_steps) {
      out.failure = seq_failure{"step budget exceeded"};
      return out;
    }
    std::vector<joint_action> advised = extract_actions(ts, rules, s);
    if (advised.empty()) {
      out.failure = seq_failure{"no advised action at state reached after " +
                                std::to_string(out.steps.size()) + " steps"};
      return out;
    }
    const joint_action& a = advised.front();
    bdd::node_ref succ = image(ts, here, joint_action_cube(ts, a.ids));
    if (succ == m.zero()) {
      out.failure = seq_failure{"advised action has no successor"};
      return out;
    }
    if (m.count_sat(succ, ts.enc().current_vars) != 1) {
      out.failure = seq_failure{"domain is not deterministic"};
      return out;
    }
    s = values_from_assignment(ts.enc(),
                               m.pick_sat(succ, ts.enc().current_vars, 0), false);
    out.steps.push_back(a);
  }
}

}  // namespace uplan::plan
