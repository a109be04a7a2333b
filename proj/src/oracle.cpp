#include "uplan/oracle.hpp"

#include <algorithm>
#include <sstream>

namespace uplan::oracle {

long long eval_arith(const nadl::arith& a, const std::vector<std::uint64_t>& cur,
                     const std::vector<std::uint64_t>& nxt) {
  if (const auto* n = std::get_if<nadl::arith::number>(&a.node))
    return static_cast<long long>(n->value);
  if (const auto* v = std::get_if<nadl::arith::var_ref>(&a.node))
    return static_cast<long long>(v->next ? nxt[v->index] : cur[v->index]);
  const auto& b = std::get<nadl::arith::binary>(a.node);
  long long lhs = eval_arith(*b.lhs, cur, nxt);
  long long rhs = eval_arith(*b.rhs, cur, nxt);
  switch (b.op) {
    case nadl::arith_op::add: return lhs + rhs;
    case nadl::arith_op::sub: return lhs - rhs;
    default: throw error("oracle: unsupported arithmetic operator");
  }
}

bool eval_formula(const nadl::formula& f, const std::vector<std::uint64_t>& cur,
                  const std::vector<std::uint64_t>& nxt) {
  if (const auto* c = std::get_if<nadl::formula::constant>(&f.node))
    return c->value;
  if (const auto* p = std::get_if<nadl::formula::prop_ref>(&f.node))
    return (p->next ? nxt[p->index] : cur[p->index]) != 0;
  if (const auto* r = std::get_if<nadl::formula::relation>(&f.node)) {
    long long lhs = eval_arith(*r->lhs, cur, nxt);
    long long rhs = eval_arith(*r->rhs, cur, nxt);
    switch (r->op) {
      case nadl::rel_op::lt: return lhs < rhs;
      case nadl::rel_op::le: return lhs <= rhs;
      case nadl::rel_op::gt: return lhs > rhs;
      case nadl::rel_op::ge: return lhs >= rhs;
      case nadl::rel_op::eq: return lhs == rhs;
      case nadl::rel_op::ne: return lhs != rhs;
    }
  }
  if (const auto* n = std::get_if<nadl::formula::negation>(&f.node))
    return !eval_formula(*n->arg, cur, nxt);
  if (const auto* b = std::get_if<nadl::formula::binary>(&f.node)) {
    bool lhs = eval_formula(*b->lhs, cur, nxt);
    switch (b->op) {
      case nadl::connective::conj: return lhs && eval_formula(*b->rhs, cur, nxt);
      case nadl::connective::disj: return lhs || eval_formula(*b->rhs, cur, nxt);
      case nadl::connective::implies:
        return !lhs || eval_formula(*b->rhs, cur, nxt);
      case nadl::connective::iff: return lhs == eval_formula(*b->rhs, cur, nxt);
    }
  }
  const auto& i = std::get<nadl::formula::if_then_else>(f.node);
  return eval_formula(*i.cond, cur, nxt) ? eval_formula(*i.then_f, cur, nxt)
                                         : eval_formula(*i.else_f, cur, nxt);
}

std::vector<std::uint64_t> explicit_nfa::state_values(std::uint32_t id) const {
  std::vector<std::uint64_t> out(radices.size());
  for (std::size_t v = 0; v < radices.size(); ++v) {
    out[v] = id % radices[v];
    id = static_cast<std::uint32_t>(id / radices[v]);
  }
  return out;
}

std::uint32_t explicit_nfa::state_id(
    const std::vector<std::uint64_t>& values) const {
  std::uint64_t id = 0, scale = 1;
  for (std::size_t v = 0; v < radices.size(); ++v) {
    id += values[v] * scale;
    scale *= radices[v];
  }
  return static_cast<std::uint32_t>(id);
}

bool explicit_nfa::has_transition(std::uint32_t s, std::size_t i,
                                  std::uint32_t t) const {
  const auto& succ = successors(s, i);
  return std::binary_search(succ.begin(), succ.end(), t);
}

std::string explicit_nfa::dump_transitions() const {
  std::ostringstream os;
  for (std::uint32_t s = 0; s < state_count; ++s)
    for (std::size_t i = 0; i < inputs.size(); ++i)
      for (std::uint32_t t : successors(s, i))
        os << s << ' ' << i << ' ' << t << '\n';
  return os.str();
}

namespace {

// Per-agent choice tuples: the cartesian product of the agents' action lists.
std::vector<std::vector<unsigned>> choice_product(
    const std::vector<nadl::agent_desc>& agents, std::size_t cap) {
  std::vector<std::vector<unsigned>> out{{}};
  for (const auto& agent : agents) {
    std::vector<std::vector<unsigned>> grown;
    for (const auto& prefix : out) {
      for (unsigned j = 0; j < agent.actions.size(); ++j) {
        grown.push_back(prefix);
        grown.back().push_back(j);
      }
    }
    out = std::move(grown);
    if (out.size() > cap) throw error("oracle: joint action cap exceeded");
    if (out.empty()) return out;  // an agent without actions has no joints
  }
  return out;
}

struct joint {
  std::vector<const nadl::action_desc*> actions;
  std::vector<int> constrained;  // sorted union, pairwise disjoint
};

// Combines a system input with an environment choice; nullopt when two
// actions constrain overlapping variable sets (the interference condition).
std::optional<joint> make_joint(const nadl::domain_desc& dd,
                                const std::vector<unsigned>& input,
                                const std::vector<unsigned>& env) {
  joint j;
  for (std::size_t a = 0; a < dd.system_agents.size(); ++a)
    j.actions.push_back(&dd.system_agents[a].actions[input[a]]);
  for (std::size_t a = 0; a < dd.environment_agents.size(); ++a)
    j.actions.push_back(&dd.environment_agents[a].actions[env[a]]);
  for (const auto* act : j.actions) {
    for (int v : act->constrained_idx) {
      if (std::binary_search(j.constrained.begin(), j.constrained.end(), v))
        return std::nullopt;
      }
    j.constrained.insert(j.constrained.end(), act->constrained_idx.begin(),
                         act->constrained_idx.end());
    std::sort(j.constrained.begin(), j.constrained.end());
  }
  return j;
}

}  // namespace

explicit_nfa expand(const nadl::domain_desc& dd, caps c) {
  explicit_nfa nfa;
  nfa.dd = &dd;
  std::uint64_t count = 1;
  for (const auto& v : dd.vars) {
    nfa.radices.push_back(v.range);
    count *= v.range;
    if (count > c.max_states) throw error("oracle: state cap exceeded");
  }
  nfa.state_count = static_cast<std::size_t>(count);

  nfa.inputs = choice_product(dd.system_agents, c.max_joint);
  nfa.env_choices = choice_product(dd.environment_agents, c.max_joint);
  if (nfa.inputs.size() * std::max<std::size_t>(1, nfa.env_choices.size()) >
      c.max_joint)
    throw error("oracle: joint action cap exceeded");

  // Valid full joints per input.
  std::vector<std::vector<joint>> joints(nfa.inputs.size());
  for (std::size_t i = 0; i < nfa.inputs.size(); ++i)
    for (const auto& e : nfa.env_choices)
      if (auto j = make_joint(dd, nfa.inputs[i], e)) joints[i].push_back(*j);

  nfa.delta.assign(nfa.state_count * nfa.inputs.size(), {});
  nfa.goal_states.assign(nfa.state_count, 0);
  nfa.init_states.assign(nfa.state_count, 0);

  std::vector<std::uint64_t> nxt;
  // Local next-value combinations of one action's constrained block.
  auto local_choices = [&](const nadl::action_desc& act,
                           const std::vector<std::uint64_t>& cur) {
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> pick(act.constrained_idx.size(), 0);
    nxt = cur;
    for (;;) {
      for (std::size_t k = 0; k < pick.size(); ++k)
        nxt[act.constrained_idx[k]] = pick[k];
      if (eval_formula(*act.eff, cur, nxt)) out.push_back(pick);
      // odometer over the constrained variables' ranges
      std::size_t k = 0;
      for (; k < pick.size(); ++k) {
        if (++pick[k] < nfa.radices[act.constrained_idx[k]]) break;
        pick[k] = 0;
      }
      if (k == pick.size()) break;
      if (pick.empty()) break;
    }
    return out;
  };

  for (std::uint32_t s = 0; s < nfa.state_count; ++s) {
    std::vector<std::uint64_t> cur = nfa.state_values(s);
    nfa.goal_states[s] = eval_formula(*dd.goal, cur, cur);
    nfa.init_states[s] = eval_formula(*dd.init, cur, cur);
    for (std::size_t i = 0; i < nfa.inputs.size(); ++i) {
      auto& succ = nfa.delta[s * nfa.inputs.size() + i];
      for (const joint& j : joints[i]) {
        bool applicable = true;
        for (const auto* act : j.actions)
          if (!eval_formula(*act->pre, cur, cur)) {
            applicable = false;
            break;
          }
        if (!applicable) continue;
        // cross product of the actions' local effect choices
        std::vector<std::vector<std::vector<std::uint64_t>>> locals;
        bool any = true;
        for (const auto* act : j.actions) {
          locals.push_back(local_choices(*act, cur));
          if (locals.back().empty()) {
            any = false;
            break;
          }
        }
        if (!any) continue;
        std::vector<std::size_t> pick(locals.size(), 0);
        for (;;) {
          nxt = cur;
          for (std::size_t a = 0; a < locals.size(); ++a) {
            const auto& c_idx = j.actions[a]->constrained_idx;
            for (std::size_t k = 0; k < c_idx.size(); ++k)
              nxt[c_idx[k]] = locals[a][pick[a]][k];
          }
          succ.push_back(nfa.state_id(nxt));
          std::size_t a = 0;
          for (; a < pick.size(); ++a) {
            if (++pick[a] < locals[a].size()) break;
            pick[a] = 0;
          }
          if (a == pick.size()) break;
          if (pick.empty()) break;
        }
      }
      std::sort(succ.begin(), succ.end());
      succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    }
  }
  return nfa;
}

state_mask states_of(const explicit_nfa& nfa, const sa_mask& sa) {
  state_mask out(nfa.state_count, 0);
  for (std::uint32_t s = 0; s < nfa.state_count; ++s)
    for (std::size_t i = 0; i < nfa.input_count(); ++i)
      if (sa[s * nfa.input_count() + i]) out[s] = 1;
  return out;
}

sa_mask weak_preimage(const explicit_nfa& nfa, const state_mask& v) {
  sa_mask out(nfa.pair_count(), 0);
  for (std::uint32_t s = 0; s < nfa.state_count; ++s)
    for (std::size_t i = 0; i < nfa.input_count(); ++i)
      for (std::uint32_t t : nfa.successors(s, i))
        if (v[t]) {
          out[s * nfa.input_count() + i] = 1;
          break;
        }
  return out;
}

sa_mask strong_preimage(const explicit_nfa& nfa, const state_mask& v) {
  sa_mask out(nfa.pair_count(), 0);
  for (std::uint32_t s = 0; s < nfa.state_count; ++s)
    for (std::size_t i = 0; i < nfa.input_count(); ++i) {
      const auto& succ = nfa.successors(s, i);
      if (succ.empty()) continue;
      bool all = true;
      for (std::uint32_t t : succ)
        if (!v[t]) {
          all = false;
          break;
        }
      if (all) out[s * nfa.input_count() + i] = 1;
    }
  return out;
}

namespace {

bool mask_subset(const std::vector<char>& a, const std::vector<char>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

bool mask_empty(const std::vector<char>& a) {
  return std::find(a.begin(), a.end(), 1) == a.end();
}

void mask_or(std::vector<char>& a, const std::vector<char>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] || b[i];
}

// Removes pairs whose state is already visited.
sa_mask prune(const explicit_nfa& nfa, const sa_mask& sa, const state_mask& v) {
  sa_mask out = sa;
  for (std::uint32_t s = 0; s < nfa.state_count; ++s)
    if (v[s])
      for (std::size_t i = 0; i < nfa.input_count(); ++i)
        out[s * nfa.input_count() + i] = 0;
  return out;
}

struct oracle_run {
  explicit_plan plan;
  state_mask visited;

  void commit(const explicit_nfa& nfa, const sa_mask& add, bool strong,
              unsigned layers) {
    mask_or(plan.rules, add);
    mask_or(visited, states_of(nfa, add));
    plan.iterations += layers;
    plan.visited_layers.push_back(visited);
    plan.phases.push_back(plan::phase_event{strong, layers});
  }
};

oracle_outcome fixpoint(const explicit_nfa& nfa, bool strong,
                        plan::failure_reason on_fail) {
  oracle_run run;
  run.visited = nfa.goal_states;
  run.plan.rules.assign(nfa.pair_count(), 0);
  run.plan.visited_layers.push_back(run.visited);
  while (!mask_subset(nfa.init_states, run.visited)) {
    sa_mask sa = strong ? strong_preimage(nfa, run.visited)
                        : weak_preimage(nfa, run.visited);
    sa_mask pruned = prune(nfa, sa, run.visited);
    if (mask_empty(pruned)) return oracle_outcome{std::nullopt, on_fail};
    run.commit(nfa, pruned, strong, 1);
  }
  return oracle_outcome{std::move(run.plan), plan::failure_reason::none};
}

oracle_outcome cyclic(const explicit_nfa& nfa) {
  oracle_run run;
  run.visited = nfa.goal_states;
  run.plan.rules.assign(nfa.pair_count(), 0);
  run.plan.visited_layers.push_back(run.visited);

  auto closure = [&](sa_mask c) {
    for (;;) {
      state_mask good = run.visited;
      mask_or(good, states_of(nfa, c));
      bool changed = false;
      for (std::uint32_t s = 0; s < nfa.state_count; ++s)
        for (std::size_t i = 0; i < nfa.input_count(); ++i) {
          auto& bit = c[s * nfa.input_count() + i];
          if (!bit) continue;
          for (std::uint32_t t : nfa.successors(s, i))
            if (!good[t]) {
              bit = 0;
              changed = true;
              break;
            }
        }
      if (!changed) return c;
    }
  };

  while (!mask_subset(nfa.init_states, run.visited)) {
    sa_mask strong_sa =
        prune(nfa, strong_preimage(nfa, run.visited), run.visited);
    if (!mask_empty(strong_sa)) {
      run.commit(nfa, strong_sa, true, 1);
      continue;
    }
    sa_mask candidates(nfa.pair_count(), 0);
    unsigned layers = 0;
    for (;;) {
      state_mask good = run.visited;
      mask_or(good, states_of(nfa, candidates));
      sa_mask wsa = prune(nfa, weak_preimage(nfa, good), good);
      sa_mask grown = candidates;
      mask_or(grown, wsa);
      if (grown == candidates)
        return oracle_outcome{std::nullopt,
                              plan::failure_reason::no_strong_cyclic_plan};
      candidates = std::move(grown);
      ++layers;
      sa_mask closed = closure(candidates);
      if (!mask_empty(closed)) {
        run.commit(nfa, closed, false, layers);
        break;
      }
    }
  }
  return oracle_outcome{std::move(run.plan), plan::failure_reason::none};
}

}  // namespace

oracle_outcome oracle_plan(const explicit_nfa& nfa, plan::algorithm alg) {
  switch (alg) {
    case plan::algorithm::strong:
      return fixpoint(nfa, true, plan::failure_reason::no_strong_plan);
    case plan::algorithm::strong_cyclic:
      return cyclic(nfa);
    case plan::algorithm::optimistic:
    case plan::algorithm::deterministic:
      return fixpoint(nfa, false, plan::failure_reason::no_optimistic_plan);
  }
  throw error("unknown algorithm");
}

plan_evaluation evaluate_plan(const explicit_nfa& nfa, const sa_mask& rules) {
  plan_evaluation ev;
  std::size_t n = nfa.state_count;
  std::size_t k = nfa.input_count();
  state_mask covered = states_of(nfa, rules);

  // Best case: shortest path to a goal state over advised transitions.
  ev.best.assign(n, plan_evaluation::unbounded);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t s = 0; s < n; ++s)
    if (nfa.goal_states[s]) {
      ev.best[s] = 0;
      frontier.push_back(s);
    }
  // predecessor scan per layer; domains are small so the quadratic walk is fine
  for (std::uint64_t dist = 1; !frontier.empty(); ++dist) {
    std::vector<std::uint32_t> next_frontier;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (ev.best[s] != plan_evaluation::unbounded || nfa.goal_states[s] ||
          !covered[s])
        continue;
      bool hit = false;
      for (std::size_t i = 0; i < k && !hit; ++i) {
        if (!rules[s * k + i]) continue;
        for (std::uint32_t t : nfa.successors(s, i))
          if (ev.best[t] == dist - 1) {
            hit = true;
            break;
          }
      }
      if (hit) {
        ev.best[s] = dist;
        next_frontier.push_back(s);
      }
    }
    frontier = std::move(next_frontier);
  }

  // Worst case: minimax layers; an advised action whose outcomes all lie in
  // the previous layers bounds the adversary.
  ev.worst.assign(n, plan_evaluation::unbounded);
  for (std::uint32_t s = 0; s < n; ++s)
    if (nfa.goal_states[s]) ev.worst[s] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (ev.worst[s] != plan_evaluation::unbounded || nfa.goal_states[s] ||
          !covered[s])
        continue;
      std::uint64_t bound = plan_evaluation::unbounded;
      for (std::size_t i = 0; i < k; ++i) {
        if (!rules[s * k + i]) continue;
        const auto& succ = nfa.successors(s, i);
        if (succ.empty()) continue;
        std::uint64_t worst_succ = 0;
        for (std::uint32_t t : succ) {
          worst_succ = std::max(worst_succ, ev.worst[t]);
          if (worst_succ == plan_evaluation::unbounded) break;
        }
        if (worst_succ != plan_evaluation::unbounded)
          bound = std::min(bound, worst_succ + 1);
      }
      if (bound != plan_evaluation::unbounded) {
        ev.worst[s] = bound;
        changed = true;
      }
    }
  }

  // Dead-end reachability: following the plan can reach a state that is
  // neither goal nor covered.
  ev.deadend_reachable.assign(n, 0);
  for (std::uint32_t s = 0; s < n; ++s)
    if (!nfa.goal_states[s] && !covered[s]) ev.deadend_reachable[s] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (ev.deadend_reachable[s] || nfa.goal_states[s] || !covered[s]) continue;
      for (std::size_t i = 0; i < k && !ev.deadend_reachable[s]; ++i) {
        if (!rules[s * k + i]) continue;
        for (std::uint32_t t : nfa.successors(s, i))
          if (ev.deadend_reachable[t]) {
            ev.deadend_reachable[s] = 1;
            changed = true;
            break;
          }
      }
    }
  }
  return ev;
}

plan_evaluation::profile plan_evaluation::at(std::uint32_t s) const {
  profile p{best[s], worst_kind::finite, worst[s]};
  if (worst[s] == unbounded)
    p.kind = deadend_reachable[s] ? worst_kind::deadend : worst_kind::cycle;
  return p;
}

}  // namespace uplan::oracle
