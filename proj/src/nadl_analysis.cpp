#include <functional>
#include <algorithm>
#include <set>

#include "uplan/nadl.hpp"

// Semantic validation, if-then-else elimination, and structural equality.

namespace uplan::nadl {

namespace {

void walk_arith(const arith& a, const std::function<void(const arith&)>& fn) {
  fn(a);
  if (const auto* b = std::get_if<arith::binary>(&a.node)) {
    walk_arith(*b->lhs, fn);
    walk_arith(*b->rhs, fn);
  }
}

void walk(const formula& f, const std::function<void(const formula&)>& fn) {
  fn(f);
  if (const auto* r = std::get_if<formula::relation>(&f.node)) {
    (void)r;
  } else if (const auto* n = std::get_if<formula::negation>(&f.node)) {
    walk(*n->arg, fn);
  } else if (const auto* b = std::get_if<formula::binary>(&f.node)) {
    walk(*b->lhs, fn);
    walk(*b->rhs, fn);
  } else if (const auto* i = std::get_if<formula::if_then_else>(&f.node)) {
    walk(*i->cond, fn);
    walk(*i->then_f, fn);
    walk(*i->else_f, fn);
  }
}

// Visits every arithmetic expression inside a formula.
void walk_ariths(const formula& f, const std::function<void(const arith&)>& fn) {
  walk(f, [&](const formula& g) {
    if (const auto* r = std::get_if<formula::relation>(&g.node)) {
      walk_arith(*r->lhs, fn);
      walk_arith(*r->rhs, fn);
    }
  });
}

// Collects (index, loc) of primed variable occurrences.
void primed_occurrences(const formula& f,
                        std::vector<std::pair<int, source_loc>>& out) {
  walk(f, [&](const formula& g) {
    if (const auto* p = std::get_if<formula::prop_ref>(&g.node)) {
      if (p->next) out.emplace_back(p->index, g.loc);
    }
  });
  walk_ariths(f, [&](const arith& a) {
    if (const auto* v = std::get_if<arith::var_ref>(&a.node)) {
      if (v->next) out.emplace_back(v->index, a.loc);
    }
  });
}

const char* arith_op_text(arith_op op) {
  switch (op) {
    case arith_op::add: return "+";
    case arith_op::sub: return "-";
    case arith_op::mul: return "*";
    case arith_op::div: return "/";
    case arith_op::mod: return "mod";
  }
  return "?";
}

}  // namespace

bool is_state_formula(const formula& f) {
  std::vector<std::pair<int, source_loc>> primed;
  primed_occurrences(f, primed);
  return primed.empty();
}

std::vector<violation> validate(const domain_desc& dd) {
  std::vector<violation> out;
  auto report = [&](source_loc loc, std::string code, std::string msg) {
    out.push_back(violation{loc, std::move(code), std::move(msg)});
  };

  for (const auto& v : dd.vars) {
    if (v.numeric && v.range < 2)
      report(v.loc, "range-too-small",
             "numerical variable '" + v.name + "' must have at least two values");
  }

  // Unsupported arithmetic: the grammar accepts *, / and mod, the toolkit
  // only implements + and -.
  auto check_arith_ops = [&](const formula& f) {
    walk_ariths(f, [&](const arith& a) {
      if (const auto* b = std::get_if<arith::binary>(&a.node)) {
        if (b->op != arith_op::add && b->op != arith_op::sub)
          report(a.loc, "unsupported-operator",
                 std::string("unsupported operator '") + arith_op_text(b->op) + "'");
      }
    });
  };

  std::set<int> sys_constrained, env_constrained;
  auto check_agents = [&](const std::vector<agent_desc>& agents, bool system) {
    for (const auto& agent : agents) {
      if (agent.actions.empty())
        report(agent.loc, "agent-no-actions",
               "agent '" + agent.name + "' has no actions");
      for (const auto& act : agent.actions) {
        for (int v : act.constrained_idx)
          (system ? sys_constrained : env_constrained).insert(v);
        if (!is_state_formula(*act.pre))
          report(act.loc, "pre-not-state-formula",
                 "precondition of '" + act.name + "' refers to next-state variables");
        std::vector<std::pair<int, source_loc>> primed;
        primed_occurrences(*act.eff, primed);
        for (const auto& [idx, loc] : primed) {
          if (!std::binary_search(act.constrained_idx.begin(),
                                  act.constrained_idx.end(), idx))
            report(loc, "primed-outside-con",
                   "effect of '" + act.name + "' constrains '" +
                       dd.vars[idx].name + "' outside its constrained set");
        }
        check_arith_ops(*act.pre);
        check_arith_ops(*act.eff);
      }
    }
  };
  check_agents(dd.system_agents, true);
  check_agents(dd.environment_agents, false);

  for (int v : sys_constrained) {
    if (env_constrained.count(v))
      report(dd.vars[v].loc, "sys-env-overlap",
             "variable '" + dd.vars[v].name +
                 "' is constrained by both system and environment agents");
  }

  if (dd.init) {
    if (!is_state_formula(*dd.init))
      report(dd.init->loc, "init-not-state-formula",
             "initial condition refers to next-state variables");
    check_arith_ops(*dd.init);
  }
  if (dd.goal) {
    if (!is_state_formula(*dd.goal))
      report(dd.goal->loc, "goal-not-state-formula",
             "goal condition refers to next-state variables");
    check_arith_ops(*dd.goal);
  }
  return out;
}

std::string format_violations(const std::vector<violation>& vs) {
  std::string out;
  for (const auto& v : vs) {
    out += "ERROR " + std::to_string(v.loc.line) + ":" + std::to_string(v.loc.col) +
           " " + v.code + " " + v.message + "\n";
  }
  return out;
}

formula_ptr desugar_ite(const formula& f) {
  auto out = std::make_unique<formula>();
  out->loc = f.loc;
  if (const auto* c = std::get_if<formula::constant>(&f.node)) {
    out->node = *c;
  } else if (const auto* p = std::get_if<formula::prop_ref>(&f.node)) {
    out->node = *p;
  } else if (const auto* r = std::get_if<formula::relation>(&f.node)) {
    out->node = formula::relation{r->op, r->lhs->clone(), r->rhs->clone()};
  } else if (const auto* n = std::get_if<formula::negation>(&f.node)) {
    out->node = formula::negation{desugar_ite(*n->arg)};
  } else if (const auto* b = std::get_if<formula::binary>(&f.node)) {
    out->node = formula::binary{b->op, desugar_ite(*b->lhs), desugar_ite(*b->rhs)};
  } else {
    // (c -> t, e)  ==>  (c /\ t) \/ (~c /\ e)
    const auto& i = std::get<formula::if_then_else>(f.node);
    formula_ptr c = desugar_ite(*i.cond);
    formula_ptr t = desugar_ite(*i.then_f);
    formula_ptr e = desugar_ite(*i.else_f);

    auto not_c = std::make_unique<formula>();
    not_c->loc = f.loc;
    not_c->node = formula::negation{c->clone()};

    auto lhs = std::make_unique<formula>();
    lhs->loc = f.loc;
    lhs->node = formula::binary{connective::conj, std::move(c), std::move(t)};

    auto rhs = std::make_unique<formula>();
    rhs->loc = f.loc;
    rhs->node = formula::binary{connective::conj, std::move(not_c), std::move(e)};

    out->node = formula::binary{connective::disj, std::move(lhs), std::move(rhs)};
  }
  return out;
}

void desugar_ite(domain_desc& dd) {
  for (auto* agents : {&dd.system_agents, &dd.environment_agents})
    for (auto& agent : *agents)
      for (auto& act : agent.actions) {
        act.pre = desugar_ite(*act.pre);
        act.eff = desugar_ite(*act.eff);
      }
  if (dd.init) dd.init = desugar_ite(*dd.init);
  if (dd.goal) dd.goal = desugar_ite(*dd.goal);
}

bool equal(const arith& a, const arith& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* n = std::get_if<arith::number>(&a.node))
    return n->value == std::get<arith::number>(b.node).value;
  if (const auto* v = std::get_if<arith::var_ref>(&a.node)) {
    const auto& w = std::get<arith::var_ref>(b.node);
    return v->index == w.index && v->next == w.next;
  }
  const auto& x = std::get<arith::binary>(a.node);
  const auto& y = std::get<arith::binary>(b.node);
  return x.op == y.op && equal(*x.lhs, *y.lhs) && equal(*x.rhs, *y.rhs);
}

bool equal(const formula& a, const formula& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* c = std::get_if<formula::constant>(&a.node))
    return c->value == std::get<formula::constant>(b.node).value;
  if (const auto* p = std::get_if<formula::prop_ref>(&a.node)) {
    const auto& q = std::get<formula::prop_ref>(b.node);
    return p->index == q.index && p->next == q.next;
  }
  if (const auto* r = std::get_if<formula::relation>(&a.node)) {
    const auto& s = std::get<formula::relation>(b.node);
    return r->op == s.op && equal(*r->lhs, *s.lhs) && equal(*r->rhs, *s.rhs);
  }
  if (const auto* n = std::get_if<formula::negation>(&a.node))
    return equal(*n->arg, *std::get<formula::negation>(b.node).arg);
  if (const auto* x = std::get_if<formula::binary>(&a.node)) {
    const auto& y = std::get<formula::binary>(b.node);
    return x->op == y.op && equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
  }
  const auto& x = std::get<formula::if_then_else>(a.node);
  const auto& y = std::get<formula::if_then_else>(b.node);
  return equal(*x.cond, *y.cond) && equal(*x.then_f, *y.then_f) &&
         equal(*x.else_f, *y.else_f);
}

bool equal(const domain_desc& a, const domain_desc& b) {
  if (a.vars.size() != b.vars.size()) return false;
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    if (a.vars[i].name != b.vars[i].name || a.vars[i].numeric != b.vars[i].numeric ||
        a.vars[i].range != b.vars[i].range)
      return false;
  }
  auto agents_equal = [](const std::vector<agent_desc>& x,
                         const std::vector<agent_desc>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].name != y[i].name || x[i].actions.size() != y[i].actions.size())
        return false;
      for (std::size_t j = 0; j < x[i].actions.size(); ++j) {
        const auto& p = x[i].actions[j];
        const auto& q = y[i].actions[j];
        if (p.name != q.name || p.constrained_idx != q.constrained_idx) return false;
        if (!equal(*p.pre, *q.pre) || !equal(*p.eff, *q.eff)) return false;
      }
    }
    return true;
  };
  return agents_equal(a.system_agents, b.system_agents) &&
         agents_equal(a.environment_agents, b.environment_agents) &&
         equal(*a.init, *b.init) && equal(*a.goal, *b.goal);
}

}  // namespace uplan::nadl
