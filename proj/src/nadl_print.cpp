#include <sstream>

#include "uplan/nadl.hpp"

// Pretty printer. Emits minimal parentheses; parsing the output reproduces
// the tree (modulo source locations).

namespace uplan::nadl {

namespace {

// Binding strength, loosest first: ite < iff < => < \/ < /\ < ~ < atom.
enum prec : int {
  prec_ite = 0,
  prec_iff = 1,
  prec_implies = 2,
  prec_or = 3,
  prec_and = 4,
  prec_not = 5,
  prec_atom = 6,
};

void print_arith(std::ostream& os, const arith& a, int parent) {
  if (const auto* n = std::get_if<arith::number>(&a.node)) {
    os << n->value;
    return;
  }
  if (const auto* v = std::get_if<arith::var_ref>(&a.node)) {
    os << v->name << (v->next ? "'" : "");
    return;
  }
  const auto& b = std::get<arith::binary>(a.node);
  bool mul_level = b.op == arith_op::mul || b.op == arith_op::div ||
                   b.op == arith_op::mod;
  int level = mul_level ? 2 : 1;
  bool parens = level < parent;
  if (parens) os << '(';
  print_arith(os, *b.lhs, level);
  switch (b.op) {
    case arith_op::add: os << " + "; break;
    case arith_op::sub: os << " - "; break;
    case arith_op::mul: os << " * "; break;
    case arith_op::div: os << " / "; break;
    case arith_op::mod: os << " mod "; break;
  }
  print_arith(os, *b.rhs, level + 1);
  if (parens) os << ')';
}

void print_formula(std::ostream& os, const formula& f, int parent) {
  if (const auto* c = std::get_if<formula::constant>(&f.node)) {
    os << (c->value ? "true" : "false");
    return;
  }
  if (const auto* p = std::get_if<formula::prop_ref>(&f.node)) {
    os << p->name << (p->next ? "'" : "");
    return;
  }
  if (const auto* r = std::get_if<formula::relation>(&f.node)) {
    print_arith(os, *r->lhs, 0);
    switch (r->op) {
      case rel_op::lt: os << " < "; break;
      case rel_op::le: os << " <= "; break;
      case rel_op::gt: os << " > "; break;
      case rel_op::ge: os << " >= "; break;
      case rel_op::eq: os << " = "; break;
      case rel_op::ne: os << " != "; break;
    }
    print_arith(os, *r->rhs, 0);
    return;
  }
  if (const auto* n = std::get_if<formula::negation>(&f.node)) {
    os << '~';
    // relations need parentheses under negation to stay atoms
    bool parens = std::holds_alternative<formula::relation>(n->arg->node);
    if (parens) os << '(';
    print_formula(os, *n->arg, prec_not);
    if (parens) os << ')';
    return;
  }
  if (const auto* b = std::get_if<formula::binary>(&f.node)) {
    int level;
    const char* op;
    switch (b->op) {
      case connective::conj: level = prec_and; op = " /\\ "; break;
      case connective::disj: level = prec_or; op = " \\/ "; break;
      case connective::implies: level = prec_implies; op = " => "; break;
      default: level = prec_iff; op = " <=> "; break;
    }
    bool parens = level < parent;
    if (parens) os << '(';
    // => is right associative, the others left associative
    int lhs_level = b->op == connective::implies ? level + 1 : level;
    int rhs_level = b->op == connective::implies ? level : level + 1;
    print_formula(os, *b->lhs, lhs_level);
    os << op;
    print_formula(os, *b->rhs, rhs_level);
    if (parens) os << ')';
    return;
  }
  const auto& i = std::get<formula::if_then_else>(f.node);
  bool parens = prec_ite < parent;
  if (parens) os << '(';
  print_formula(os, *i.cond, prec_iff);
  os << " -> ";
  print_formula(os, *i.then_f, prec_iff);
  os << ", ";
  print_formula(os, *i.else_f, prec_ite);
  if (parens) os << ')';
}

}  // namespace

std::string to_text(const arith& a) {
  std::ostringstream os;
  print_arith(os, a, 0);
  return os.str();
}

std::string to_text(const formula& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string to_text(const domain_desc& dd) {
  std::ostringstream os;
  os << "variables\n";
  for (const auto& v : dd.vars) {
    if (v.numeric)
      os << "  nat(" << v.range << ") " << v.name << "\n";
    else
      os << "  bool " << v.name << "\n";
  }
  auto print_agents = [&](const std::vector<agent_desc>& agents) {
    for (const auto& agent : agents) {
      os << "  agt: " << agent.name << "\n";
      for (const auto& act : agent.actions) {
        os << "    " << act.name << "\n";
        os << "      con: ";
        for (std::size_t i = 0; i < act.constrained.size(); ++i)
          os << (i ? ", " : "") << act.constrained[i];
        os << "\n";
        os << "      pre: " << to_text(*act.pre) << "\n";
        os << "      eff: " << to_text(*act.eff) << "\n";
      }
    }
  };
  os << "system\n";
  print_agents(dd.system_agents);
  if (!dd.environment_agents.empty()) {
    os << "environment\n";
    print_agents(dd.environment_agents);
  }
  os << "initially\n  " << to_text(*dd.init) << "\n";
  os << "goal\n  " << to_text(*dd.goal) << "\n";
  return os.str();
}

}  // namespace uplan::nadl
