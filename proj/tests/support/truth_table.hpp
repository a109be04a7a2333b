#pragma once

// Brute-force oracles for the diagram tests: random formula trees evaluated
// directly over explicit assignments, and truth tables small enough to
// enumerate. Kept independent of the diagram engine on purpose.

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "uplan/bdd.hpp"

namespace test_support {

// Truth table over n variables; row r assigns variable v the bit (r >> v) & 1.
using truth_table = std::vector<bool>;

inline std::vector<bool> row_assignment(unsigned n_vars, std::uint32_t row) {
  std::vector<bool> a(n_vars);
  for (unsigned v = 0; v < n_vars; ++v) a[v] = (row >> v) & 1u;
  return a;
}

inline truth_table table_of(uplan::bdd::manager& m, uplan::bdd::node_ref f) {
  unsigned n = m.var_count();
  truth_table t(std::size_t(1) << n);
  for (std::uint32_t r = 0; r < t.size(); ++r)
    t[r] = m.evaluate(f, row_assignment(n, r));
  return t;
}

// Random boolean formula tree with its own evaluator.
struct formula {
  enum kind { CONST, VAR, NOT, AND, OR, XOR, IMPLIES, IFF, ITE };
  kind k = CONST;
  bool value = false;
  unsigned var = 0;
  std::unique_ptr<formula> a, b, c;

  bool eval(std::uint32_t row) const {
    switch (k) {
      case CONST: return value;
      case VAR: return (row >> var) & 1u;
      case NOT: return !a->eval(row);
      case AND: return a->eval(row) && b->eval(row);
      case OR: return a->eval(row) || b->eval(row);
      case XOR: return a->eval(row) != b->eval(row);
      case IMPLIES: return !a->eval(row) || b->eval(row);
      case IFF: return a->eval(row) == b->eval(row);
      case ITE: return a->eval(row) ? b->eval(row) : c->eval(row);
    }
    return false;
  }

  uplan::bdd::node_ref build(uplan::bdd::manager& m) const {
    using uplan::bdd::bool_op;
    switch (k) {
      case CONST: return m.constant(value);
      case VAR: return m.var(var);
      case NOT: return m.negate(a->build(m));
      case AND: return m.apply(bool_op::AND, a->build(m), b->build(m));
      case OR: return m.apply(bool_op::OR, a->build(m), b->build(m));
      case XOR: return m.apply(bool_op::XOR, a->build(m), b->build(m));
      case IMPLIES: return m.apply(bool_op::IMPLIES, a->build(m), b->build(m));
      case IFF: return m.apply(bool_op::IFF, a->build(m), b->build(m));
      case ITE: return m.ite(a->build(m), b->build(m), c->build(m));
    }
    return m.zero();
  }
};

inline std::unique_ptr<formula> random_formula(std::mt19937& rng, unsigned n_vars,
                                               unsigned depth) {
  auto f = std::make_unique<formula>();
  std::uniform_int_distribution<int> leaf(0, 9);
  if (depth == 0 || leaf(rng) == 0) {
    if (leaf(rng) < 2) {
      f->k = formula::CONST;
      f->value = rng() & 1u;
    } else {
      f->k = formula::VAR;
      f->var = rng() % n_vars;
    }
    return f;
  }
  std::uniform_int_distribution<int> op(2, 8);
  f->k = static_cast<formula::kind>(op(rng));
  f->a = random_formula(rng, n_vars, depth - 1);
  if (f->k != formula::NOT) f->b = random_formula(rng, n_vars, depth - 1);
  if (f->k == formula::ITE) f->c = random_formula(rng, n_vars, depth - 1);
  return f;
}

inline truth_table table_of(const formula& f, unsigned n_vars) {
  truth_table t(std::size_t(1) << n_vars);
  for (std::uint32_t r = 0; r < t.size(); ++r) t[r] = f.eval(r);
  return t;
}

}  // namespace test_support
