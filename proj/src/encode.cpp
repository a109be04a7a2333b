#include "uplan/encode.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <map>
#include <sstream>

namespace uplan::enc {

unsigned bits_for(std::uint64_t count) {
  if (count <= 1) return 0;
  return std::bit_width(count - 1);
}

encoding allocate(const nadl::domain_desc& dd) {
  encoding enc;
  unsigned idx = 0;
  auto alloc_agents = [&](const std::vector<nadl::agent_desc>& agents,
                          std::vector<agent_layout>& out, var_role role) {
    for (const auto& agent : agents) {
      agent_layout al;
      al.action_count = static_cast<unsigned>(agent.actions.size());
      unsigned bits = bits_for(al.action_count);
      for (unsigned k = 0; k < bits; ++k) {
        al.id_bits.push_back(idx);
        enc.layout.push_back(layout_entry{role, agent.name, k});
        ++idx;
      }
      out.push_back(std::move(al));
    }
  };
  alloc_agents(dd.environment_agents, enc.env_agents, var_role::env_action);
  alloc_agents(dd.system_agents, enc.sys_agents, var_role::sys_action);

  for (const auto& v : dd.vars) {
    var_layout vl;
    vl.numeric = v.numeric;
    vl.range = v.range;
    unsigned bits = v.numeric ? bits_for(v.range) : 1;
    for (unsigned k = 0; k < bits; ++k) {
      vl.cur.push_back(idx);
      enc.layout.push_back(layout_entry{var_role::current, v.name, k});
      ++idx;
      vl.nxt.push_back(idx);
      enc.layout.push_back(layout_entry{var_role::next, v.name, k});
      ++idx;
    }
    enc.state_vars.push_back(std::move(vl));
  }
  enc.total_vars = idx;

  for (const auto& al : enc.env_agents)
    for (unsigned b : al.id_bits) enc.env_action_vars.push_back(b);
  for (const auto& al : enc.sys_agents)
    for (unsigned b : al.id_bits) enc.sys_action_vars.push_back(b);
  for (const auto& vl : enc.state_vars) {
    for (unsigned b : vl.cur) enc.current_vars.push_back(b);
    for (unsigned b : vl.nxt) enc.next_vars.push_back(b);
  }
  std::sort(enc.current_vars.begin(), enc.current_vars.end());
  std::sort(enc.next_vars.begin(), enc.next_vars.end());
  return enc;
}

std::string layout_text(const encoding& enc) {
  std::ostringstream os;
  for (std::size_t i = 0; i < enc.layout.size(); ++i) {
    const layout_entry& e = enc.layout[i];
    const char* role = e.role == var_role::env_action  ? "envact"
                       : e.role == var_role::sys_action ? "sysact"
                       : e.role == var_role::current    ? "cur"
                                                        : "next";
    os << "var " << i << ' ' << role << ' ' << e.name << ' ' << e.bit << '\n';
  }
  return os.str();
}

bitvec bv_constant(bdd::manager& m, std::uint64_t value) {
  bitvec out;
  unsigned width = std::max(1u, static_cast<unsigned>(std::bit_width(value)));
  for (unsigned k = 0; k < width; ++k)
    out.bits.push_back(m.constant((value >> k) & 1u));
  return out;
}

namespace {

bdd::node_ref bit_or_zero(bdd::manager& m, const bitvec& v, std::size_t k) {
  return k < v.bits.size() ? v.bits[k] : m.zero();
}

}  // namespace

bitvec bv_add(bdd::manager& m, const bitvec& a, const bitvec& b) {
  std::size_t w = std::max(a.bits.size(), b.bits.size());
  bitvec out;
  bdd::node_ref carry = m.zero();
  for (std::size_t k = 0; k < w; ++k) {
    bdd::node_ref x = bit_or_zero(m, a, k);
    bdd::node_ref y = bit_or_zero(m, b, k);
    out.bits.push_back(m.lxor(m.lxor(x, y), carry));
    carry = m.ite(x, m.lor(y, carry), m.land(y, carry));
  }
  out.bits.push_back(carry);
  return out;
}

bitvec bv_sub(bdd::manager& m, const bitvec& a, const bitvec& b) {
  // a + ~b + 1 over one extra bit; a borrow parks the result in the upper
  // half of the code space where no in-range operand value lives.
  std::size_t w = std::max(a.bits.size(), b.bits.size()) + 1;
  bitvec out;
  bdd::node_ref carry = m.one();
  for (std::size_t k = 0; k < w; ++k) {
    bdd::node_ref x = bit_or_zero(m, a, k);
    bdd::node_ref y = m.negate(bit_or_zero(m, b, k));
    out.bits.push_back(m.lxor(m.lxor(x, y), carry));
    carry = m.ite(x, m.lor(y, carry), m.land(y, carry));
  }
  return out;
}

bdd::node_ref bv_compare(bdd::manager& m, nadl::rel_op op, const bitvec& a,
                         const bitvec& b) {
  using nadl::rel_op;
  if (op == rel_op::gt) return bv_compare(m, rel_op::lt, b, a);
  if (op == rel_op::ge) return bv_compare(m, rel_op::le, b, a);
  std::size_t w = std::max(a.bits.size(), b.bits.size());
  if (op == rel_op::eq || op == rel_op::ne) {
    bdd::node_ref eq = m.one();
    for (std::size_t k = 0; k < w; ++k)
      eq = m.land(eq, m.iff(bit_or_zero(m, a, k), bit_or_zero(m, b, k)));
    return op == rel_op::eq ? eq : m.negate(eq);
  }
  // lt/le, scanning from least to most significant bit
  bdd::node_ref acc = m.constant(op == rel_op::le);
  for (std::size_t k = 0; k < w; ++k) {
    bdd::node_ref x = bit_or_zero(m, a, k);
    bdd::node_ref y = bit_or_zero(m, b, k);
    acc = m.ite(m.iff(x, y), acc, m.land(m.negate(x), y));
  }
  return acc;
}

bitvec encode_arith(bdd::manager& m, const encoding& enc, const nadl::arith& a) {
  if (const auto* n = std::get_if<nadl::arith::number>(&a.node))
    return bv_constant(m, n->value);
  if (const auto* v = std::get_if<nadl::arith::var_ref>(&a.node)) {
    const var_layout& vl = enc.state_vars.at(v->index);
    bitvec out;
    for (unsigned idx : (v->next ? vl.nxt : vl.cur)) out.bits.push_back(m.var(idx));
    return out;
  }
  const auto& b = std::get<nadl::arith::binary>(a.node);
  bitvec lhs = encode_arith(m, enc, *b.lhs);
  bitvec rhs = encode_arith(m, enc, *b.rhs);
  switch (b.op) {
    case nadl::arith_op::add: return bv_add(m, lhs, rhs);
    case nadl::arith_op::sub: return bv_sub(m, lhs, rhs);
    default: throw error("encode: unsupported arithmetic operator");
  }
}

bdd::node_ref encode_formula(bdd::manager& m, const encoding& enc,
                             const nadl::formula& f) {
  if (const auto* c = std::get_if<nadl::formula::constant>(&f.node))
    return m.constant(c->value);
  if (const auto* p = std::get_if<nadl::formula::prop_ref>(&f.node)) {
    const var_layout& vl = enc.state_vars.at(p->index);
    return m.var(p->next ? vl.nxt[0] : vl.cur[0]);
  }
  if (const auto* r = std::get_if<nadl::formula::relation>(&f.node)) {
    bitvec lhs = encode_arith(m, enc, *r->lhs);
    bitvec rhs = encode_arith(m, enc, *r->rhs);
    return bv_compare(m, r->op, lhs, rhs);
  }
  if (const auto* n = std::get_if<nadl::formula::negation>(&f.node))
    return m.negate(encode_formula(m, enc, *n->arg));
  if (const auto* b = std::get_if<nadl::formula::binary>(&f.node)) {
    bdd::node_ref lhs = encode_formula(m, enc, *b->lhs);
    bdd::node_ref rhs = encode_formula(m, enc, *b->rhs);
    switch (b->op) {
      case nadl::connective::conj: return m.land(lhs, rhs);
      case nadl::connective::disj: return m.lor(lhs, rhs);
      case nadl::connective::implies: return m.implies(lhs, rhs);
      default: return m.iff(lhs, rhs);
    }
  }
  throw error("encode: if-then-else must be desugared before encoding");
}

bdd::node_ref range_constraint(bdd::manager& m, const encoding& enc,
                               std::size_t var_idx, bool next) {
  const var_layout& vl = enc.state_vars.at(var_idx);
  if (!vl.numeric) return m.one();
  if (vl.range == (1u << vl.cur.size())) return m.one();
  bitvec value;
  for (unsigned idx : (next ? vl.nxt : vl.cur)) value.bits.push_back(m.var(idx));
  return bv_compare(m, nadl::rel_op::le, value, bv_constant(m, vl.range - 1));
}

bdd::node_ref action_eq(bdd::manager& m, const encoding& enc,
                        std::size_t agent_idx, unsigned action_id) {
  const agent_layout& al = enc.agent(agent_idx);
  bdd::node_ref out = m.one();
  for (std::size_t k = 0; k < al.id_bits.size(); ++k) {
    bool bit = (action_id >> k) & 1u;
    out = m.land(out, bit ? m.var(al.id_bits[k]) : m.nvar(al.id_bits[k]));
  }
  return out;
}

bdd::node_ref state_cube(bdd::manager& m, const encoding& enc,
                         const std::vector<std::uint64_t>& values) {
  if (values.size() != enc.state_vars.size())
    throw error("state_cube: expected one value per state variable");
  bdd::node_ref out = m.one();
  for (std::size_t v = 0; v < values.size(); ++v) {
    const var_layout& vl = enc.state_vars[v];
    if (values[v] >= vl.range)
      throw error("state_cube: value " + std::to_string(values[v]) +
                  " out of range for state variable " + std::to_string(v));
    for (std::size_t k = 0; k < vl.cur.size(); ++k)
      out = m.land(out, ((values[v] >> k) & 1u) ? m.var(vl.cur[k])
                                                : m.nvar(vl.cur[k]));
  }
  return out;
}

namespace {

bdd::node_ref encode_clean(bdd::manager& m, const encoding& enc,
                           const nadl::formula& f) {
  return encode_formula(m, enc, *nadl::desugar_ite(f));
}

bdd::node_ref id_in_range(bdd::manager& m, const encoding& enc,
                          std::size_t agent_idx) {
  const agent_layout& al = enc.agent(agent_idx);
  if (al.id_bits.empty() || al.action_count == (1u << al.id_bits.size()))
    return m.one();
  bitvec id;
  for (unsigned b : al.id_bits) id.bits.push_back(m.var(b));
  return bv_compare(m, nadl::rel_op::le, id, bv_constant(m, al.action_count - 1));
}

}  // namespace

std::vector<bdd::node_ref> build_action_constraint(bdd::manager& m,
                                                   const nadl::domain_desc& dd,
                                                   const encoding& enc) {
  std::vector<bdd::node_ref> out;
  for (std::size_t i = 0; i < dd.agent_count(); ++i) {
    const nadl::agent_desc& agent = dd.agent(i);
    for (std::size_t j = 0; j < agent.actions.size(); ++j) {
      const nadl::action_desc& act = agent.actions[j];
      bdd::node_ref body = m.land(encode_clean(m, enc, *act.pre),
                                  encode_clean(m, enc, *act.eff));
      out.push_back(
          m.implies(action_eq(m, enc, i, static_cast<unsigned>(j)), body));
    }
    bdd::node_ref range = id_in_range(m, enc, i);
    if (range != m.one()) out.push_back(range);
  }
  return out;
}

std::vector<bdd::node_ref> build_frame(bdd::manager& m,
                                       const nadl::domain_desc& dd,
                                       const encoding& enc) {
  std::vector<bdd::node_ref> out;
  for (std::size_t v = 0; v < dd.vars.size(); ++v) {
    // "no selected action constrains v" implies v' = v
    bdd::node_ref nobody = m.one();
    for (std::size_t i = 0; i < dd.agent_count(); ++i) {
      const nadl::agent_desc& agent = dd.agent(i);
      for (std::size_t j = 0; j < agent.actions.size(); ++j) {
        const auto& c = agent.actions[j].constrained_idx;
        if (std::binary_search(c.begin(), c.end(), static_cast<int>(v)))
          nobody = m.land(
              nobody, m.negate(action_eq(m, enc, i, static_cast<unsigned>(j))));
      }
    }
    const var_layout& vl = enc.state_vars[v];
    bdd::node_ref same = m.one();
    for (std::size_t k = 0; k < vl.cur.size(); ++k)
      same = m.land(same, m.iff(m.var(vl.cur[k]), m.var(vl.nxt[k])));
    bdd::node_ref conjunct = m.implies(nobody, same);
    if (conjunct != m.one()) out.push_back(conjunct);
  }
  return out;
}

std::vector<bdd::node_ref> build_interference(bdd::manager& m,
                                              const nadl::domain_desc& dd,
                                              const encoding& enc) {
  std::vector<bdd::node_ref> out;
  auto overlap = [](const std::vector<int>& a, const std::vector<int>& b) {
    for (int v : a)
      if (std::binary_search(b.begin(), b.end(), v)) return true;
    return false;
  };
  auto team = [&](std::size_t begin, std::size_t count) {
    for (std::size_t i1 = begin; i1 < begin + count; ++i1) {
      for (std::size_t i2 = i1 + 1; i2 < begin + count; ++i2) {
        const auto& a1 = dd.agent(i1).actions;
        const auto& a2 = dd.agent(i2).actions;
        for (std::size_t j1 = 0; j1 < a1.size(); ++j1)
          for (std::size_t j2 = 0; j2 < a2.size(); ++j2)
            if (overlap(a1[j1].constrained_idx, a2[j2].constrained_idx))
              out.push_back(m.negate(
                  m.land(action_eq(m, enc, i1, static_cast<unsigned>(j1)),
                         action_eq(m, enc, i2, static_cast<unsigned>(j2)))));
      }
    }
  };
  team(0, dd.environment_agents.size());
  team(dd.environment_agents.size(), dd.system_agents.size());
  return out;
}

std::vector<bdd::node_ref> build_range_constraints(bdd::manager& m,
                                                   const nadl::domain_desc& dd,
                                                   const encoding& enc) {
  std::vector<bdd::node_ref> out;
  for (std::size_t v = 0; v < dd.vars.size(); ++v) {
    for (bool next : {false, true}) {
      bdd::node_ref rc = range_constraint(m, enc, v, next);
      if (rc != m.one()) out.push_back(rc);
    }
  }
  return out;
}

bdd::node_ref build_init(bdd::manager& m, const nadl::domain_desc& dd,
                         const encoding& enc) {
  bdd::node_ref out = encode_clean(m, enc, *dd.init);
  for (std::size_t v = 0; v < dd.vars.size(); ++v)
    out = m.land(out, range_constraint(m, enc, v, false));
  return out;
}

bdd::node_ref build_goal(bdd::manager& m, const nadl::domain_desc& dd,
                         const encoding& enc) {
  bdd::node_ref out = encode_clean(m, enc, *dd.goal);
  for (std::size_t v = 0; v < dd.vars.size(); ++v)
    out = m.land(out, range_constraint(m, enc, v, false));
  return out;
}

transition_system::transition_system(bdd::manager& m, const nadl::domain_desc& dd,
                                     encode_mode mode, unsigned partition_budget)
    : mgr_(&m), dd_(&dd), enc_(allocate(dd)), mode_(mode) {
  if (m.var_count() != enc_.total_vars)
    throw error("transition_system: manager sized for a different encoding");
  if (partition_budget == 0) throw error("transition_system: zero partition budget");

  init_ = build_init(m, dd, enc_);
  goal_ = build_goal(m, dd, enc_);

  current_cube_ = m.cube(enc_.current_vars);
  next_cube_ = m.cube(enc_.next_vars);
  sys_action_cube_ = m.cube(enc_.sys_action_vars);
  env_action_cube_ = m.cube(enc_.env_action_vars);

  std::vector<std::pair<unsigned, unsigned>> up, down;
  for (const auto& vl : enc_.state_vars)
    for (std::size_t k = 0; k < vl.cur.size(); ++k) {
      up.emplace_back(vl.cur[k], vl.nxt[k]);
      down.emplace_back(vl.nxt[k], vl.cur[k]);
    }
  prime_ = m.make_pairing(std::move(up));
  unprime_ = m.make_pairing(std::move(down));

  basic_conjuncts_ = build_action_constraint(m, dd, enc_);
  for (auto light : {&build_frame, &build_interference, &build_range_constraints})
    for (bdd::node_ref c : light(m, dd, enc_)) basic_conjuncts_.push_back(c);

  if (mode == encode_mode::monolithic) {
    partition p{monolithic(), next_cube_};
    partitions_.push_back(p);
    basic_group_count_ = 1;
  } else {
    build_partitions(basic_conjuncts_, partition_budget);
  }
}

void transition_system::build_partitions(std::vector<bdd::node_ref> conjuncts,
                                         unsigned budget) {
  bdd::manager& m = *mgr_;
  // Quantification support of a conjunct: next-state and environment-action
  // variables in its support.
  auto quant_support = [&](bdd::node_ref c) {
    bdd::var_set out;
    for (unsigned v : m.support(c)) {
      var_role role = enc_.layout[v].role;
      if (role == var_role::next || role == var_role::env_action) out.push_back(v);
    }
    return out;
  };

  // Basic groups: conjuncts with identical quantification support, conjoined.
  std::map<bdd::var_set, bdd::node_ref> groups;
  for (bdd::node_ref c : conjuncts) {
    if (c == m.one()) continue;
    bdd::var_set key = quant_support(c);
    auto [it, fresh] = groups.emplace(key, c);
    if (!fresh) it->second = m.land(it->second, c);
  }

  // Pure input constraints (nothing to quantify) ride along with the first
  // group instead of forming one of their own.
  bdd::node_ref input_only = m.one();
  if (auto it = groups.find(bdd::var_set{}); it != groups.end()) {
    input_only = it->second;
    groups.erase(it);
  }
  basic_group_count_ = std::max<std::size_t>(1, groups.size());

  // Smallest supports first, then pack up to `budget` groups per partition.
  std::vector<std::pair<bdd::var_set, bdd::node_ref>> ordered(groups.begin(),
                                                              groups.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() < b.first.size();
                   });
  if (ordered.empty())
    ordered.emplace_back(bdd::var_set{}, input_only);
  else
    ordered.front().second = m.land(input_only, ordered.front().second);
  std::vector<bdd::node_ref> rels;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (i % budget == 0) rels.push_back(ordered[i].second);
    else rels.back() = m.land(rels.back(), ordered[i].second);
  }

  // Schedule each variable at the last partition that mentions it; variables
  // mentioned nowhere are vacuous and go to the first partition.
  std::vector<int> last(m.var_count(), -1);
  for (std::size_t p = 0; p < rels.size(); ++p)
    for (unsigned v : m.support(rels[p])) last[v] = static_cast<int>(p);
  std::vector<bdd::var_set> sched(rels.size());
  bdd::var_set all_quant = enc_.next_vars;
  all_quant.insert(all_quant.end(), enc_.env_action_vars.begin(),
                   enc_.env_action_vars.end());
  std::sort(all_quant.begin(), all_quant.end());
  for (unsigned v : all_quant) sched[last[v] < 0 ? 0 : last[v]].push_back(v);

  for (std::size_t p = 0; p < rels.size(); ++p)
    partitions_.push_back(partition{rels[p], m.cube(sched[p])});
}

bdd::node_ref transition_system::full_relation() const {
  if (!full_) {
    bdd::node_ref t = mgr_->one();
    for (bdd::node_ref c : basic_conjuncts_) t = mgr_->land(t, c);
    full_ = t;
  }
  return *full_;
}

bdd::node_ref transition_system::monolithic() const {
  if (!mono_) mono_ = mgr_->exists(full_relation(), env_action_cube_);
  return *mono_;
}

bool transition_system::deterministic() const {
  if (!det_) {
    bdd::manager& m = *mgr_;
    bdd::node_ref t = monolithic();
    bool det = true;
    // (s, i) with successors differing in some next bit means two successors.
    for (unsigned v : enc_.next_vars) {
      bdd::var_set others;
      for (unsigned w : enc_.next_vars)
        if (w != v) others.push_back(w);
      bdd::node_ref with0 = m.exists(m.restrict_var(t, v, false), m.cube(others));
      bdd::node_ref with1 = m.exists(m.restrict_var(t, v, true), m.cube(others));
      if (m.land(with0, with1) != m.zero()) {
        det = false;
        break;
      }
    }
    det_ = det;
  }
  return *det_;
}

}  // namespace uplan::enc
