#include "uplan/plan_io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "uplan/bdd_io.hpp"

namespace uplan::plan {

void write_plan_file(std::ostream& os, const enc::transition_system& ts,
                     const universal_plan& plan) {
  const nadl::domain_desc& dd = ts.domain();
  os << "umop-plan v1\n";
  os << "algorithm " << algorithm_name(plan.alg) << '\n';
  os << "iterations " << plan.iterations << '\n';
  os << "vars " << ts.enc().total_vars << '\n';
  for (const auto& v : dd.vars) {
    if (v.numeric)
      os << "statevar " << v.name << " nat " << v.range << '\n';
    else
      os << "statevar " << v.name << " bool 2\n";
  }
  auto emit_agents = [&](const std::vector<nadl::agent_desc>& agents,
                         const char* kind) {
    for (const auto& a : agents)
      os << "agent " << kind << ' ' << a.name << ' ' << a.actions.size() << '\n';
  };
  emit_agents(dd.environment_agents, "env");
  emit_agents(dd.system_agents, "sys");
  for (const auto& agents : {&dd.environment_agents, &dd.system_agents})
    for (const auto& a : *agents)
      for (std::size_t j = 0; j < a.actions.size(); ++j)
        os << "action " << a.name << ' ' << j << ' ' << a.actions[j].name << '\n';
  os << enc::layout_text(ts.enc());
  bdd::dump_text(os, ts.mgr(), plan.rules);
}

namespace {

nadl::formula_ptr true_formula() {
  auto f = std::make_unique<nadl::formula>();
  f->node = nadl::formula::constant{true};
  return f;
}

}  // namespace

loaded_plan read_plan_file(std::istream& is) {
  std::string all(std::istreambuf_iterator<char>(is), {});
  std::istringstream lines(all);
  std::string line;

  if (!std::getline(lines, line) || line != "umop-plan v1")
    throw error("plan file: missing 'umop-plan v1' header");

  loaded_plan lp;
  std::vector<std::string> layout_lines;
  std::vector<std::pair<std::string, std::string>> pending_actions;  // agent, name
  unsigned declared_vars = 0;

  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "node" || kind == "root") {
      // everything from here on is the diagram
      lp.diagram_text = line + "\n";
      while (std::getline(lines, line)) lp.diagram_text += line + "\n";
      break;
    }
    if (kind == "algorithm") {
      ls >> lp.algorithm_tag;
    } else if (kind == "iterations") {
      ls >> lp.iterations;
    } else if (kind == "vars") {
      ls >> declared_vars;
    } else if (kind == "statevar") {
      std::string name, vkind;
      unsigned range;
      if (!(ls >> name >> vkind >> range))
        throw error("plan file: malformed statevar line");
      lp.skeleton.vars.push_back(
          nadl::state_var{name, vkind == "nat", range, {}});
    } else if (kind == "agent") {
      std::string team, name;
      std::size_t count;
      if (!(ls >> team >> name >> count))
        throw error("plan file: malformed agent line");
      nadl::agent_desc agent{name, {}, {}};
      agent.actions.resize(count);
      (team == "env" ? lp.skeleton.environment_agents
                     : lp.skeleton.system_agents)
          .push_back(std::move(agent));
    } else if (kind == "action") {
      std::string agent, name;
      std::size_t id;
      if (!(ls >> agent >> id >> name))
        throw error("plan file: malformed action line");
      bool found = false;
      for (auto* agents :
           {&lp.skeleton.environment_agents, &lp.skeleton.system_agents})
        for (auto& a : *agents)
          if (a.name == agent) {
            if (id >= a.actions.size())
              throw error("plan file: action id out of range");
            a.actions[id].name = name;
            a.actions[id].pre = true_formula();
            a.actions[id].eff = true_formula();
            found = true;
          }
      if (!found) throw error("plan file: action for unknown agent " + agent);
    } else if (kind == "var") {
      layout_lines.push_back(line);
    } else {
      throw error("plan file: unexpected line: " + line);
    }
  }
  lp.skeleton.init = true_formula();
  lp.skeleton.goal = true_formula();

  lp.enc = enc::allocate(lp.skeleton);
  if (lp.enc.total_vars != declared_vars)
    throw error("plan file: variable count does not match the declarations");
  std::ostringstream expect;
  for (const auto& l : layout_lines) expect << l << '\n';
  if (expect.str() != enc::layout_text(lp.enc))
    throw error("plan file: variable layout does not match the declarations");

  if (lp.diagram_text.empty()) throw error("plan file: missing diagram");
  lp.mgr = std::make_shared<bdd::manager>(lp.enc.total_vars);
  std::istringstream diagram(lp.diagram_text);
  lp.rules = bdd::parse_text(diagram, *lp.mgr);
  return lp;
}

std::vector<joint_action> query_plan(
    const loaded_plan& lp,
    const std::vector<std::pair<std::string, std::uint64_t>>& state) {
  const nadl::domain_desc& dd = lp.skeleton;
  std::vector<std::uint64_t> values(dd.vars.size());
  std::vector<bool> seen(dd.vars.size(), false);
  for (const auto& [name, value] : state) {
    int idx = dd.var_index(name);
    if (idx < 0) throw error("query: unknown variable '" + name + "'");
    if (seen[idx]) throw error("query: variable '" + name + "' given twice");
    seen[idx] = true;
    values[idx] = value;
  }
  for (std::size_t v = 0; v < dd.vars.size(); ++v)
    if (!seen[v])
      throw error("query: state does not assign variable '" + dd.vars[v].name +
                  "'");

  bdd::manager& m = *lp.mgr;
  bdd::node_ref cube = enc::state_cube(m, lp.enc, values);
  bdd::node_ref at_state = m.land(lp.rules, cube);
  bdd::node_ref ids = m.exists(at_state, m.cube(lp.enc.current_vars));
  std::vector<joint_action> out;
  m.enumerate_sat(ids, lp.enc.sys_action_vars, [&](const bdd::sat_assignment& a) {
    joint_action ja;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < lp.enc.sys_agents.size(); ++i) {
      unsigned id = 0;
      for (std::size_t k = 0; k < lp.enc.sys_agents[i].id_bits.size(); ++k, ++pos)
        if (a[pos].value) id |= 1u << k;
      ja.ids.push_back(id);
      const nadl::agent_desc& agent = dd.system_agents[i];
      ja.named.emplace_back(agent.name, agent.actions.at(id).name);
    }
    out.push_back(std::move(ja));
    return true;
  });
  return out;
}

bool matches_domain(const loaded_plan& lp, const nadl::domain_desc& dd,
                    std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (lp.skeleton.vars.size() != dd.vars.size())
    return fail("different state variable count");
  for (std::size_t v = 0; v < dd.vars.size(); ++v) {
    const auto& a = lp.skeleton.vars[v];
    const auto& b = dd.vars[v];
    if (a.name != b.name || a.numeric != b.numeric || a.range != b.range)
      return fail("state variable mismatch at '" + b.name + "'");
  }
  auto check_agents = [&](const std::vector<nadl::agent_desc>& a,
                          const std::vector<nadl::agent_desc>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].name != b[i].name || a[i].actions.size() != b[i].actions.size())
        return false;
      for (std::size_t j = 0; j < a[i].actions.size(); ++j)
        if (a[i].actions[j].name != b[i].actions[j].name) return false;
    }
    return true;
  };
  if (!check_agents(lp.skeleton.environment_agents, dd.environment_agents))
    return fail("environment agent mismatch");
  if (!check_agents(lp.skeleton.system_agents, dd.system_agents))
    return fail("system agent mismatch");
  return true;
}

}  // namespace uplan::plan
