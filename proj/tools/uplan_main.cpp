// Command line front end: generate benchmark domains, synthesize universal
// plans, query plan files, and simulate plan execution.
//
// Exit codes: 0 success, 1 planning algorithm failure, 2 parse/validation
// errors (including malformed inputs), 3 file I/O errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "uplan/bdd_io.hpp"
#include "uplan/generators.hpp"
#include "uplan/oracle.hpp"
#include "uplan/plan.hpp"
#include "uplan/plan_io.hpp"

namespace {

using namespace uplan;

constexpr int kExitOk = 0;
constexpr int kExitPlanFailure = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitIo = 3;

struct io_error : error {
  using error::error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path);
  out << text;
}

nadl::domain_desc load_domain(const std::string& path) {
  std::string text = read_file(path);
  nadl::domain_desc dd = nadl::parse(text);
  std::vector<nadl::violation> vs = nadl::validate(dd);
  if (!vs.empty()) {
    std::cerr << nadl::format_violations(vs);
    throw error("domain description is invalid");
  }
  return dd;
}

// "pos=0,robot_works=1" -> named values
std::vector<std::pair<std::string, std::uint64_t>> parse_state(
    const std::string& text) {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw error("state: expected name=value, got '" + item + "'");
    std::string name = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    auto strip = [](std::string& s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.erase(s.begin());
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    };
    strip(name);
    strip(value);
    std::uint64_t v;
    if (value == "true") v = 1;
    else if (value == "false") v = 0;
    else {
      try {
        v = std::stoull(value);
      } catch (...) {
        throw error("state: bad value '" + value + "' for " + name);
      }
    }
    out.emplace_back(name, v);
  }
  if (out.empty()) throw error("state: no assignments given");
  return out;
}

plan::state_values to_state_values(
    const nadl::domain_desc& dd,
    const std::vector<std::pair<std::string, std::uint64_t>>& named) {
  plan::state_values values(dd.vars.size());
  std::vector<bool> seen(dd.vars.size(), false);
  for (const auto& [name, v] : named) {
    int idx = dd.var_index(name);
    if (idx < 0) throw error("state: unknown variable '" + name + "'");
    if (seen[idx]) throw error("state: variable '" + name + "' given twice");
    seen[idx] = true;
    values[idx] = v;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw error("state: variable '" + dd.vars[i].name + "' not assigned");
  return values;
}

std::string state_text(const nadl::domain_desc& dd,
                       const plan::state_values& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i)
    os << (i ? "," : "") << dd.vars[i].name << '=' << values[i];
  return os.str();
}

unsigned decode_block(const bdd::sat_assignment& a,
                      const std::vector<unsigned>& bits) {
  unsigned id = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    auto it = std::lower_bound(a.begin(), a.end(), bits[k],
                               [](const bdd::assignment_entry& x, unsigned var) {
                                 return x.var < var;
                               });
    if (it != a.end() && it->var == bits[k] && it->value) id |= 1u << k;
  }
  return id;
}

struct gen_config {
  std::string domain;
  unsigned n = 8;
  bool deterministic = false;
  unsigned balls = 4;
  int problem = 0;
  unsigned objects = 5;
  unsigned heat = 4;
  unsigned turbines = 4;
  unsigned width = 4;
  unsigned height = 3;
  unsigned players = 2;
  unsigned obstacles = 1;
  unsigned grid_bits = 5;
  std::string output;
};

int run_gen(const gen_config& cfg) {
  std::string text;
  if (cfg.domain == "robot-baby") text = gen::robot_baby();
  else if (cfg.domain == "beam-walk") text = gen::beam_walk(cfg.n, cfg.deterministic);
  else if (cfg.domain == "domain1") text = gen::domain1(cfg.n);
  else if (cfg.domain == "domain2") text = gen::domain2(cfg.n);
  else if (cfg.domain == "gripper") {
    unsigned balls = cfg.problem > 0 ? 4 + 2 * (cfg.problem - 1) : cfg.balls;
    text = gen::gripper(balls);
  } else if (cfg.domain == "movie") text = gen::movie(cfg.objects);
  else if (cfg.domain == "power-plant") text = gen::power_plant(cfg.heat, cfg.turbines);
  else if (cfg.domain == "soccer") text = gen::soccer(cfg.width, cfg.height, cfg.players);
  else if (cfg.domain == "obstacle") text = gen::obstacle(cfg.obstacles, cfg.grid_bits);
  else throw error("unknown domain '" + cfg.domain + "'");

  if (cfg.output.empty()) std::cout << text;
  else write_file(cfg.output, text);
  return kExitOk;
}

struct plan_config {
  std::string domain_path;
  std::string algorithm = "optimistic";
  unsigned budget = 10;
  bool monolithic = false;
  std::string output;
  bool stats = false;
  std::uint64_t iteration_cap = 0;
  std::uint64_t step_cap = 100000;
};

int run_plan(const plan_config& cfg) {
  nadl::domain_desc dd = load_domain(cfg.domain_path);
  auto alg = plan::algorithm_from(cfg.algorithm);
  if (!alg) throw error("unknown algorithm '" + cfg.algorithm + "'");

  enc::encoding e = enc::allocate(dd);
  bdd::manager m(e.total_vars);
  enc::transition_system ts(m, dd,
                            cfg.monolithic ? enc::encode_mode::monolithic
                                           : enc::encode_mode::partitioned,
                            cfg.budget);

  plan::plan_options opts;
  opts.iteration_cap = cfg.iteration_cap;
  plan::plan_outcome out = plan::plan_with(*alg, ts, opts);
  if (!out.ok()) {
    std::cout << plan::failure_text(out.reason) << '\n';
    return kExitPlanFailure;
  }

  if (cfg.stats) {
    for (std::size_t k = 0; k < out.plan->stats.size(); ++k)
      std::cout << "iter " << k + 1 << " new_states "
                << out.plan->stats[k].new_states << " plan_nodes "
                << out.plan->stats[k].plan_nodes << '\n';
  }

  std::string path = cfg.output.empty() ? cfg.domain_path + ".plan" : cfg.output;
  std::ostringstream os;
  plan::write_plan_file(os, ts, *out.plan);
  write_file(path, os.str());

  bdd::node_ref covered = plan::states_of(ts, out.plan->rules);
  std::cout << "SUCCESS iterations=" << out.plan->iterations
            << " plan_nodes=" << m.node_count(out.plan->rules)
            << " covered_states=" << m.count_sat(covered, e.current_vars)
            << '\n';

  if (*alg == plan::algorithm::deterministic) {
    if (m.count_sat(ts.init(), e.current_vars) != 1)
      throw error(
          "deterministic planning needs a unique initial state; use "
          "`simulate` for a specific start");
    plan::state_values start = plan::values_from_assignment(
        e, m.pick_sat(ts.init(), e.current_vars, 0), false);
    plan::seq_result seq =
        plan::sequential_plan(ts, out.plan->rules, start, cfg.step_cap);
    if (!seq.ok()) throw error("sequential extraction: " + seq.failure->message);
    std::cout << "sequence_length " << seq.steps.size() << '\n';
    for (std::size_t k = 0; k < seq.steps.size(); ++k)
      std::cout << "step " << k + 1 << ' ' << plan::to_text(seq.steps[k]) << '\n';
  }
  return kExitOk;
}

struct query_config {
  std::string plan_path;
  std::string state;
};

int run_query(const query_config& cfg) {
  std::istringstream is(read_file(cfg.plan_path));
  plan::loaded_plan lp = plan::read_plan_file(is);
  for (const auto& ja : plan::query_plan(lp, parse_state(cfg.state)))
    std::cout << plan::to_text(ja) << '\n';
  return kExitOk;
}

struct simulate_config {
  std::string plan_path;
  std::string domain_path;
  std::string state;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  std::uint64_t max_steps = 1000;
};

int run_simulate(const simulate_config& cfg) {
  std::istringstream plan_is(read_file(cfg.plan_path));
  plan::loaded_plan lp = plan::read_plan_file(plan_is);
  nadl::domain_desc dd = load_domain(cfg.domain_path);
  std::string why;
  if (!plan::matches_domain(lp, dd, &why))
    throw error("plan file does not fit this domain: " + why);

  enc::encoding e = enc::allocate(dd);
  bdd::manager m(e.total_vars);
  enc::transition_system ts(m, dd, enc::encode_mode::partitioned, 10);
  std::istringstream diagram(lp.diagram_text);
  bdd::node_ref rules = bdd::parse_text(diagram, m);

  plan::state_values start = to_state_values(dd, parse_state(cfg.state));
  bdd::node_ref start_cube = plan::state_cube(ts, start);
  bool at_goal = m.land(start_cube, ts.goal()) != m.zero();
  if (!at_goal && m.land(start_cube, plan::states_of(ts, rules)) == m.zero())
    throw error("start state is neither covered by the plan nor a goal state");

  if (cfg.exhaustive) {
    oracle::explicit_nfa nfa = oracle::expand(dd);
    oracle::sa_mask rule_mask(nfa.pair_count(), 0);
    bdd::var_set over = e.current_vars;
    over.insert(over.end(), e.sys_action_vars.begin(), e.sys_action_vars.end());
    std::sort(over.begin(), over.end());
    m.enumerate_sat(rules, over, [&](const bdd::sat_assignment& a) {
      plan::state_values v = plan::values_from_assignment(e, a, false);
      std::size_t input = 0;
      for (std::size_t i = 0; i < e.sys_agents.size(); ++i)
        input = input * dd.system_agents[i].actions.size() +
                decode_block(a, e.sys_agents[i].id_bits);
      rule_mask[nfa.state_id(v) * nfa.input_count() + input] = 1;
      return true;
    });
    oracle::plan_evaluation ev = oracle::evaluate_plan(nfa, rule_mask);
    auto profile = ev.at(nfa.state_id(start));
    std::cout << "best ";
    if (profile.best == oracle::plan_evaluation::unbounded) std::cout << "inf";
    else std::cout << profile.best;
    std::cout << "\nworst ";
    switch (profile.kind) {
      case oracle::plan_evaluation::worst_kind::finite:
        std::cout << profile.worst;
        break;
      case oracle::plan_evaluation::worst_kind::cycle:
        std::cout << "inf";
        break;
      case oracle::plan_evaluation::worst_kind::deadend:
        std::cout << "inf-deadend";
        break;
    }
    std::cout << '\n';
    return kExitOk;
  }

  std::mt19937_64 rng(cfg.seed);
  std::cout << "seed " << cfg.seed << '\n';
  plan::state_values s = start;
  for (std::uint64_t step = 1; step <= cfg.max_steps; ++step) {
    bdd::node_ref here = plan::state_cube(ts, s);
    if (m.land(here, ts.goal()) != m.zero()) {
      std::cout << "goal reached after " << step - 1 << " steps\n";
      return kExitOk;
    }
    std::vector<plan::joint_action> advised = plan::extract_actions(ts, rules, s);
    if (advised.empty()) {
      std::cout << "no advice at state " << state_text(dd, s) << '\n';
      return kExitPlanFailure;
    }
    const plan::joint_action& act = advised[rng() % advised.size()];

    // environment completion and outcome, uniform over the transition set
    bdd::node_ref b = m.land(ts.full_relation(),
                             m.land(here, plan::joint_action_cube(ts, act.ids)));
    b = m.exists(b, ts.current_cube());
    b = m.exists(b, ts.sys_action_cube());
    bdd::var_set over = e.next_vars;
    over.insert(over.end(), e.env_action_vars.begin(), e.env_action_vars.end());
    std::sort(over.begin(), over.end());
    std::uint64_t count = m.count_sat(b, over);
    if (count == 0) {
      std::cout << "no transition at state " << state_text(dd, s) << '\n';
      return kExitPlanFailure;
    }
    bdd::sat_assignment picked = m.pick_sat(b, over, rng() % count);
    plan::state_values next = plan::values_from_assignment(e, picked, true);

    std::cout << "step " << step << " state " << state_text(dd, s) << " action "
              << plan::to_text(act);
    if (!dd.environment_agents.empty()) {
      std::cout << " env ";
      for (std::size_t i = 0; i < e.env_agents.size(); ++i) {
        unsigned id = decode_block(picked, e.env_agents[i].id_bits);
        std::cout << (i ? " " : "") << dd.environment_agents[i].name << '='
                  << dd.environment_agents[i].actions[id].name;
      }
    }
    std::cout << " next " << state_text(dd, next) << '\n';
    s = next;
  }
  std::cout << "step budget exhausted\n";
  return kExitPlanFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symbolic universal planner for NADL domains"};
  app.require_subcommand(1);

  gen_config gc;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a benchmark domain");
  gen_cmd
      ->add_option("domain", gc.domain,
                   "one of: robot-baby, beam-walk, domain1, domain2, gripper, "
                   "movie, power-plant, soccer, obstacle")
      ->required();
  gen_cmd->add_option("-n,--size", gc.n, "positions / chain length");
  gen_cmd->add_flag("--deterministic", gc.deterministic,
                    "beam-walk: remove the fall outcome");
  gen_cmd->add_option("--balls", gc.balls, "gripper: number of balls");
  gen_cmd->add_option("--problem", gc.problem,
                      "gripper: problem number (4 + 2(p-1) balls)");
  gen_cmd->add_option("--objects", gc.objects, "movie: objects per snack kind");
  gen_cmd->add_option("--heat-exchangers", gc.heat, "power-plant units");
  gen_cmd->add_option("--turbines", gc.turbines, "power-plant units");
  gen_cmd->add_option("--width", gc.width, "soccer field width");
  gen_cmd->add_option("--height", gc.height, "soccer field height");
  gen_cmd->add_option("--players", gc.players, "soccer players per team");
  gen_cmd->add_option("--obstacles", gc.obstacles, "obstacle count");
  gen_cmd->add_option("--grid-bits", gc.grid_bits, "obstacle grid size as 2^g");
  gen_cmd->add_option("-o,--output", gc.output, "output file (default stdout)");

  plan_config pc;
  CLI::App* plan_cmd = app.add_subcommand("plan", "synthesize a universal plan");
  plan_cmd->add_option("domain", pc.domain_path, "NADL domain file")->required();
  plan_cmd->add_option("-a,--algorithm", pc.algorithm,
                       "strong | strong-cyclic | optimistic | deterministic");
  plan_cmd->add_option("-p,--partition-budget", pc.budget,
                       "basic groups per partition (default 10)");
  plan_cmd->add_flag("--monolithic", pc.monolithic,
                     "single-partition transition relation");
  plan_cmd->add_option("-o,--output", pc.output,
                       "plan file (default: <domain>.plan)");
  plan_cmd->add_flag("--stats", pc.stats, "print per-iteration statistics");
  plan_cmd->add_option("--iteration-cap", pc.iteration_cap,
                       "safety cap on preimage iterations");
  plan_cmd->add_option("--step-cap", pc.step_cap,
                       "sequential extraction step budget");

  query_config qc;
  CLI::App* query_cmd =
      app.add_subcommand("query", "advised joint actions at a state");
  query_cmd->add_option("plan", qc.plan_path, "plan file")->required();
  query_cmd->add_option("-s,--state", qc.state, "full state, e.g. pos=0,ok=1")
      ->required();

  simulate_config sc;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "execute a universal plan");
  sim_cmd->add_option("plan", sc.plan_path, "plan file")->required();
  sim_cmd->add_option("domain", sc.domain_path, "NADL domain file")->required();
  sim_cmd->add_option("-s,--state", sc.state, "start state")->required();
  sim_cmd->add_option("--seed", sc.seed, "random trace seed");
  sim_cmd->add_flag("--exhaustive", sc.exhaustive,
                    "best/worst case profile via the explicit oracle");
  sim_cmd->add_option("--max-steps", sc.max_steps, "random trace step budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gc);
    if (plan_cmd->parsed()) return run_plan(pc);
    if (query_cmd->parsed()) return run_query(qc);
    if (sim_cmd->parsed()) return run_simulate(sc);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const nadl::parse_error& e) {
    std::cerr << "ERROR " << e.loc.line << ':' << e.loc.col << " parse "
              << e.what() << '\n';
    return kExitBadInput;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
