#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "uplan/nadl.hpp"

using namespace uplan;

namespace {

const char* kRobotBaby = R"(
% one robot lifting a block, one baby hitting the robot
variables
  nat(4) pos
  bool robot_works
system
  agt: Robot
    Lift-Block
      con: pos
      pre: pos < 3
      eff: robot_works -> pos' = pos + 1, pos' = pos
    Lower-Block
      con: pos
      pre: pos > 0
      eff: robot_works -> pos' = pos - 1, pos' = pos
environment
  agt: Baby
    Hit-Robot
      con: robot_works
      pre: true
      eff: ~robot_works => ~robot_works'
initially
  pos = 0 /\ robot_works
goal
  pos = 3
)";

nadl::formula_ptr parse_formula_text(const std::string& body) {
  // wrap in a tiny domain to reuse the full parser
  std::string text =
      "variables nat(8) x, y bool a, b, c\n"
      "system agt: A act con: x, a pre: true eff: " +
      body + "\ninitially true goal true";
  nadl::domain_desc dd = nadl::parse(text);
  return dd.system_agents[0].actions[0].eff->clone();
}

}  // namespace

TEST_CASE("robot-baby domain parses to the expected tuple") {
  nadl::domain_desc dd = nadl::parse(kRobotBaby);
  REQUIRE(dd.vars.size() == 2);
  CHECK(dd.vars[0].name == "pos");
  CHECK(dd.vars[0].numeric);
  CHECK(dd.vars[0].range == 4);
  CHECK(dd.vars[1].name == "robot_works");
  CHECK_FALSE(dd.vars[1].numeric);
  REQUIRE(dd.system_agents.size() == 1);
  CHECK(dd.system_agents[0].name == "Robot");
  REQUIRE(dd.system_agents[0].actions.size() == 2);
  CHECK(dd.system_agents[0].actions[0].name == "Lift-Block");
  CHECK(dd.system_agents[0].actions[1].name == "Lower-Block");
  REQUIRE(dd.environment_agents.size() == 1);
  CHECK(dd.environment_agents[0].name == "Baby");
  REQUIRE(dd.environment_agents[0].actions.size() == 1);
  CHECK(dd.environment_agents[0].actions[0].name == "Hit-Robot");
  CHECK(nadl::validate(dd).empty());

  // the Lift-Block effect is an if-then-else on robot_works
  const auto& eff = *dd.system_agents[0].actions[0].eff;
  REQUIRE(std::holds_alternative<nadl::formula::if_then_else>(eff.node));
}

TEST_CASE("disjunction chain parses as written") {
  auto f = parse_formula_text("(a \\/ b \\/ c \\/ a)");
  // ((a \/ b) \/ c) \/ a
  const auto* top = std::get_if<nadl::formula::binary>(&f->node);
  REQUIRE(top);
  CHECK(top->op == nadl::connective::disj);
  const auto* mid = std::get_if<nadl::formula::binary>(&top->lhs->node);
  REQUIRE(mid);
  CHECK(mid->op == nadl::connective::disj);
}

TEST_CASE("missing goal section is a syntax error") {
  std::string text =
      "variables bool a system agt: A act con: a pre: true eff: a' initially a";
  try {
    nadl::parse(text);
    FAIL("expected a parse error");
  } catch (const nadl::parse_error& e) {
    CHECK(std::string(e.what()).find("goal") != std::string::npos);
  }
}

TEST_CASE("conjunction binds tighter than disjunction") {
  auto f = parse_formula_text("a \\/ b /\\ c");
  const auto* top = std::get_if<nadl::formula::binary>(&f->node);
  REQUIRE(top);
  CHECK(top->op == nadl::connective::disj);
  const auto* rhs = std::get_if<nadl::formula::binary>(&top->rhs->node);
  REQUIRE(rhs);
  CHECK(rhs->op == nadl::connective::conj);
}

TEST_CASE("if-then-else binds loosest") {
  auto f = parse_formula_text("a -> b, c /\\ ~a");
  const auto* ite = std::get_if<nadl::formula::if_then_else>(&f->node);
  REQUIRE(ite);
  CHECK(std::holds_alternative<nadl::formula::binary>(ite->else_f->node));

  auto g = parse_formula_text("a => b -> c, b");
  const auto* ite2 = std::get_if<nadl::formula::if_then_else>(&g->node);
  REQUIRE(ite2);
  CHECK(std::holds_alternative<nadl::formula::binary>(ite2->cond->node));
}

TEST_CASE("implication is right associative") {
  auto f = parse_formula_text("a => b => c");
  const auto* top = std::get_if<nadl::formula::binary>(&f->node);
  REQUIRE(top);
  CHECK(std::holds_alternative<nadl::formula::prop_ref>(top->lhs->node));
  CHECK(std::holds_alternative<nadl::formula::binary>(top->rhs->node));
}

TEST_CASE("parenthesized arithmetic against parenthesized formulas") {
  auto f = parse_formula_text("(x + 1) = (y - 1)");
  CHECK(std::holds_alternative<nadl::formula::relation>(f->node));
  auto g = parse_formula_text("(x = 1)");
  CHECK(std::holds_alternative<nadl::formula::relation>(g->node));
  auto h = parse_formula_text("(a /\\ x = 1)");
  CHECK(std::holds_alternative<nadl::formula::binary>(h->node));
}

TEST_CASE("lexical and name errors carry positions") {
  try {
    nadl::parse("variables\n  bool a\nsystem\n  agt: A\n    act\n      con: zz\n");
    FAIL("expected a parse error");
  } catch (const nadl::parse_error& e) {
    CHECK(e.loc.line == 6);
    CHECK(std::string(e.what()).find("unknown variable") != std::string::npos);
  }
  CHECK_THROWS_AS(nadl::parse("variables bool a, a system"), nadl::parse_error);
  CHECK_THROWS_AS(nadl::parse("variables bool a @"), nadl::parse_error);
}

TEST_CASE("validation reports invariant violations") {
  SUBCASE("system and environment constraining the same variable") {
    nadl::domain_desc dd = nadl::parse(R"(
variables nat(4) pos bool robot_works
system
  agt: Robot
    Lift con: pos pre: true eff: pos' = pos
environment
  agt: Baby
    Hit-Robot con: robot_works, pos pre: true eff: ~robot_works'
initially true
goal pos = 3
)");
    auto vs = nadl::validate(dd);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].code == "sys-env-overlap");
    CHECK(nadl::format_violations(vs).rfind("ERROR ", 0) == 0);
  }

  SUBCASE("primed variable outside the constrained set") {
    nadl::domain_desc dd = nadl::parse(R"(
variables nat(4) pos bool robot_works
system
  agt: Robot
    Lift con: robot_works pre: true eff: pos' = pos /\ robot_works'
initially true
goal pos = 3
)");
    auto vs = nadl::validate(dd);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].code == "primed-outside-con");
  }

  SUBCASE("agents must have actions and usable ranges") {
    nadl::domain_desc dd = nadl::parse(R"(
variables nat(1) x
system
  agt: A
initially true
goal true
)");
    auto vs = nadl::validate(dd);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].code == "range-too-small");
    CHECK(vs[1].code == "agent-no-actions");
  }

  SUBCASE("multiplication parses but is rejected") {
    nadl::domain_desc dd = nadl::parse(R"(
variables nat(4) x
system
  agt: A
    act con: x pre: x * 2 < 4 eff: x' = x / 2 + x mod 2
initially true
goal true
)");
    auto vs = nadl::validate(dd);
    REQUIRE(vs.size() == 3);
    for (const auto& v : vs) CHECK(v.code == "unsupported-operator");
  }

  SUBCASE("initial and goal conditions must be state formulas") {
    nadl::domain_desc dd = nadl::parse(R"(
variables bool a
system
  agt: A
    act con: a pre: a' eff: a'
initially a'
goal ~a'
)");
    auto vs = nadl::validate(dd);
    REQUIRE(vs.size() == 3);
    CHECK(vs[0].code == "pre-not-state-formula");
    CHECK(vs[1].code == "init-not-state-formula");
    CHECK(vs[2].code == "goal-not-state-formula");
  }

  SUBCASE("validate is pure") {
    nadl::domain_desc dd = nadl::parse(R"(
variables nat(1) x
system
  agt: A
initially true
goal true
)");
    auto a = nadl::validate(dd);
    auto b = nadl::validate(dd);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].code == b[i].code);
      CHECK(a[i].message == b[i].message);
    }
  }
}

TEST_CASE("desugaring if-then-else") {
  auto f = parse_formula_text("a -> b, c");
  auto d = nadl::desugar_ite(*f);
  auto expect = parse_formula_text("(a /\\ b) \\/ (~a /\\ c)");
  CHECK(nadl::equal(*d, *expect));

  auto nested = parse_formula_text("a -> (b -> c, x = 1), b");
  auto dn = nadl::desugar_ite(*nested);
  auto expect2 = parse_formula_text(
      "(a /\\ ((b /\\ c) \\/ (~b /\\ x = 1))) \\/ (~a /\\ b)");
  CHECK(nadl::equal(*dn, *expect2));
}

TEST_CASE("print and reparse round trip") {
  const char* samples[] = {
      kRobotBaby,
      R"(
variables nat(5) x, y bool a, b
system
  agt: A
    one con: x pre: a => b => a eff: x' = x + 1 - 1
    two con: x, a pre: (x + 1) = y -> a, ~b eff: a' <=> x' > 2
  agt: B
    three con: y pre: ~(x = 1) /\ (a \/ b) eff: y' = x -> y' = 0, y' <= 4
environment
  agt: E
    noise con: b pre: true eff: b -> b', true
initially
  x = 0 /\ ~(a <=> b)
goal
  x >= 4 \/ (a -> b, ~b)
)",
  };
  for (const char* text : samples) {
    nadl::domain_desc dd = nadl::parse(text);
    std::string printed = nadl::to_text(dd);
    nadl::domain_desc again = nadl::parse(printed);
    REQUIRE(nadl::equal(dd, again));
    CHECK(nadl::to_text(again) == printed);
  }
}

TEST_CASE("safety fragment with disjunction chains") {
  // shape used by the power plant safety requirement
  auto f = parse_formula_text("(a \\/ b) /\\ (~a => c)");
  const auto* top = std::get_if<nadl::formula::binary>(&f->node);
  REQUIRE(top);
  CHECK(top->op == nadl::connective::conj);
}
