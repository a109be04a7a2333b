#include "uplan/generators.hpp"

#include <sstream>

namespace uplan::gen {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw error(std::string("generator: ") + msg);
}

}  // namespace

nadl::domain_desc load(const std::string& text) {
  nadl::domain_desc dd = nadl::parse(text);
  std::vector<nadl::violation> vs = nadl::validate(dd);
  if (!vs.empty()) throw error("generated domain invalid:\n" + nadl::format_violations(vs));
  return dd;
}

std::string robot_baby() {
  return R"(% robot-baby: lift a block four positions while a baby may break the robot
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
}

std::string beam_walk(unsigned positions, bool deterministic) {
  require(positions >= 2, "beam walk needs at least 2 positions");
  std::ostringstream os;
  os << "% beam walk with " << positions << " positions\n";
  os << "variables\n";
  os << "  bool up\n";
  os << "  nat(" << positions << ") pos\n";
  os << "system\n";
  os << "  agt: Walker\n";
  os << "    walk-forward\n";
  os << "      con: pos, up\n";
  os << "      pre: up /\\ pos < " << positions - 1 << "\n";
  if (deterministic)
    os << "      eff: pos' = pos + 1 /\\ up'\n";
  else
    os << "      eff: pos' = pos + 1\n";  // up' is free: the walker may fall
  os << "    walk-back\n";
  os << "      con: pos, up\n";
  os << "      pre: ~up /\\ pos > 0\n";
  os << "      eff: pos' = pos - 1 /\\ ~up'\n";
  os << "    climb\n";
  os << "      con: pos, up\n";
  os << "      pre: ~up /\\ pos = 0\n";
  os << "      eff: up' /\\ pos' = 0\n";
  os << "initially\n  up /\\ pos = 0\n";
  os << "goal\n  up /\\ pos = " << positions - 1 << "\n";
  return os.str();
}

std::string domain1(unsigned n) {
  require(n >= 2, "domain1 needs n >= 2");
  std::ostringstream os;
  os << "% " << n + 1 << "-state chain: safe steps vs a lucky jump\n";
  os << "variables\n  nat(" << n + 1 << ") pos\n";
  os << "system\n";
  os << "  agt: Mover\n";
  os << "    solid\n";
  os << "      con: pos\n";
  os << "      pre: pos < " << n << "\n";
  os << "      eff: pos' = pos + 1\n";
  os << "    dashed\n";
  os << "      con: pos\n";
  os << "      pre: pos = 0\n";
  os << "      eff: pos' = " << n << " \\/ pos' = 0\n";
  os << "initially\n  pos = 0\n";
  os << "goal\n  pos = " << n << "\n";
  return os.str();
}

std::string domain2(unsigned n) {
  require(n >= 2, "domain2 needs n >= 2");
  std::ostringstream os;
  os << "% noisy chain with a dead-end shortcut; state " << n + 1
     << " is the dead-end\n";
  os << "variables\n  nat(" << n + 2 << ") pos\n";
  os << "system\n";
  os << "  agt: Mover\n";
  os << "    solid\n";
  os << "      con: pos\n";
  os << "      pre: pos < " << n << "\n";
  os << "      eff: pos' = pos + 1 \\/ pos' = pos\n";
  os << "    dashed\n";
  os << "      con: pos\n";
  os << "      pre: pos = 0\n";
  os << "      eff: pos' = " << n << " \\/ pos' = " << n + 1 << "\n";
  os << "initially\n  pos = 0\n";
  os << "goal\n  pos = " << n << "\n";
  return os.str();
}

std::string gripper(unsigned balls) {
  require(balls >= 1, "gripper needs at least one ball");
  std::ostringstream os;
  os << "% two rooms, two grippers, " << balls << " balls\n";
  os << "variables\n";
  os << "  nat(2) robby\n";
  for (unsigned i = 1; i <= balls; ++i) os << "  nat(4) ball" << i << "\n";
  auto gripper_free = [&](unsigned code) {
    std::ostringstream p;
    for (unsigned i = 1; i <= balls; ++i)
      p << " /\\ ball" << i << " != " << code;
    return p.str();
  };
  os << "system\n";
  os << "  agt: Robot\n";
  os << "    move\n";
  os << "      con: robby\n";
  os << "      pre: true\n";
  os << "      eff: robby = 0 -> robby' = 1, robby' = 0\n";
  for (unsigned i = 1; i <= balls; ++i) {
    os << "    pick-left-ball" << i << "\n";
    os << "      con: ball" << i << "\n";
    os << "      pre: ball" << i << " = robby" << gripper_free(2) << "\n";
    os << "      eff: ball" << i << "' = 2\n";
    os << "    drop-left-ball" << i << "\n";
    os << "      con: ball" << i << "\n";
    os << "      pre: ball" << i << " = 2\n";
    os << "      eff: ball" << i << "' = robby\n";
    os << "    pick-right-ball" << i << "\n";
    os << "      con: ball" << i << "\n";
    os << "      pre: ball" << i << " = robby" << gripper_free(3) << "\n";
    os << "      eff: ball" << i << "' = 3\n";
    os << "    drop-right-ball" << i << "\n";
    os << "      con: ball" << i << "\n";
    os << "      pre: ball" << i << " = 3\n";
    os << "      eff: ball" << i << "' = robby\n";
  }
  os << "initially\n  robby = 0";
  for (unsigned i = 1; i <= balls; ++i) os << " /\\ ball" << i << " = 0";
  os << "\ngoal\n  ball1 = 1";
  for (unsigned i = 2; i <= balls; ++i) os << " /\\ ball" << i << " = 1";
  os << "\n";
  return os.str();
}

std::string movie(unsigned objects) {
  require(objects >= 2, "movie needs at least 2 objects per snack");
  const char* snacks[] = {"chips", "dip", "pop", "cheese", "crackers"};
  std::ostringstream os;
  os << "% snack shopping with " << objects << " objects per kind\n";
  os << "variables\n";
  for (const char* s : snacks) os << "  nat(" << objects << ") " << s << "\n";
  os << "  bool rewound\n";
  os << "  bool counter_zero\n";
  os << "system\n";
  os << "  agt: Person\n";
  os << "    rewind\n";
  os << "      con: rewound\n";
  os << "      pre: true\n";
  os << "      eff: rewound'\n";
  os << "    reset-counter\n";
  os << "      con: counter_zero\n";
  os << "      pre: true\n";
  // resetting only takes effect once the movie is rewound
  os << "      eff: rewound -> counter_zero', counter_zero' <=> counter_zero\n";
  for (const char* s : snacks) {
    os << "    get-" << s << "\n";
    os << "      con: " << s << "\n";
    os << "      pre: true\n";
    os << "      eff: " << s << "' = 1\n";
  }
  os << "initially\n  ~rewound /\\ ~counter_zero";
  for (const char* s : snacks) os << " /\\ " << s << " = 0";
  os << "\ngoal\n  rewound /\\ counter_zero";
  for (const char* s : snacks) os << " /\\ " << s << " > 0";
  os << "\n";
  return os.str();
}

std::string power_plant(unsigned heat_exchangers, unsigned turbines) {
  require(heat_exchangers >= 1 && turbines >= 1,
          "power plant needs at least one heat exchanger and one turbine");
  unsigned h = heat_exchangers, t = turbines;
  std::ostringstream os;
  os << "% power plant with " << h << " heat exchangers and " << t
     << " turbines\n";
  os << "variables\n  bool";
  for (unsigned i = 1; i <= h; ++i) os << (i > 1 ? "," : "") << " okh" << i;
  os << "\n  bool";
  for (unsigned i = 1; i <= t; ++i) os << (i > 1 ? "," : "") << " okt" << i;
  os << "\n  bool";
  for (unsigned i = 1; i <= h; ++i) os << (i > 1 ? "," : "") << " b" << i;
  os << "\n  bool";
  for (unsigned i = 1; i <= t; ++i) os << (i > 1 ? "," : "") << " s" << i;
  os << "\n  bool";
  for (unsigned i = 1; i <= t; ++i) os << (i > 1 ? "," : "") << " v" << i;
  os << "\n  nat(4) p, f\n";
  os << "system\n";
  for (unsigned i = 1; i <= h; ++i) {
    os << "  agt: HUnit" << i << "\n";
    os << "    regulate-h" << i << "\n";
    os << "      con: b" << i << "\n";
    os << "      pre: true\n";
    os << "      eff: b" << i << "' <=> ~okh" << i << "\n";
  }
  for (unsigned i = 1; i <= t; ++i) {
    os << "  agt: TUnit" << i << "\n";
    os << "    regulate-t" << i << "\n";
    os << "      con: s" << i << "\n";
    os << "      pre: true\n";
    os << "      eff: s" << i << "' <=> ~okt" << i << "\n";
    os << "  agt: VUnit" << i << "\n";
    os << "    regulate-v" << i << "\n";
    os << "      con: v" << i << "\n";
    os << "      pre: true\n";
    os << "      eff: v" << i << "' <=> okt" << i << "\n";
  }
  os << "  agt: Reactor\n";
  for (unsigned k = 0; k < 4; ++k) {
    os << "    set-p" << k << "\n";
    os << "      con: p\n";
    os << "      pre: true\n";
    os << "      eff: p' = " << k << "\n";
  }
  os << "environment\n";
  os << "  agt: Failer\n";
  os << "    fail-units\n";
  os << "      con:";
  for (unsigned i = 1; i <= h; ++i) os << (i > 1 ? "," : "") << " okh" << i;
  for (unsigned i = 1; i <= t; ++i) os << ", okt" << i;
  os << "\n      pre: true\n";
  os << "      eff: ";
  for (unsigned i = 1; i <= h; ++i)
    os << (i > 1 ? " /\\ " : "") << "(~okh" << i << " => ~okh" << i << "')";
  for (unsigned i = 1; i <= t; ++i)
    os << " /\\ (~okt" << i << " => ~okt" << i << "')";
  os << "\n";

  std::ostringstream safety;
  safety << "(";
  for (unsigned i = 1; i <= h; ++i) safety << (i > 1 ? " \\/ " : "") << "okh" << i;
  safety << ") /\\ (";
  for (unsigned i = 1; i <= t; ++i) safety << (i > 1 ? " \\/ " : "") << "okt" << i;
  safety << ")";
  for (unsigned i = 1; i <= h; ++i)
    safety << " /\\ (~okh" << i << " => b" << i << ")";
  for (unsigned i = 1; i <= t; ++i)
    safety << " /\\ (~okt" << i << " => s" << i << ")";
  std::ostringstream activity;
  activity << "p = f";
  for (unsigned i = 1; i <= t; ++i)
    activity << " /\\ (okt" << i << " => v" << i << ")";
  std::ostringstream failed;
  failed << "(";
  for (unsigned i = 1; i <= h; ++i) failed << (i > 1 ? " /\\ " : "") << "~okh" << i;
  failed << ") \\/ (";
  for (unsigned i = 1; i <= t; ++i) failed << (i > 1 ? " /\\ " : "") << "~okt" << i;
  failed << ")";

  std::string good = safety.str() + " /\\ " + activity.str();
  os << "initially\n  ~(" << good << ") /\\ ~(" << failed.str() << ")\n";
  os << "goal\n  " << good << "\n";
  return os.str();
}

std::string soccer(unsigned width, unsigned height, unsigned players) {
  require(width >= 2 && height >= 2, "soccer needs a grid of at least 2x2");
  require(players >= 1, "soccer needs at least one player per team");
  unsigned gx = width - 1, gy = height / 2;
  std::ostringstream os;
  os << "% soccer on a " << width << "x" << height << " grid, " << players
     << " players per team\n";
  os << "variables\n";
  for (unsigned i = 1; i <= players; ++i)
    os << "  nat(" << width << ") ax" << i << "\n  nat(" << height << ") ay" << i
       << "\n";
  for (unsigned i = 1; i <= players; ++i)
    os << "  nat(" << width << ") dx" << i << "\n  nat(" << height << ") dy" << i
       << "\n";
  if (players >= 2) os << "  nat(" << players << ") carrier\n";
  auto moves = [&](const char* who, unsigned i, char xv, char yv) {
    os << "    " << who << i << "-north\n";
    os << "      con: " << yv << "y" << i << "\n";
    os << "      pre: " << yv << "y" << i << " < " << height - 1 << "\n";
    os << "      eff: " << yv << "y" << i << "' = " << yv << "y" << i << " + 1\n";
    os << "    " << who << i << "-south\n";
    os << "      con: " << yv << "y" << i << "\n";
    os << "      pre: " << yv << "y" << i << " > 0\n";
    os << "      eff: " << yv << "y" << i << "' = " << yv << "y" << i << " - 1\n";
    os << "    " << who << i << "-east\n";
    os << "      con: " << xv << "x" << i << "\n";
    os << "      pre: " << xv << "x" << i << " < " << width - 1 << "\n";
    os << "      eff: " << xv << "x" << i << "' = " << xv << "x" << i << " + 1\n";
    os << "    " << who << i << "-west\n";
    os << "      con: " << xv << "x" << i << "\n";
    os << "      pre: " << xv << "x" << i << " > 0\n";
    os << "      eff: " << xv << "x" << i << "' = " << xv << "x" << i << " - 1\n";
  };
  os << "system\n";
  for (unsigned i = 1; i <= players; ++i) {
    os << "  agt: Attacker" << i << "\n";
    moves("attacker", i, 'a', 'a');
    if (players >= 2) {
      for (unsigned j = 1; j <= players; ++j) {
        if (j == i) continue;
        os << "    attacker" << i << "-pass-to-a" << j << "\n";
        os << "      con: carrier\n";
        os << "      pre: carrier = " << i - 1 << "\n";
        os << "      eff: carrier' = " << j - 1 << "\n";
      }
    }
  }
  os << "environment\n";
  for (unsigned i = 1; i <= players; ++i) {
    os << "  agt: Defender" << i << "\n";
    moves("defender", i, 'd', 'd');
  }
  os << "initially\n  ";
  for (unsigned i = 1; i <= players; ++i) {
    unsigned row = (i - 1) % height;
    os << (i > 1 ? " /\\ " : "") << "ax" << i << " = 0 /\\ ay" << i << " = " << row;
  }
  for (unsigned i = 1; i <= players; ++i) {
    unsigned row = (i - 1) % height;
    os << " /\\ dx" << i << " = " << width - 2 << " /\\ dy" << i << " = " << row;
  }
  if (players >= 2) os << " /\\ carrier = 0";
  os << "\ngoal\n  (";
  for (unsigned i = 1; i <= players; ++i) {
    os << (i > 1 ? " \\/ " : "") << "(";
    if (players >= 2) os << "carrier = " << i - 1 << " /\\ ";
    os << "ax" << i << " = " << gx << " /\\ ay" << i << " = " << gy << ")";
  }
  os << ")";
  for (unsigned i = 1; i <= players; ++i)
    os << " /\\ ~(dx" << i << " = " << gx << " /\\ dy" << i << " = " << gy << ")";
  os << "\n";
  return os.str();
}

std::string obstacle(unsigned obstacles, unsigned grid_bits) {
  require(obstacles >= 1, "obstacle domain needs at least one obstacle");
  require(grid_bits >= 2 && grid_bits <= 12, "grid bits must be in 2..12");
  unsigned wbits = (grid_bits + 1) / 2, hbits = grid_bits / 2;
  unsigned w = 1u << wbits, h = 1u << hbits;
  std::ostringstream os;
  os << "% robot to the upper right corner of a " << w << "x" << h
     << " grid with " << obstacles << " static obstacles\n";
  os << "variables\n";
  os << "  nat(" << w << ") x\n  nat(" << h << ") y\n";
  for (unsigned i = 1; i <= obstacles; ++i)
    os << "  nat(" << w << ") ox" << i << "\n  nat(" << h << ") oy" << i << "\n";
  auto blocked = [&](const std::string& tx, const std::string& ty) {
    std::ostringstream p;
    for (unsigned i = 1; i <= obstacles; ++i)
      p << " /\\ ~(ox" << i << " = " << tx << " /\\ oy" << i << " = " << ty << ")";
    return p.str();
  };
  os << "system\n";
  os << "  agt: Robot\n";
  os << "    move-north\n";
  os << "      con: y\n";
  os << "      pre: y < " << h - 1 << blocked("x", "y + 1") << "\n";
  os << "      eff: y' = y + 1\n";
  os << "    move-south\n";
  os << "      con: y\n";
  os << "      pre: y > 0" << blocked("x", "y - 1") << "\n";
  os << "      eff: y' = y - 1\n";
  os << "    move-east\n";
  os << "      con: x\n";
  os << "      pre: x < " << w - 1 << blocked("x + 1", "y") << "\n";
  os << "      eff: x' = x + 1\n";
  os << "    move-west\n";
  os << "      con: x\n";
  os << "      pre: x > 0" << blocked("x - 1", "y") << "\n";
  os << "      eff: x' = x - 1\n";
  os << "initially\n  ~(";
  for (unsigned i = 1; i <= obstacles; ++i)
    os << (i > 1 ? " \\/ " : "") << "(ox" << i << " = x /\\ oy" << i << " = y)";
  os << ")\n";
  os << "goal\n  x = " << w - 1 << " /\\ y = " << h - 1 << "\n";
  return os.str();
}

}  // namespace uplan::gen
