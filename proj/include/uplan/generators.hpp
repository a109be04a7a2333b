#pragma once

// Emits NADL text for the benchmark domains. Every generator validates its
// parameters and produces a description that passes parse + validate.

#include <string>

#include "uplan/nadl.hpp"

namespace uplan::gen {

std::string robot_baby();

// Walk from one end of a beam to the other; on-beam steps may drop the
// walker to the ground at the next position, from where it has to walk back
// and climb up again. 2n states. The deterministic variant never falls.
std::string beam_walk(unsigned positions, bool deterministic = false);

// Chain of n+1 states; `solid` advances one step, `dashed` jumps from the
// start to the goal or stays put.
std::string domain1(unsigned n);

// Same chain with noisy `solid` (may stay put) and a `dashed` that can land
// in an unrecoverable dead-end state.
std::string domain2(unsigned n);

// Two rooms, one robot with two grippers, `balls` balls to carry from room
// A to room B. Ball position codes: 0 room A, 1 room B, 2 left gripper,
// 3 right gripper.
std::string gripper(unsigned balls);

// Five snack counters plus rewind/counter flags; resetting the counter only
// takes effect once the movie is rewound. `objects` sizes each counter.
std::string movie(unsigned objects);

// Heat exchangers, turbines and valves with one regulating agent per unit,
// a reactor agent setting the production level, and an environment agent
// that can fail any subset of units permanently.
std::string power_plant(unsigned heat_exchangers, unsigned turbines);

// Attackers (system) and defenders (environment) on a width x height grid;
// attackers move or pass the ball, defenders move. Scoring: the ball
// carrier stands on the goal cell (middle of the right edge) and no
// defender does.
std::string soccer(unsigned width, unsigned height, unsigned players);

// Robot on a 2^grid_bits cell grid moving to the upper right corner around
// statically placed obstacles with unconstrained initial positions.
std::string obstacle(unsigned obstacles, unsigned grid_bits = 5);

// parse + validate; throws with the formatted violations on failure.
nadl::domain_desc load(const std::string& text);

}  // namespace uplan::gen
