#pragma once

#include <string>
#include <vector>

#include "quitsolve/strategic_game.hpp"

namespace quitsolve {

struct NashEnumeration {
  std::vector<MixedProfile> equilibria;
  // One entry per skipped support (singular indifference system).
  std::vector<std::string> degenerate_supports;
};

// Support enumeration for games with at most 3 players and 3 actions each.
// Two-player supports are solved as linear indifference systems; for three
// players the multilinear system of each support is solved by Newton from a
// fixed set of starts. Every returned profile has regret <= 1e-9.
NashEnumeration brute_force_nash(const StrategicGame& u);

}  // namespace quitsolve
