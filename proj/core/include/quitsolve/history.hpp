#pragma once

#include <vector>

namespace quitsolve {

// Finite history (y^1, a^1, ..., y^t[, a^t]) of a game with public signals.
// Action profiles hold per-player action indices (0 = quit). A history has
// as many signals as action profiles, or one more when the current stage's
// signal has been drawn but not yet acted on.
struct History {
  std::vector<double> signals;
  std::vector<std::vector<int>> actions;

  std::size_t stages() const { return signals.size(); }
};

}  // namespace quitsolve
