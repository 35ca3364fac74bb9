#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quitsolve/strategic_game.hpp"

namespace quitsolve {

using PayoffVector = std::vector<double>;

// Slack on the [-1,1] payoff bound; mixtures of in-range payoffs can land a
// rounding error outside it.
inline constexpr double kPayoffTolerance = 1e-12;

// Bit i set means player i plays Q_i.
using QuitMask = std::uint32_t;

// Per player: a mix over continue actions and a quit probability.
struct SplitProfile {
  std::vector<MixedAction> alpha;
  std::vector<double> z;

  // Validates the simplex and [0,1] constraints (same tolerance as
  // MixedProfile::make).
  static SplitProfile make(std::vector<MixedAction> alpha, std::vector<double> z);
};

// A general quitting game. Every player i has continue actions
// C_i^1..C_i^{k_i} plus the implicit quit action Q_i. In the underlying
// strategic form action 0 is Q_i and actions 1..k_i are the continue
// actions in declared order.
class GeneralQuittingGame {
 public:
  static constexpr int kQuit = 0;

  GeneralQuittingGame() = default;
  // Throws InvalidInput on payoffs outside [-1,1], a continue action named
  // "Q", or shape mismatches.
  GeneralQuittingGame(std::vector<std::string> players,
                      std::vector<std::vector<std::string>> continue_actions,
                      StrategicGame payoffs);

  // Unnamed game (players p1.., continue actions c1..) from a strategic form
  // whose action 0 is the quit action.
  static GeneralQuittingGame from_form(StrategicGame payoffs);

  std::size_t players() const { return players_.size(); }
  const std::vector<std::string>& player_names() const { return players_; }
  const std::vector<std::string>& continue_action_names(std::size_t player) const {
    return continue_actions_[player];
  }
  int continue_count(std::size_t player) const { return form_.actions(player) - 1; }
  std::vector<int> continue_counts() const;

  const StrategicGame& form() const { return form_; }

  // True iff some player quits in the profile.
  bool is_absorbing(std::size_t profile) const;
  bool is_recursive() const;
  bool is_positive() const;

 private:
  std::vector<std::string> players_;
  std::vector<std::vector<std::string>> continue_actions_;
  StrategicGame form_;
};

// Rejects shape mismatches between x and g.
void require_profile_shape(const GeneralQuittingGame& g, const MixedProfile& x);

// x_i(Q_i) = z_i, x_i(C_i^k) = (1 - z_i) alpha_i^k.
MixedProfile compose_profile(const SplitProfile& s);

// Inverse of compose_profile. Players with x_i(Q_i) = 1 get a uniform alpha.
SplitProfile split_profile(const MixedProfile& x);

// 1 - prod_i (1 - quit_i), evaluated as -expm1(sum log1p(-quit_i)) so that
// tiny quit probabilities are not lost to cancellation.
double absorption_probability(std::span<const double> quit_probs);
double absorption_probability(const MixedProfile& x);

// p(x) * ubar(x): sum over absorbing profiles of prob(a) u(a).
PayoffVector absorbing_mass(const GeneralQuittingGame& g, const MixedProfile& x);

// ubar(x). Throws NonAbsorbingProfile when p(x) = 0.
PayoffVector expected_absorbing_payoff(const GeneralQuittingGame& g, const MixedProfile& x);

// Stationary lambda-discounted value when the nonabsorbing stage payoff is q:
// v = [p ubar + (1-p) lambda q] / [lambda + p (1 - lambda)].
PayoffVector discounted_stationary_value(const GeneralQuittingGame& g, const MixedProfile& x,
                                         double lambda, std::span<const double> q);

// ubar(x) if p(x) > 0, otherwise q.
PayoffVector undiscounted_stationary_value(const GeneralQuittingGame& g, const MixedProfile& x,
                                           std::span<const double> q);

// u(alpha_J, Q_{I\J}) where the quitters are the players in quit_mask and
// every other player mixes continue actions according to alpha.
PayoffVector continue_mix_payoff(const GeneralQuittingGame& g, QuitMask quit_mask,
                                 std::span<const MixedAction> alpha);

}  // namespace quitsolve
