#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "quitsolve/history.hpp"
#include "quitsolve/quitting_game.hpp"

namespace quitsolve {

// The binary quitting game obtained from a general quitting game by freezing
// each player's continue behaviour to alpha_i and setting the nonabsorbing
// payoff to q. The payoff table is indexed by quit mask (bit i = player i
// quits); mask 0 is the all-continue profile and carries q.
class AuxiliaryQuittingGame {
 public:
  const GeneralQuittingGame& base() const { return *base_; }
  const std::vector<MixedAction>& alpha() const { return alpha_; }
  const PayoffVector& q() const { return q_; }
  std::size_t players() const { return alpha_.size(); }

  const PayoffVector& payoff(QuitMask mask) const { return table_[mask]; }

  // The same game as a GeneralQuittingGame with one continue action per
  // player. Its nonabsorbing entry is zero: value functions take q as an
  // explicit argument.
  const GeneralQuittingGame& as_quitting_game() const { return *quitting_; }

  // Strategic form with action 0 = Q, action 1 = C; the all-continue entry
  // is q.
  StrategicGame binary_form() const;

 private:
  friend AuxiliaryQuittingGame build_auxiliary(const GeneralQuittingGame&, std::vector<MixedAction>,
                                               PayoffVector);
  std::shared_ptr<const GeneralQuittingGame> base_;
  std::vector<MixedAction> alpha_;
  PayoffVector q_;
  std::vector<PayoffVector> table_;
  std::shared_ptr<const GeneralQuittingGame> quitting_;
};

AuxiliaryQuittingGame build_auxiliary(const GeneralQuittingGame& g, std::vector<MixedAction> alpha,
                                      PayoffVector q);

// Composes (alpha, xhat) into a mixed profile of the base game.
MixedProfile lift_stationary(const AuxiliaryQuittingGame& aux, std::span<const double> xhat);

// Replaces every continue action by the auxiliary game's single continue
// action (index 1); quits and signals are kept. Throws InvalidInput on a
// malformed history.
History project_history(const GeneralQuittingGame& g, const History& h);

// Stationary values of quit probabilities xhat computed from the auxiliary
// payoff table alone.
PayoffVector aux_absorbing_mass(const AuxiliaryQuittingGame& aux, std::span<const double> xhat);
PayoffVector aux_discounted_value(const AuxiliaryQuittingGame& aux, std::span<const double> xhat,
                                  double lambda);
PayoffVector aux_undiscounted_value(const AuxiliaryQuittingGame& aux, std::span<const double> xhat);

struct PayoffEquivalenceReport {
  PayoffVector base_value;
  PayoffVector aux_value;
  double gap = 0.0;
  std::optional<double> lambda;
};

// Compares the value of the lifted profile in the base game (nonabsorbing
// payoff q) with the value of xhat in the auxiliary game. Undiscounted when
// lambda is empty.
PayoffEquivalenceReport payoff_equivalence_check(const GeneralQuittingGame& g,
                                                 const std::vector<MixedAction>& alpha,
                                                 const PayoffVector& q, std::span<const double> xhat,
                                                 std::optional<double> lambda);

}  // namespace quitsolve
