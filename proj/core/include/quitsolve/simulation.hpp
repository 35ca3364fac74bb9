#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/history.hpp"
#include "quitsolve/quitting_game.hpp"

namespace quitsolve {

// A mixed action written as a quit probability plus a mix over continue
// actions.
struct SplitAction {
  MixedAction alpha;
  double quit = 0.0;
};

SplitAction split_action(const MixedAction& x);

// Behaviour strategy of one player in the game with public signals. The
// history passed to act() holds the signals up to and including the current
// stage and the action profiles of earlier stages.
class PlayerStrategy {
 public:
  virtual ~PlayerStrategy() = default;
  virtual SplitAction act(const History& h) const = 0;
};

class StationaryStrategy final : public PlayerStrategy {
 public:
  // x over {Q, C^1, ..., C^k}.
  explicit StationaryStrategy(const MixedAction& x) : action_(split_action(x)) {}
  SplitAction act(const History&) const override { return action_; }

 private:
  SplitAction action_;
};

// Ordered rules: the first rule whose interval [lo, hi) contains the current
// signal decides the mixed action (hi = 1 is inclusive).
class SignalThresholdStrategy final : public PlayerStrategy {
 public:
  struct Rule {
    double lo = 0.0;
    double hi = 1.0;
    MixedAction action;
  };
  explicit SignalThresholdStrategy(std::vector<Rule> rules);
  SplitAction act(const History& h) const override;
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
  std::vector<SplitAction> split_;
};

// A strategy of the auxiliary game played in the base game: the quit
// probability comes from the auxiliary strategy at the projected history and
// continuing is split according to alpha_i.
class LiftedStrategy final : public PlayerStrategy {
 public:
  LiftedStrategy(std::shared_ptr<const GeneralQuittingGame> base, std::shared_ptr<const PlayerStrategy> aux_strategy,
                 MixedAction alpha);
  SplitAction act(const History& h) const override;

 private:
  std::shared_ptr<const GeneralQuittingGame> base_;
  std::shared_ptr<const PlayerStrategy> aux_;
  MixedAction alpha_;
};

using StrategyProfile = std::vector<std::shared_ptr<const PlayerStrategy>>;

StrategyProfile stationary_profile(const MixedProfile& x);

// Lifts an auxiliary-game profile into the base game.
StrategyProfile lift_profile(const AuxiliaryQuittingGame& aux, const StrategyProfile& aux_profile);

enum class PayoffEstimator {
  Realized,              // payoff of the realized absorbing profile
  ConditionalOnQuitters  // expectation over the continuing players' mixes
};

struct SimulationOptions {
  std::size_t horizon = 1000;
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::optional<double> lambda;  // discounted payoff when set
  PayoffEstimator estimator = PayoffEstimator::Realized;
  unsigned threads = 0;  // 0: QUITSOLVE_THREADS or 1
  bool keep_runs = false;
};

struct SimulationEstimate {
  PayoffVector mean;
  PayoffVector standard_error;
  std::size_t runs = 0;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::size_t absorbed_runs = 0;
  std::vector<PayoffVector> per_run;  // filled when keep_runs is set
};

// Simulates the game with i.i.d. uniform public signals. A run absorbed by
// the horizon pays the absorbing payoff (undiscounted) or the discounted sum
// of q-stages followed by the absorbing payoff; an unabsorbed run pays q.
// Run r draws from the substream (seed, r), so results do not depend on the
// thread count.
SimulationEstimate monte_carlo_payoff(const GeneralQuittingGame& g, const StrategyProfile& profile,
                                      const PayoffVector& q, const SimulationOptions& options);

// Thread count from QUITSOLVE_THREADS (at least 1).
unsigned configured_threads();

}  // namespace quitsolve
