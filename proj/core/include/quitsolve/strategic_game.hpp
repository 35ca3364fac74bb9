#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace quitsolve {

// Per-player probability vectors must sum to one within this tolerance.
inline constexpr double kProbabilityTolerance = 1e-12;

using MixedAction = std::vector<double>;

// One probability vector per player. Built through make() for validated
// input; unchecked() is for solver internals that work with positive but
// not yet normalized weights.
class MixedProfile {
 public:
  MixedProfile() = default;

  // Rejects negative entries and sums off by more than
  // kProbabilityTolerance; sums within tolerance are renormalized.
  static MixedProfile make(std::vector<MixedAction> actions);
  static MixedProfile unchecked(std::vector<MixedAction> actions);
  static MixedProfile uniform(std::span<const int> action_counts);
  static MixedProfile pure(std::span<const int> action_counts, std::span<const int> profile);

  std::size_t players() const { return actions_.size(); }
  const MixedAction& operator[](std::size_t i) const { return actions_[i]; }
  const std::vector<MixedAction>& actions() const { return actions_; }

  // Copy with player i's mixed action replaced (not revalidated).
  MixedProfile with_action(std::size_t player, MixedAction action) const;

  // Max-norm distance over all coordinates; shapes must agree.
  double distance(const MixedProfile& other) const;

  // Flattened coordinates, players in order.
  std::vector<double> flatten() const;

 private:
  explicit MixedProfile(std::vector<MixedAction> actions) : actions_(std::move(actions)) {}
  std::vector<MixedAction> actions_;
};

// Finite strategic-form game with a dense payoff tensor. Profiles are
// indexed in mixed radix with player 0 as the most significant digit, so
// the natural index order is lexicographic in (a_0, a_1, ...).
class StrategicGame {
 public:
  StrategicGame() = default;
  // payoffs laid out as [profile][player].
  StrategicGame(std::vector<int> action_counts, std::vector<double> payoffs);
  static StrategicGame zeros(std::vector<int> action_counts);

  std::size_t players() const { return action_counts_.size(); }
  int actions(std::size_t player) const { return action_counts_[player]; }
  const std::vector<int>& action_counts() const { return action_counts_; }
  std::size_t profile_count() const { return profile_count_; }

  std::size_t index(std::span<const int> profile) const;
  std::vector<int> decode(std::size_t index) const;
  int action_of(std::size_t index, std::size_t player) const {
    return static_cast<int>((index / strides_[player]) % static_cast<std::size_t>(action_counts_[player]));
  }

  double payoff(std::size_t profile, std::size_t player) const {
    return payoffs_[profile * players() + player];
  }
  void set_payoff(std::size_t profile, std::size_t player, double value) {
    payoffs_[profile * players() + player] = value;
  }
  std::span<const double> payoffs() const { return payoffs_; }

  // u_i(a_i, x_{-i}) for every action a_i of player i.
  std::vector<double> action_values(std::size_t player, const MixedProfile& x) const;

  // u_i(x) for every player.
  std::vector<double> expected_payoffs(const MixedProfile& x) const;

  // u_i(a_i, b_j, x_{-ij}) as a row-major |A_i| x |A_j| matrix, i != j.
  std::vector<double> pair_values(std::size_t i, std::size_t j, const MixedProfile& x) const;

  // Same game with c added to every payoff of the given player.
  StrategicGame shifted(std::size_t player, double c) const;

 private:
  std::vector<int> action_counts_;
  std::vector<std::size_t> strides_;
  std::size_t profile_count_ = 0;
  std::vector<double> payoffs_;
};

// Max-subtracted softmax of n * values.
std::vector<double> softmax(double n, std::span<const double> values);

// max_{a_i} u_i(a_i, x_{-i}) - u_i(x) per player.
std::vector<double> best_response_regret(const StrategicGame& game, const MixedProfile& x);

}  // namespace quitsolve
