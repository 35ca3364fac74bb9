#include "quitsolve/strategic_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "quitsolve/errors.hpp"

namespace quitsolve {

MixedProfile MixedProfile::make(std::vector<MixedAction> actions) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    auto& a = actions[i];
    if (a.empty()) throw InvalidInput("player " + std::to_string(i) + " has an empty mixed action");
    double sum = 0.0;
    for (double p : a) {
      if (!std::isfinite(p) || p < 0.0)
        throw InvalidInput("player " + std::to_string(i) + " has a negative or non-finite probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance)
      throw InvalidInput("player " + std::to_string(i) + " probabilities sum to " + std::to_string(sum));
    for (double& p : a) p /= sum;
  }
  return MixedProfile(std::move(actions));
}

MixedProfile MixedProfile::unchecked(std::vector<MixedAction> actions) {
  return MixedProfile(std::move(actions));
}

MixedProfile MixedProfile::uniform(std::span<const int> action_counts) {
  std::vector<MixedAction> actions;
  actions.reserve(action_counts.size());
  for (int k : action_counts) actions.emplace_back(static_cast<std::size_t>(k), 1.0 / k);
  return MixedProfile(std::move(actions));
}

MixedProfile MixedProfile::pure(std::span<const int> action_counts, std::span<const int> profile) {
  std::vector<MixedAction> actions;
  for (std::size_t i = 0; i < action_counts.size(); ++i) {
    MixedAction a(static_cast<std::size_t>(action_counts[i]), 0.0);
    a[static_cast<std::size_t>(profile[i])] = 1.0;
    actions.push_back(std::move(a));
  }
  return MixedProfile(std::move(actions));
}

MixedProfile MixedProfile::with_action(std::size_t player, MixedAction action) const {
  auto copy = actions_;
  copy[player] = std::move(action);
  return MixedProfile(std::move(copy));
}

double MixedProfile::distance(const MixedProfile& other) const {
  double d = 0.0;
  for (std::size_t i = 0; i < actions_.size(); ++i)
    for (std::size_t k = 0; k < actions_[i].size(); ++k)
      d = std::max(d, std::abs(actions_[i][k] - other.actions_[i][k]));
  return d;
}

std::vector<double> MixedProfile::flatten() const {
  std::vector<double> out;
  for (const auto& a : actions_) out.insert(out.end(), a.begin(), a.end());
  return out;
}

StrategicGame::StrategicGame(std::vector<int> action_counts, std::vector<double> payoffs)
    : action_counts_(std::move(action_counts)), payoffs_(std::move(payoffs)) {
  if (action_counts_.empty()) throw InvalidInput("game needs at least one player");
  strides_.assign(action_counts_.size(), 1);
  profile_count_ = 1;
  for (std::size_t i = action_counts_.size(); i-- > 0;) {
    if (action_counts_[i] < 1) throw InvalidInput("every player needs at least one action");
    strides_[i] = profile_count_;
    profile_count_ *= static_cast<std::size_t>(action_counts_[i]);
  }
  if (payoffs_.size() != profile_count_ * action_counts_.size())
    throw InvalidInput("payoff tensor size does not match the action counts");
  for (double v : payoffs_)
    if (!std::isfinite(v)) throw InvalidInput("payoff tensor has a non-finite entry");
}

StrategicGame StrategicGame::zeros(std::vector<int> action_counts) {
  std::size_t count = 1;
  for (int k : action_counts) count *= static_cast<std::size_t>(std::max(k, 1));
  const std::size_t n = action_counts.size();
  return StrategicGame(std::move(action_counts), std::vector<double>(count * n, 0.0));
}

std::size_t StrategicGame::index(std::span<const int> profile) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) idx += strides_[i] * static_cast<std::size_t>(profile[i]);
  return idx;
}

std::vector<int> StrategicGame::decode(std::size_t index) const {
  std::vector<int> out(players());
  for (std::size_t i = 0; i < players(); ++i) out[i] = action_of(index, i);
  return out;
}

namespace {

// Visits every profile in index order, keeping the digit vector current.
template <typename Fn>
void for_each_profile(const std::vector<int>& counts, Fn&& fn) {
  std::vector<int> digits(counts.size(), 0);
  std::size_t index = 0;
  while (true) {
    fn(index, digits);
    ++index;
    std::size_t i = counts.size();
    while (i-- > 0) {
      if (++digits[i] < counts[i]) break;
      digits[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace

std::vector<double> StrategicGame::action_values(std::size_t player, const MixedProfile& x) const {
  std::vector<double> values(static_cast<std::size_t>(action_counts_[player]), 0.0);
  const std::size_t n = players();
  for_each_profile(action_counts_, [&](std::size_t idx, const std::vector<int>& a) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == player) continue;
      w *= x[j][static_cast<std::size_t>(a[j])];
      if (w == 0.0) return;
    }
    values[static_cast<std::size_t>(a[player])] += w * payoffs_[idx * n + player];
  });
  return values;
}

std::vector<double> StrategicGame::expected_payoffs(const MixedProfile& x) const {
  const std::size_t n = players();
  std::vector<double> out(n, 0.0);
  for_each_profile(action_counts_, [&](std::size_t idx, const std::vector<int>& a) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) w *= x[j][static_cast<std::size_t>(a[j])];
    if (w == 0.0) return;
    for (std::size_t i = 0; i < n; ++i) out[i] += w * payoffs_[idx * n + i];
  });
  return out;
}

std::vector<double> StrategicGame::pair_values(std::size_t i, std::size_t j, const MixedProfile& x) const {
  const std::size_t n = players();
  const auto cols = static_cast<std::size_t>(action_counts_[j]);
  std::vector<double> out(static_cast<std::size_t>(action_counts_[i]) * cols, 0.0);
  for_each_profile(action_counts_, [&](std::size_t idx, const std::vector<int>& a) {
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i || k == j) continue;
      w *= x[k][static_cast<std::size_t>(a[k])];
    }
    out[static_cast<std::size_t>(a[i]) * cols + static_cast<std::size_t>(a[j])] += w * payoffs_[idx * n + i];
  });
  return out;
}

StrategicGame StrategicGame::shifted(std::size_t player, double c) const {
  StrategicGame copy = *this;
  for (std::size_t p = 0; p < profile_count_; ++p) copy.payoffs_[p * players() + player] += c;
  return copy;
}

std::vector<double> softmax(double n, std::span<const double> values) {
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    out[k] = std::exp(n * (values[k] - top));
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> best_response_regret(const StrategicGame& game, const MixedProfile& x) {
  std::vector<double> out(game.players());
  for (std::size_t i = 0; i < game.players(); ++i) {
    const auto values = game.action_values(i, x);
    double mean = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) mean += x[i][k] * values[k];
    out[i] = std::max(0.0, *std::max_element(values.begin(), values.end()) - mean);
  }
  return out;
}

}  // namespace quitsolve
