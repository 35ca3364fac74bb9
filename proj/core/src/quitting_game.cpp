#include "quitsolve/quitting_game.hpp"

#include <cmath>

#include "quitsolve/errors.hpp"

namespace quitsolve {

SplitProfile SplitProfile::make(std::vector<MixedAction> alpha, std::vector<double> z) {
  if (alpha.size() != z.size()) throw InvalidInput("alpha and z must have one entry per player");
  for (double zi : z)
    if (!std::isfinite(zi) || zi < 0.0 || zi > 1.0) throw InvalidInput("quit probability outside [0,1]");
  auto checked = MixedProfile::make(std::move(alpha));
  return SplitProfile{checked.actions(), std::move(z)};
}

GeneralQuittingGame::GeneralQuittingGame(std::vector<std::string> players,
                                         std::vector<std::vector<std::string>> continue_actions,
                                         StrategicGame payoffs)
    : players_(std::move(players)),
      continue_actions_(std::move(continue_actions)),
      form_(std::move(payoffs)) {
  if (players_.size() != form_.players() || continue_actions_.size() != form_.players())
    throw InvalidInput("player list does not match the payoff tensor");
  for (std::size_t i = 0; i < players_.size(); ++i) {
    if (continue_actions_[i].empty())
      throw InvalidInput("player " + players_[i] + " needs at least one continue action");
    if (static_cast<int>(continue_actions_[i].size()) + 1 != form_.actions(i))
      throw InvalidInput("continue actions of " + players_[i] + " do not match the payoff tensor");
    for (const auto& name : continue_actions_[i])
      if (name == "Q") throw InvalidInput("continue action name 'Q' is reserved for quitting");
  }
  for (double v : form_.payoffs())
    if (v < -1.0 - kPayoffTolerance || v > 1.0 + kPayoffTolerance)
      throw InvalidInput("payoff entry outside [-1,1]");
}

GeneralQuittingGame GeneralQuittingGame::from_form(StrategicGame payoffs) {
  std::vector<std::string> players;
  std::vector<std::vector<std::string>> continues;
  for (std::size_t i = 0; i < payoffs.players(); ++i) {
    players.push_back("p" + std::to_string(i + 1));
    std::vector<std::string> names;
    for (int k = 1; k < payoffs.actions(i); ++k) names.push_back("c" + std::to_string(k));
    continues.push_back(std::move(names));
  }
  return GeneralQuittingGame(std::move(players), std::move(continues), std::move(payoffs));
}

std::vector<int> GeneralQuittingGame::continue_counts() const {
  std::vector<int> out(players());
  for (std::size_t i = 0; i < players(); ++i) out[i] = continue_count(i);
  return out;
}

bool GeneralQuittingGame::is_absorbing(std::size_t profile) const {
  for (std::size_t i = 0; i < players(); ++i)
    if (form_.action_of(profile, i) == kQuit) return true;
  return false;
}

bool GeneralQuittingGame::is_recursive() const {
  for (std::size_t a = 0; a < form_.profile_count(); ++a) {
    if (is_absorbing(a)) continue;
    for (std::size_t i = 0; i < players(); ++i)
      if (form_.payoff(a, i) != 0.0) return false;
  }
  return true;
}

bool GeneralQuittingGame::is_positive() const {
  for (double v : form_.payoffs())
    if (v < 0.0) return false;
  return true;
}

void require_profile_shape(const GeneralQuittingGame& g, const MixedProfile& x) {
  if (x.players() != g.players()) throw InvalidInput("profile has the wrong number of players");
  for (std::size_t i = 0; i < g.players(); ++i)
    if (static_cast<int>(x[i].size()) != g.form().actions(i))
      throw InvalidInput("profile for player " + g.player_names()[i] + " has the wrong number of actions");
}

MixedProfile compose_profile(const SplitProfile& s) {
  std::vector<MixedAction> out;
  out.reserve(s.z.size());
  for (std::size_t i = 0; i < s.z.size(); ++i) {
    MixedAction a(s.alpha[i].size() + 1);
    a[0] = s.z[i];
    for (std::size_t k = 0; k < s.alpha[i].size(); ++k) a[k + 1] = (1.0 - s.z[i]) * s.alpha[i][k];
    out.push_back(std::move(a));
  }
  return MixedProfile::unchecked(std::move(out));
}

SplitProfile split_profile(const MixedProfile& x) {
  SplitProfile s;
  for (std::size_t i = 0; i < x.players(); ++i) {
    const auto& a = x[i];
    const std::size_t k = a.size() - 1;
    double cont = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) cont += a[j];
    MixedAction alpha(k, 1.0 / static_cast<double>(k));
    if (cont > 0.0)
      for (std::size_t j = 0; j < k; ++j) alpha[j] = a[j + 1] / cont;
    s.alpha.push_back(std::move(alpha));
    s.z.push_back(a[0]);
  }
  return s;
}

double absorption_probability(std::span<const double> quit_probs) {
  double log_continue = 0.0;
  for (double z : quit_probs) log_continue += std::log1p(-z);
  return -std::expm1(log_continue);
}

double absorption_probability(const MixedProfile& x) {
  std::vector<double> quits(x.players());
  for (std::size_t i = 0; i < x.players(); ++i) quits[i] = x[i][0];
  return absorption_probability(quits);
}

PayoffVector absorbing_mass(const GeneralQuittingGame& g, const MixedProfile& x) {
  const auto& form = g.form();
  const std::size_t n = g.players();
  PayoffVector out(n, 0.0);
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    bool absorbing = false;
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const int a = form.action_of(idx, j);
      absorbing = absorbing || a == GeneralQuittingGame::kQuit;
      w *= x[j][static_cast<std::size_t>(a)];
    }
    if (!absorbing || w == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) out[i] += w * form.payoff(idx, i);
  }
  return out;
}

PayoffVector expected_absorbing_payoff(const GeneralQuittingGame& g, const MixedProfile& x) {
  const double p = absorption_probability(x);
  if (!(p > 0.0)) throw NonAbsorbingProfile("expected absorbing payoff is undefined when p(x) = 0");
  auto mass = absorbing_mass(g, x);
  for (double& v : mass) v /= p;
  return mass;
}

PayoffVector discounted_stationary_value(const GeneralQuittingGame& g, const MixedProfile& x,
                                         double lambda, std::span<const double> q) {
  const double p = absorption_probability(x);
  const auto mass = absorbing_mass(g, x);
  const double denom = lambda + p * (1.0 - lambda);
  PayoffVector v(g.players());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (mass[i] + (1.0 - p) * lambda * q[i]) / denom;
  return v;
}

PayoffVector undiscounted_stationary_value(const GeneralQuittingGame& g, const MixedProfile& x,
                                           std::span<const double> q) {
  if (absorption_probability(x) > 0.0) return expected_absorbing_payoff(g, x);
  return PayoffVector(q.begin(), q.end());
}

PayoffVector continue_mix_payoff(const GeneralQuittingGame& g, QuitMask quit_mask,
                                 std::span<const MixedAction> alpha) {
  const std::size_t n = g.players();
  const auto& form = g.form();
  PayoffVector out(n, 0.0);
  // Odometer over the continue actions of the continuing players.
  std::vector<int> profile(n, GeneralQuittingGame::kQuit);
  std::vector<std::size_t> movers;
  for (std::size_t i = 0; i < n; ++i) {
    if (quit_mask & (QuitMask{1} << i)) continue;
    movers.push_back(i);
    profile[i] = 1;
  }
  while (true) {
    double w = 1.0;
    for (std::size_t i : movers) w *= alpha[i][static_cast<std::size_t>(profile[i] - 1)];
    const std::size_t idx = form.index(profile);
    for (std::size_t i = 0; i < n; ++i) out[i] += w * form.payoff(idx, i);
    std::size_t m = movers.size();
    bool done = true;
    while (m-- > 0) {
      const std::size_t i = movers[m];
      if (++profile[i] <= g.continue_count(i)) {
        done = false;
        break;
      }
      profile[i] = 1;
    }
    if (done) break;
  }
  return out;
}

}  // namespace quitsolve
