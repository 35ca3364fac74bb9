#include "quitsolve/auxiliary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quitsolve/errors.hpp"

namespace quitsolve {

AuxiliaryQuittingGame build_auxiliary(const GeneralQuittingGame& g, std::vector<MixedAction> alpha,
                                      PayoffVector q) {
  const std::size_t n = g.players();
  if (alpha.size() != n || q.size() != n) throw InvalidInput("alpha and q need one entry per player");
  for (std::size_t i = 0; i < n; ++i)
    if (static_cast<int>(alpha[i].size()) != g.continue_count(i))
      throw InvalidInput("alpha for player " + g.player_names()[i] + " has the wrong size");
  alpha = MixedProfile::make(std::move(alpha)).actions();

  AuxiliaryQuittingGame aux;
  aux.base_ = std::make_shared<const GeneralQuittingGame>(g);
  aux.alpha_ = std::move(alpha);
  aux.q_ = std::move(q);
  const QuitMask masks = QuitMask{1} << n;
  aux.table_.resize(masks);
  aux.table_[0] = aux.q_;
  for (QuitMask mask = 1; mask < masks; ++mask) aux.table_[mask] = continue_mix_payoff(g, mask, aux.alpha_);

  // Binary quitting game: action 0 = Q, action 1 = C.
  StrategicGame form = StrategicGame::zeros(std::vector<int>(n, 2));
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    QuitMask mask = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (form.action_of(idx, i) == 0) mask |= QuitMask{1} << i;
    if (mask == 0) continue;
    for (std::size_t i = 0; i < n; ++i) form.set_payoff(idx, i, aux.table_[mask][i]);
  }
  std::vector<std::vector<std::string>> continues(n, std::vector<std::string>{"C"});
  aux.quitting_ = std::make_shared<const GeneralQuittingGame>(g.player_names(), std::move(continues),
                                                              std::move(form));
  return aux;
}

StrategicGame AuxiliaryQuittingGame::binary_form() const {
  StrategicGame form = quitting_->form();
  std::vector<int> all_continue(players(), 1);
  const std::size_t idx = form.index(all_continue);
  for (std::size_t i = 0; i < players(); ++i) form.set_payoff(idx, i, q_[i]);
  return form;
}

MixedProfile lift_stationary(const AuxiliaryQuittingGame& aux, std::span<const double> xhat) {
  return compose_profile(SplitProfile{aux.alpha(), std::vector<double>(xhat.begin(), xhat.end())});
}

History project_history(const GeneralQuittingGame& g, const History& h) {
  const std::size_t t = h.actions.size();
  if (h.signals.size() != t && h.signals.size() != t + 1)
    throw InvalidInput("history must carry one signal per stage");
  for (double y : h.signals)
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidInput("signal outside [0,1]");
  History out;
  out.signals = h.signals;
  out.actions.reserve(t);
  for (std::size_t s = 0; s < t; ++s) {
    const auto& a = h.actions[s];
    if (a.size() != g.players())
      throw InvalidInput("stage " + std::to_string(s + 1) + " has the wrong number of actions");
    std::vector<int> projected(a.size());
    bool absorbing = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < 0 || a[i] > g.continue_count(i))
        throw InvalidInput("stage " + std::to_string(s + 1) + " has an unknown action for player " +
                           g.player_names()[i]);
      projected[i] = a[i] == GeneralQuittingGame::kQuit ? 0 : 1;
      absorbing = absorbing || a[i] == GeneralQuittingGame::kQuit;
    }
    if (absorbing && (s + 1 < t || h.signals.size() > t))
      throw InvalidInput("history continues past an absorbing stage");
    out.actions.push_back(std::move(projected));
  }
  return out;
}

PayoffVector aux_absorbing_mass(const AuxiliaryQuittingGame& aux, std::span<const double> xhat) {
  const std::size_t n = aux.players();
  PayoffVector out(n, 0.0);
  const QuitMask masks = QuitMask{1} << n;
  for (QuitMask mask = 1; mask < masks; ++mask) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= (mask & (QuitMask{1} << i)) ? xhat[i] : 1.0 - xhat[i];
    if (w == 0.0) continue;
    const auto& u = aux.payoff(mask);
    for (std::size_t i = 0; i < n; ++i) out[i] += w * u[i];
  }
  return out;
}

PayoffVector aux_discounted_value(const AuxiliaryQuittingGame& aux, std::span<const double> xhat,
                                  double lambda) {
  const double p = absorption_probability(xhat);
  const auto mass = aux_absorbing_mass(aux, xhat);
  const double denom = lambda + p * (1.0 - lambda);
  PayoffVector v(aux.players());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (mass[i] + (1.0 - p) * lambda * aux.q()[i]) / denom;
  return v;
}

PayoffVector aux_undiscounted_value(const AuxiliaryQuittingGame& aux, std::span<const double> xhat) {
  const double p = absorption_probability(xhat);
  if (!(p > 0.0)) return aux.q();
  auto mass = aux_absorbing_mass(aux, xhat);
  for (double& v : mass) v /= p;
  return mass;
}

PayoffEquivalenceReport payoff_equivalence_check(const GeneralQuittingGame& g,
                                                 const std::vector<MixedAction>& alpha,
                                                 const PayoffVector& q, std::span<const double> xhat,
                                                 std::optional<double> lambda) {
  const auto aux = build_auxiliary(g, alpha, q);
  const auto x = lift_stationary(aux, xhat);
  PayoffEquivalenceReport report;
  report.lambda = lambda;
  if (lambda) {
    report.base_value = discounted_stationary_value(g, x, *lambda, q);
    report.aux_value = aux_discounted_value(aux, xhat, *lambda);
  } else {
    report.base_value = undiscounted_stationary_value(g, x, q);
    report.aux_value = aux_undiscounted_value(aux, xhat);
  }
  for (std::size_t i = 0; i < q.size(); ++i)
    report.gap = std::max(report.gap, std::abs(report.base_value[i] - report.aux_value[i]));
  return report;
}

}  // namespace quitsolve
