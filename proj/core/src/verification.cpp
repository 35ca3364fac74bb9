#include "quitsolve/verification.hpp"

#include <algorithm>
#include <cmath>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/equilibrium_path.hpp"
#include "quitsolve/errors.hpp"

namespace quitsolve {

PayoffVector stationary_value(const GeneralQuittingGame& g, const MixedProfile& x, const EvaluationMode& mode) {
  if (mode.q.size() != g.players()) throw InvalidInput("q has the wrong number of players");
  if (mode.lambda) return discounted_stationary_value(g, x, *mode.lambda, mode.q);
  return undiscounted_stationary_value(g, x, mode.q);
}

double RegretReport::max_regret() const {
  double r = 0.0;
  for (const PlayerRegret& p : players) r = std::max(r, p.regret);
  return r;
}

RegretReport best_pure_deviation(const GeneralQuittingGame& g, const MixedProfile& x, const EvaluationMode& mode) {
  require_profile_shape(g, x);
  RegretReport report;
  report.mode = mode;
  const PayoffVector value = stationary_value(g, x, mode);
  for (std::size_t i = 0; i < g.players(); ++i) {
    PlayerRegret r;
    r.value = value[i];
    r.best_deviation = -std::numeric_limits<double>::infinity();
    const auto actions = static_cast<std::size_t>(g.form().actions(i));
    for (std::size_t a = 0; a < actions; ++a) {
      MixedAction pure(actions, 0.0);
      pure[a] = 1.0;
      const double v = stationary_value(g, x.with_action(i, pure), mode)[i];
      if (v > r.best_deviation) {
        r.best_deviation = v;
        r.best_action = static_cast<int>(a);
      }
    }
    r.regret = std::max(0.0, r.best_deviation - r.value);
    report.players.push_back(r);
  }
  return report;
}

EquilibriumCheck check_epsilon_equilibrium(const GeneralQuittingGame& g, const MixedProfile& x,
                                           const EvaluationMode& mode, double epsilon) {
  EquilibriumCheck check;
  check.epsilon = epsilon;
  check.report = best_pure_deviation(g, x, mode);
  check.pass = check.report.max_regret() <= epsilon;
  return check;
}

std::string to_string(AbsorptionClass c) {
  switch (c) {
    case AbsorptionClass::NotEquilibrium: return "not-equilibrium";
    case AbsorptionClass::NonAbsorbing: return "non-absorbing";
    case AbsorptionClass::SmallAbsorption: return "small-absorption";
    case AbsorptionClass::Absorbing: return "absorbing";
  }
  return "unknown";
}

AuxEquilibriumClassification check_aux_absorbing_equilibrium(const GeneralQuittingGame& g,
                                                             const std::vector<MixedAction>& alpha,
                                                             const PayoffVector& q, std::span<const double> xhat,
                                                             double epsilon) {
  const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha, q);
  if (xhat.size() != g.players()) throw InvalidInput("xhat has the wrong number of players");
  std::vector<MixedAction> actions;
  for (double z : xhat) {
    if (!(z >= 0.0 && z <= 1.0)) throw InvalidInput("xhat must lie in [0,1]");
    actions.push_back({z, 1.0 - z});
  }
  AuxEquilibriumClassification out;
  out.absorption = absorption_probability(xhat);
  out.regret = best_pure_deviation(aux.as_quitting_game(), MixedProfile::make(std::move(actions)),
                                   EvaluationMode::undiscounted(q));
  if (out.regret.max_regret() > 1e-9) {
    out.kind = AbsorptionClass::NotEquilibrium;
  } else if (out.absorption == 0.0) {
    out.kind = AbsorptionClass::NonAbsorbing;
  } else if (out.absorption < epsilon * epsilon) {
    out.kind = AbsorptionClass::SmallAbsorption;
  } else {
    out.kind = AbsorptionClass::Absorbing;
  }
  return out;
}

std::string to_string(A2Verdict v) {
  switch (v) {
    case A2Verdict::Consistent: return "A2-consistent";
    case A2Verdict::A1Suggestive: return "A1-suggestive";
    case A2Verdict::NonUnique: return "non-unique";
    case A2Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

A2Report a2_diagnostic(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha, const PayoffVector& q,
                       std::span<const double> lambdas, double eta, std::optional<double> n) {
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    if (!(lambdas[k] < lambdas[k - 1])) throw InvalidInput("lambda schedule must decrease");
  }
  A2Report report;
  report.eta = eta;
  std::optional<std::vector<double>> warm;
  bool any_indifferent = false;
  for (double lambda : lambdas) {
    A2Entry entry;
    entry.lambda = lambda;
    try {
      const PathPoint p = discounted_stationary_equilibrium(g, alpha, q, lambda, n, warm);
      entry.z = p.z;
      entry.absorption = p.absorption;
      entry.solved = true;
      warm = p.z;
      const StrategicGame form = one_shot_payoffs(g, alpha, q, p.z, lambda);
      std::vector<MixedAction> xs;
      for (double z : p.z) xs.push_back({z, 1.0 - z});
      const MixedProfile x = MixedProfile::unchecked(std::move(xs));
      entry.indifferent = true;
      for (std::size_t i = 0; i < g.players(); ++i) {
        const std::vector<double> v = form.action_values(i, x);
        if (std::abs(v[0] - v[1]) > 1e-12) entry.indifferent = false;
      }
      any_indifferent = any_indifferent || entry.indifferent;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    report.entries.push_back(std::move(entry));
  }
  const A2Entry* last = nullptr;
  for (const A2Entry& e : report.entries) {
    if (e.solved) last = &e;
  }
  if (any_indifferent) {
    report.verdict = A2Verdict::NonUnique;
  } else if (last == nullptr) {
    report.verdict = A2Verdict::Inconclusive;
  } else {
    report.verdict = last->absorption >= eta ? A2Verdict::Consistent : A2Verdict::A1Suggestive;
  }
  return report;
}

}  // namespace quitsolve
