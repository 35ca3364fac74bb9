#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quitsolve/quitting_game.hpp"

namespace quitsolve {

// How stationary profiles are scored: lambda-discounted or undiscounted,
// with nonabsorbing stage payoff q in both cases.
struct EvaluationMode {
  std::optional<double> lambda;
  PayoffVector q;

  static EvaluationMode discounted(double lambda, PayoffVector q) { return {lambda, std::move(q)}; }
  static EvaluationMode undiscounted(PayoffVector q) { return {std::nullopt, std::move(q)}; }
};

PayoffVector stationary_value(const GeneralQuittingGame& g, const MixedProfile& x, const EvaluationMode& mode);

struct PlayerRegret {
  double value = 0.0;           // gamma_i(x)
  double best_deviation = 0.0;  // max over pure a_i of gamma_i(a_i, x_{-i})
  int best_action = 0;
  double regret = 0.0;          // best_deviation - value, floored at 0
};

struct RegretReport {
  std::vector<PlayerRegret> players;
  EvaluationMode mode;

  double max_regret() const;
};

// Against a stationary profile the deviator's value is a ratio of two
// functions affine in its own mixed action, so pure deviations suffice.
RegretReport best_pure_deviation(const GeneralQuittingGame& g, const MixedProfile& x, const EvaluationMode& mode);

struct EquilibriumCheck {
  bool pass = false;
  double epsilon = 0.0;
  RegretReport report;
};

EquilibriumCheck check_epsilon_equilibrium(const GeneralQuittingGame& g, const MixedProfile& x,
                                           const EvaluationMode& mode, double epsilon);

enum class AbsorptionClass {
  NotEquilibrium,
  NonAbsorbing,     // p = 0
  SmallAbsorption,  // p in (0, eps^2)
  Absorbing,        // p >= eps^2
};

std::string to_string(AbsorptionClass c);

struct AuxEquilibriumClassification {
  AbsorptionClass kind = AbsorptionClass::NotEquilibrium;
  double absorption = 0.0;
  RegretReport regret;  // in the auxiliary game, undiscounted
};

// Checks that xhat is a stationary 0-equilibrium (regret <= 1e-9) of the
// auxiliary game built from (alpha, q) and classifies its absorption.
AuxEquilibriumClassification check_aux_absorbing_equilibrium(const GeneralQuittingGame& g,
                                                             const std::vector<MixedAction>& alpha,
                                                             const PayoffVector& q, std::span<const double> xhat,
                                                             double epsilon);

enum class A2Verdict { Consistent, A1Suggestive, NonUnique, Inconclusive };

std::string to_string(A2Verdict v);

struct A2Entry {
  double lambda = 0.0;
  std::vector<double> z;
  double absorption = 0.0;
  bool solved = false;
  bool indifferent = false;  // every player indifferent between Q and C
  std::string error;
};

struct A2Report {
  std::vector<A2Entry> entries;
  double eta = 0.0;
  A2Verdict verdict = A2Verdict::Inconclusive;
};

// Solves for a discounted stationary equilibrium of the auxiliary game at
// each lambda (warm-started) and reports how p(x_lambda) behaves. A
// diagnostic, not a decision procedure. Exact best-response equilibria
// unless n is given.
A2Report a2_diagnostic(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha, const PayoffVector& q,
                       std::span<const double> lambdas, double eta, std::optional<double> n = std::nullopt);

}  // namespace quitsolve
