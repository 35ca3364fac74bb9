#include <doctest.h>

#include <cmath>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/verification.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

namespace {

// Stationary value of player i when it deviates to mixed action d; computed
// from the enumeration oracle rather than the library's closed form.
double deviation_value(const GeneralQuittingGame& g, const MixedProfile& x, std::size_t i, const MixedAction& d,
                       const EvaluationMode& mode) {
  const MixedProfile y = x.with_action(i, d);
  const Enumerated e = enumerate_absorption(g, y);
  if (mode.lambda) {
    const double l = *mode.lambda;
    return (e.mass[i] + (1 - e.p) * l * mode.q[i]) / (l + e.p * (1 - l));
  }
  return e.p > 0 ? e.mass[i] / e.p : mode.q[i];
}

}  // namespace

TEST_CASE("strict equilibrium has zero regret") {
  // Both players quitting: each gets 0.6, a unilateral switch to C gets 0.3.
  const GeneralQuittingGame g = GeneralQuittingGame::from_form(
      StrategicGame({2, 2}, {0.6, 0.6, 0.4, 0.3, 0.3, 0.4, 0.0, 0.0}));
  const MixedProfile x = MixedProfile::make({{1, 0}, {1, 0}});
  for (const EvaluationMode& m : {EvaluationMode::undiscounted({0, 0}), EvaluationMode::discounted(0.1, {0, 0})}) {
    const RegretReport r = best_pure_deviation(g, x, m);
    CHECK(r.max_regret() == 0.0);
    CHECK(check_epsilon_equilibrium(g, x, m, 0.0).pass);
  }
}

TEST_CASE("symmetric game and symmetric profile give equal regrets") {
  const GeneralQuittingGame g = GeneralQuittingGame::from_form(
      StrategicGame({2, 2}, {0.5, 0.5, 0.9, 0.2, 0.2, 0.9, 0.0, 0.0}));
  const MixedProfile x = MixedProfile::make({{0.3, 0.7}, {0.3, 0.7}});
  const RegretReport r = best_pure_deviation(g, x, EvaluationMode::discounted(0.2, {0, 0}));
  CHECK(r.players[0].regret == doctest::Approx(r.players[1].regret).epsilon(1e-14));
}

TEST_CASE("values and deviations agree with the enumeration oracle") {
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {2, 1, 2}, -1, 1, rep % 2 == 0);
    const MixedProfile x = random_profile(rng, {3, 2, 3});
    const PayoffVector q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const EvaluationMode mode = rep % 3 == 0 ? EvaluationMode::undiscounted(q) : EvaluationMode::discounted(0.05, q);
    const RegretReport r = best_pure_deviation(g, x, mode);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(r.players[i].value - deviation_value(g, x, i, x[i], mode)) <= 1e-12);
      double best = -1e9;
      for (int a = 0; a < g.form().actions(i); ++a) {
        MixedAction d(static_cast<std::size_t>(g.form().actions(i)), 0.0);
        d[static_cast<std::size_t>(a)] = 1.0;
        best = std::max(best, deviation_value(g, x, i, d, mode));
      }
      CHECK(std::abs(r.players[i].best_deviation - best) <= 1e-12);
      CHECK(r.players[i].regret >= 0.0);
    }
  }
}

TEST_CASE("pure deviations dominate a grid of mixed deviations") {
  Rng rng(2);
  for (int rep = 0; rep < 40; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {1, 1, 1}, 0, 1, true);
    const MixedProfile x = random_profile(rng, {2, 2, 2});
    for (const EvaluationMode& m : {EvaluationMode::undiscounted({0, 0, 0}), EvaluationMode::discounted(0.1, {0, 0, 0})}) {
      const RegretReport r = best_pure_deviation(g, x, m);
      for (std::size_t i = 0; i < 3; ++i) {
        for (int k = 0; k <= 100; ++k) {
          const double w = k / 100.0;
          CHECK(deviation_value(g, x, i, {w, 1 - w}, m) <= r.players[i].best_deviation + 1e-9);
        }
      }
    }
  }
}

TEST_CASE("check_epsilon_equilibrium thresholds") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {2, 1}, -1, 1, false);
    const MixedProfile x = random_profile(rng, {3, 2});
    CHECK(check_epsilon_equilibrium(g, x, EvaluationMode::discounted(0.3, {0.1, 0.2}), 2.0).pass);
  }
  // A perturbed strict equilibrium fails at 1e-3.
  const GeneralQuittingGame g = GeneralQuittingGame::from_form(
      StrategicGame({2, 2}, {0.6, 0.6, 0.4, 0.3, 0.3, 0.4, 0.0, 0.0}));
  const MixedProfile x = MixedProfile::make({{0.9, 0.1}, {1, 0}});
  const EquilibriumCheck c = check_epsilon_equilibrium(g, x, EvaluationMode::undiscounted({0, 0}), 1e-3);
  CHECK_FALSE(c.pass);
  CHECK(c.report.players[0].regret > 1e-3);
}

TEST_CASE("auxiliary absorbing equilibrium classification") {
  Rng rng(4);
  SUBCASE("continuing forever when q dominates") {
    const GeneralQuittingGame g = random_quitting(rng, {2, 1}, 0, 0.5, false);
    const auto c = check_aux_absorbing_equilibrium(g, {{0.5, 0.5}, {1.0}}, {0.8, 0.8}, std::vector<double>{0, 0}, 0.1);
    CHECK(c.kind == AbsorptionClass::NonAbsorbing);
    CHECK(c.absorption == 0.0);
  }
  SUBCASE("two high quit probabilities are absorbing") {
    // Quitting is strictly dominant for both.
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.6, 0.6, 0.7, 0.3, 0.3, 0.7, 0.0, 0.0}));
    const auto c = check_aux_absorbing_equilibrium(g, {{1.0}, {1.0}}, {0, 0}, std::vector<double>{1, 1}, 0.5);
    CHECK(c.kind == AbsorptionClass::Absorbing);
    CHECK(c.absorption >= 0.75);
  }
  SUBCASE("small absorption") {
    // Player 2 indifferent between quitting and continuing against a continuing player 1.
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}));
    const auto c = check_aux_absorbing_equilibrium(g, {{1.0}, {1.0}}, {0, 0}, std::vector<double>{0, 1e-4}, 0.1);
    CHECK(c.kind == AbsorptionClass::SmallAbsorption);
  }
  SUBCASE("non-equilibrium") {
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.6, 0.6, 0.7, 0.3, 0.3, 0.7, 0.0, 0.0}));
    const auto c = check_aux_absorbing_equilibrium(g, {{1.0}, {1.0}}, {0, 0}, std::vector<double>{0, 0}, 0.1);
    CHECK(c.kind == AbsorptionClass::NotEquilibrium);
    CHECK(c.regret.max_regret() > 0.0);
  }
}

TEST_CASE("a2_diagnostic verdicts") {
  const std::vector<double> lambdas{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  SUBCASE("a profitable unilateral quit keeps absorption away from 0") {
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.2, 0.2, 0.9, 0.5, 0.4, 0.1, 0.0, 0.0}));
    const A2Report r = a2_diagnostic(g, {{1.0}, {1.0}}, {0, 0}, lambdas, 1e-2);
    CHECK(r.verdict == A2Verdict::Consistent);
    for (const auto& e : r.entries) CHECK(e.absorption >= 0.5);
  }
  SUBCASE("dominant continuation drives absorption to 0") {
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.1, 0.1, 0.3, 0.2, 0.2, 0.3, 1.0, 1.0}));
    const A2Report r = a2_diagnostic(g, {{1.0}, {1.0}}, {1.0, 1.0}, lambdas, 1e-2);
    CHECK(r.verdict == A2Verdict::A1Suggestive);
    CHECK(r.entries.back().absorption == 0.0);
  }
  SUBCASE("constant payoffs equal to q are flagged non-unique") {
    const GeneralQuittingGame g = GeneralQuittingGame::from_form(
        StrategicGame({2, 2}, {0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4, 0.4}));
    const A2Report r = a2_diagnostic(g, {{1.0}, {1.0}}, {0.4, 0.4}, lambdas, 1e-2);
    CHECK(r.verdict == A2Verdict::NonUnique);
  }
}

TEST_CASE("verdict and class names") {
  CHECK(to_string(A2Verdict::A1Suggestive) == "A1-suggestive");
  CHECK(to_string(AbsorptionClass::SmallAbsorption) == "small-absorption");
}
