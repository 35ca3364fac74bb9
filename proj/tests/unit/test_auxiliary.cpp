#include <doctest.h>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/errors.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

TEST_CASE("singleton continue sets: auxiliary table is the base game with q") {
  Rng rng(1);
  const GeneralQuittingGame g = random_quitting(rng, {1, 1, 1}, -1, 1, false);
  const PayoffVector q{0.1, 0.2, 0.3};
  const AuxiliaryQuittingGame aux = build_auxiliary(g, {{1.0}, {1.0}, {1.0}}, q);
  CHECK(aux.payoff(0) == q);
  for (QuitMask mask = 1; mask < 8; ++mask) {
    std::vector<int> prof(3);
    for (std::size_t i = 0; i < 3; ++i) prof[i] = (mask >> i) & 1U ? 0 : 1;
    const std::size_t k = g.form().index(prof);
    for (std::size_t i = 0; i < 3; ++i) CHECK(aux.payoff(mask)[i] == g.form().payoff(k, i));
  }
}

TEST_CASE("pure alpha picks the base payoffs at that continue action") {
  Rng rng(2);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1}, -1, 1, true);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, {{0.0, 1.0}, {1.0}}, {0.0, 0.0});
  const std::vector<int> prof{2, 0};  // C^2 for player 0, Q for player 1
  const std::size_t k = g.form().index(prof);
  CHECK(aux.payoff(QuitMask{2})[0] == doctest::Approx(g.form().payoff(k, 0)).epsilon(1e-15));
  CHECK(aux.payoff(QuitMask{2})[1] == doctest::Approx(g.form().payoff(k, 1)).epsilon(1e-15));
}

TEST_CASE("three-player hand expansion of one auxiliary entry") {
  Rng rng(3);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1, 1}, -1, 1, true);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, {{0.5, 0.5}, {1.0}, {1.0}}, {0.0, 0.0, 0.0});
  // (C_1, Q_2, C_3)
  const std::size_t k1 = g.form().index(std::vector<int>{1, 0, 1});
  const std::size_t k2 = g.form().index(std::vector<int>{2, 0, 1});
  for (std::size_t i = 0; i < 3; ++i) {
    const double expect = 0.5 * g.form().payoff(k1, i) + 0.5 * g.form().payoff(k2, i);
    CHECK(std::abs(aux.payoff(QuitMask{2})[i] - expect) <= 1e-12);
  }
}

TEST_CASE("auxiliary entries are affine in each continue mix") {
  Rng rng(4);
  const GeneralQuittingGame g = random_quitting(rng, {2, 3, 1}, -1, 1, false);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<MixedAction> a{random_simplex(rng, 2), random_simplex(rng, 3), {1.0}};
    std::vector<MixedAction> b = a;
    std::vector<MixedAction> m = a;
    const std::size_t i = static_cast<std::size_t>(rep % 2);
    b[i] = random_simplex(rng, g.continue_count(i));
    const double t = rng.uniform();
    for (std::size_t k = 0; k < m[i].size(); ++k) m[i][k] = (1 - t) * a[i][k] + t * b[i][k];
    const PayoffVector q{0, 0, 0};
    const auto aa = build_auxiliary(g, a, q);
    const auto ab = build_auxiliary(g, b, q);
    const auto am = build_auxiliary(g, m, q);
    for (QuitMask mask = 1; mask < 8; ++mask) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(am.payoff(mask)[j] - ((1 - t) * aa.payoff(mask)[j] + t * ab.payoff(mask)[j])) <= 1e-13);
      }
    }
  }
}

TEST_CASE("lift_stationary examples") {
  Rng rng(5);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1, 1}, -1, 1, true);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, {{0.5, 0.5}, {1.0}, {1.0}}, {0, 0, 0});
  const MixedProfile x0 = lift_stationary(aux, std::vector<double>{0, 0, 0});
  CHECK(x0[0] == MixedAction{0.0, 0.5, 0.5});
  CHECK(x0[1] == MixedAction{0.0, 1.0});
  const MixedProfile x1 = lift_stationary(aux, std::vector<double>{1, 1, 1});
  for (std::size_t i = 0; i < 3; ++i) CHECK(x1[i][0] == 1.0);
  const MixedProfile x = lift_stationary(aux, std::vector<double>{0.3, 0, 0});
  CHECK(x[0][0] == doctest::Approx(0.3));
  CHECK(x[0][1] == doctest::Approx(0.35));
  CHECK(x[0][2] == doctest::Approx(0.35));
}

TEST_CASE("absorption of the lifted profile equals auxiliary absorption") {
  Rng rng(6);
  const GeneralQuittingGame g = random_quitting(rng, {2, 2, 1}, -1, 1, false);
  for (int rep = 0; rep < 50; ++rep) {
    const auto aux = build_auxiliary(g, {random_simplex(rng, 2), random_simplex(rng, 2), {1.0}}, {0, 0, 0});
    const std::vector<double> xhat{rng.uniform(), rng.uniform(), rng.uniform()};
    const double expect = 1.0 - (1 - xhat[0]) * (1 - xhat[1]) * (1 - xhat[2]);
    CHECK(absorption_probability(lift_stationary(aux, xhat)) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("project_history relabels continue actions and keeps signals") {
  Rng rng(7);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1, 1}, -1, 1, true);
  CHECK(project_history(g, History{}).stages() == 0);
  History h;
  h.signals = {0.25};
  h.actions = {{1, 1, 0}};
  History h2 = h;
  h2.actions = {{2, 1, 0}};
  const History p = project_history(g, h2);
  CHECK(p.signals == h.signals);
  CHECK(p.actions == h.actions);
  // Idempotent on histories that already use one continue action.
  CHECK(project_history(g, p).actions == p.actions);
  History bad = h;
  bad.actions = {{3, 1, 0}};
  CHECK_THROWS_AS(project_history(g, bad), InvalidInput);
  History too_many = h;
  too_many.actions.push_back({1, 1, 1});
  CHECK_THROWS_AS(project_history(g, too_many), InvalidInput);
}

TEST_CASE("payoff equivalence on singleton continue sets is exact") {
  Rng rng(8);
  const GeneralQuittingGame g = random_quitting(rng, {1, 1, 1}, -1, 1, false);
  const PayoffVector q{0.2, -0.4, 0.1};
  const std::vector<double> xhat{0.2, 0.5, 0.1};
  CHECK(payoff_equivalence_check(g, {{1.0}, {1.0}, {1.0}}, q, xhat, 0.3).gap <= 1e-15);
}

TEST_CASE("payoff equivalence on random instances") {
  Rng rng(9);
  double worst = 0.0;
  for (int rep = 0; rep < 300; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {2, 3, 1}, -1, 1, rep % 2 == 0);
    const std::vector<MixedAction> alpha{random_simplex(rng, 2), random_simplex(rng, 3), {1.0}};
    const PayoffVector q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const std::vector<double> xhat{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto disc = payoff_equivalence_check(g, alpha, q, xhat, rng.uniform(0.001, 1));
    const auto undisc = payoff_equivalence_check(g, alpha, q, xhat, std::nullopt);
    worst = std::max({worst, disc.gap, undisc.gap});
    // Cross-check the auxiliary side against the enumeration oracle on the lifted profile.
    const auto aux = build_auxiliary(g, alpha, q);
    const Enumerated e = enumerate_absorption(g, lift_stationary(aux, xhat));
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(undisc.aux_value[i] - e.mass[i] / e.p) <= 1e-10);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("binary form carries q on the all-continue profile") {
  Rng rng(10);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1}, -1, 1, true);
  const auto aux = build_auxiliary(g, {{0.4, 0.6}, {1.0}}, {0.7, -0.3});
  const StrategicGame b = aux.binary_form();
  const std::size_t cc = b.index(std::vector<int>{1, 1});
  CHECK(b.payoff(cc, 0) == 0.7);
  CHECK(b.payoff(cc, 1) == -0.3);
  const std::size_t qc = b.index(std::vector<int>{0, 1});
  CHECK(b.payoff(qc, 0) == aux.payoff(QuitMask{1})[0]);
}
