#include <doctest.h>

#include <cmath>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/errors.hpp"
#include "quitsolve/simulation.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

TEST_CASE("split_action") {
  const SplitAction s = split_action({0.2, 0.6, 0.2});
  CHECK(s.quit == 0.2);
  CHECK(s.alpha[0] == doctest::Approx(0.75));
  const SplitAction q = split_action({1.0, 0.0, 0.0});
  CHECK(q.alpha == MixedAction{0.5, 0.5});
}

TEST_CASE("signal threshold rules") {
  const SignalThresholdStrategy s({{0.0, 0.5, {1.0, 0.0}}, {0.5, 1.0, {0.0, 1.0}}});
  History h;
  h.signals = {0.2};
  CHECK(s.act(h).quit == 1.0);
  h.signals = {0.5};
  CHECK(s.act(h).quit == 0.0);
  h.signals = {1.0};
  CHECK(s.act(h).quit == 0.0);
  CHECK_THROWS_AS(SignalThresholdStrategy({{0.5, 0.2, {1.0, 0.0}}}), InvalidInput);
  const SignalThresholdStrategy gap({{0.0, 0.5, {1.0, 0.0}}});
  h.signals = {0.7};
  CHECK_THROWS_AS(gap.act(h), InvalidInput);
}

TEST_CASE("all-quit profile pays u(Q) exactly") {
  Rng rng(1);
  const GeneralQuittingGame g = random_quitting(rng, {2, 1, 1}, -1, 1, true);
  const MixedProfile x = MixedProfile::make({{1, 0, 0}, {1, 0}, {1, 0}});
  SimulationOptions o;
  o.runs = 100;
  o.horizon = 5;
  const SimulationEstimate e = monte_carlo_payoff(g, stationary_profile(x), {0, 0, 0}, o);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(e.mean[i] - g.form().payoff(0, i)) <= 1e-14);
    CHECK(e.standard_error[i] <= 1e-14);
  }
  CHECK(e.absorbed_runs == 100);
}

TEST_CASE("stationary estimates agree with closed forms") {
  Rng rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {2, 1, 1}, 0, 1, true);
    const MixedProfile x = random_profile(rng, {3, 2, 2});
    const double p = absorption_probability(x);
    SimulationOptions o;
    o.runs = 4000;
    o.seed = 100 + static_cast<std::uint64_t>(rep);
    o.horizon = static_cast<std::size_t>(std::ceil(std::log(1e-6) / std::log1p(-p))) + 1;
    const PayoffVector q{0, 0, 0};
    const SimulationEstimate u = monte_carlo_payoff(g, stationary_profile(x), q, o);
    const PayoffVector exact = expected_absorbing_payoff(g, x);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(u.mean[i] - exact[i]) <= 4 * u.standard_error[i] + 1e-12);
    o.lambda = 0.1;
    const SimulationEstimate d = monte_carlo_payoff(g, stationary_profile(x), q, o);
    const PayoffVector dv = discounted_stationary_value(g, x, 0.1, q);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(d.mean[i] - dv[i]) <= 4 * d.standard_error[i] + 1e-12);
  }
}

TEST_CASE("results are reproducible and independent of the thread count") {
  Rng rng(3);
  const GeneralQuittingGame g = random_quitting(rng, {2, 2}, -1, 1, false);
  const MixedProfile x = random_profile(rng, {3, 3});
  SimulationOptions o;
  o.runs = 500;
  o.horizon = 200;
  o.seed = 42;
  o.keep_runs = true;
  o.threads = 1;
  const SimulationEstimate a = monte_carlo_payoff(g, stationary_profile(x), {0.1, 0.2}, o);
  o.threads = 4;
  const SimulationEstimate b = monte_carlo_payoff(g, stationary_profile(x), {0.1, 0.2}, o);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.per_run == b.per_run);
  o.seed = 43;
  const SimulationEstimate c = monte_carlo_payoff(g, stationary_profile(x), {0.1, 0.2}, o);
  CHECK(c.per_run != a.per_run);
}

TEST_CASE("unabsorbed runs pay q") {
  Rng rng(4);
  const GeneralQuittingGame g = random_quitting(rng, {1, 1}, -1, 1, false);
  const MixedProfile x = MixedProfile::make({{0, 1}, {0, 1}});
  SimulationOptions o;
  o.runs = 10;
  o.horizon = 20;
  const SimulationEstimate e = monte_carlo_payoff(g, stationary_profile(x), {0.3, -0.4}, o);
  CHECK(max_abs_diff(e.mean, PayoffVector{0.3, -0.4}) <= 1e-14);
  CHECK(e.absorbed_runs == 0);
}

TEST_CASE("lifted auxiliary profile matches the auxiliary simulation run by run") {
  Rng rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const GeneralQuittingGame g = random_quitting(rng, {2, 3, 1}, 0, 1, true);
    const std::vector<MixedAction> alpha{random_simplex(rng, 2), random_simplex(rng, 3), {1.0}};
    const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha, {0, 0, 0});
    // Signal-dependent auxiliary strategies over {Q, C}.
    StrategyProfile aux_profile;
    for (std::size_t i = 0; i < 3; ++i) {
      const double cut = rng.uniform(0.2, 0.8);
      const double z = rng.uniform(0.05, 0.3);
      aux_profile.push_back(std::make_shared<SignalThresholdStrategy>(std::vector<SignalThresholdStrategy::Rule>{
          {0.0, cut, {z, 1.0 - z}}, {cut, 1.0, {0.0, 1.0}}}));
    }
    SimulationOptions o;
    o.runs = 300;
    o.horizon = 400;
    o.seed = 7 + static_cast<std::uint64_t>(rep);
    o.keep_runs = true;
    o.estimator = PayoffEstimator::ConditionalOnQuitters;
    const SimulationEstimate base = monte_carlo_payoff(g, lift_profile(aux, aux_profile), {0, 0, 0}, o);
    const SimulationEstimate small = monte_carlo_payoff(aux.as_quitting_game(), aux_profile, {0, 0, 0}, o);
    REQUIRE(base.per_run.size() == small.per_run.size());
    double gap = 0.0;
    for (std::size_t r = 0; r < base.per_run.size(); ++r) gap = std::max(gap, max_abs_diff(base.per_run[r], small.per_run[r]));
    CHECK(gap <= 1e-12);
    CHECK(base.absorbed_runs == small.absorbed_runs);
  }
}

TEST_CASE("configured threads honours the environment cap") {
  CHECK(configured_threads() >= 1);
}
