#include <doctest.h>

#include <cmath>

#include "quitsolve/logit.hpp"
#include "quitsolve/nash.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

TEST_CASE("n = 0 gives uniform mixing") {
  Rng rng(1);
  const StrategicGame u = random_form(rng, {2, 3, 2}, 0, 1);
  const LogitPoint p = logit_fixed_point(u, 0.0);
  CHECK(p.x[1][0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(p.x[0][1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("a player with one action plays it") {
  Rng rng(2);
  const StrategicGame u = random_form(rng, {1, 3}, 0, 1);
  const LogitPoint p = logit_fixed_point(u, 30.0);
  CHECK(p.x[0][0] == 1.0);
}

TEST_CASE("accepted points have small residual and respect the probability floor") {
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const std::vector<int> counts{2 + rep % 2, 3 - rep % 2};
    const StrategicGame u = random_form(rng, counts, 0, 1);
    const auto path = logit_path(u, logit_schedule(100.0, 25));
    REQUIRE_FALSE(path.failure);
    for (const LogitPoint& p : path.points) {
      CHECK(logit_residual(u, p.n, p.x) <= 1e-10);
      for (std::size_t i = 0; i < 2; ++i) {
        for (double v : p.x[i]) CHECK(v >= 1.0 / (counts[i] * std::exp(p.n)));
      }
    }
  }
}

TEST_CASE("2x2 game at n = 100 has small regret") {
  // Matching pennies rescaled to [0,1].
  const StrategicGame u({2, 2}, {1, 0, 0, 1, 0, 1, 1, 0});
  const LogitLimit lim = nash_from_logit_limit(u, 100.0);
  for (double r : lim.regret) CHECK(r <= 0.05);
  CHECK(lim.point.x[0][0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("constant game stays uniform along the path with zero regret") {
  const StrategicGame u({3, 2}, std::vector<double>(12, 0.5));
  const auto path = logit_path(u, logit_schedule(200.0, 10));
  for (const auto& p : path.points) {
    CHECK(p.x[0][0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(p.x[1][1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  for (double r : nash_from_logit_limit(u, 50.0, 10).regret) CHECK(r <= 1e-12);
}

TEST_CASE("dominant action gains probability along the path and the limit is pure") {
  // Action 0 strictly dominant for both players.
  const StrategicGame u({2, 2}, {0.9, 0.8, 0.7, 0.3, 0.2, 0.6, 0.1, 0.1});
  const auto path = logit_path(u, logit_schedule(200.0, 30));
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    CHECK(path.points[k].x[0][0] >= path.points[k - 1].x[0][0]);
    CHECK(path.points[k].x[1][0] >= path.points[k - 1].x[1][0]);
  }
  for (double r : nash_from_logit_limit(u, 200.0).regret) CHECK(r <= 1e-3);
}

TEST_CASE("own-payoff shifts leave the logit point unchanged") {
  Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const StrategicGame u = random_form(rng, {2, 3}, 0, 1);
    const StrategicGame v = u.shifted(0, rng.uniform(-2, 2)).shifted(1, rng.uniform(-2, 2));
    const LogitPoint a = logit_fixed_point(u, 3.0);
    const LogitPoint b = logit_fixed_point(v, 3.0);
    CHECK(a.x.distance(b.x) <= 1e-10);
  }
}

TEST_CASE("logit limit lands near a support-enumeration equilibrium on 2x2 games") {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const StrategicGame u = random_form(rng, {2, 2}, 0, 1);
    const LogitLimit lim = nash_from_logit_limit(u, 200.0);
    const NashEnumeration ne = brute_force_nash(u);
    double best = 1.0;
    for (const auto& e : ne.equilibria) best = std::min(best, e.distance(lim.limit));
    CHECK(best <= 1e-2);
  }
}

TEST_CASE("logit_path returns a prefix on failure") {
  const StrategicGame u({2, 2}, {0.9, 0.2, 0.1, 0.6, 0.3, 0.4, 0.7, 0.8});
  LogitOptions tight;
  tight.max_fixed_point_iterations = 1;
  tight.max_newton_iterations = 0;
  tight.tolerance = -1.0;
  const std::vector<double> schedule{0.0, 1.0, 5.0};
  const auto path = logit_path(u, schedule, tight);
  CHECK(path.failure.has_value());
  CHECK(path.points.size() < schedule.size());
  REQUIRE(path.failed_at.has_value());
  CHECK(path.points.empty());
  CHECK(*path.failed_at == 0.0);
}

TEST_CASE("logit_path continues through folds in n") {
  // Several of these three-player games have a branch that turns back in n
  // before 200.
  Rng rng(3003);
  const std::vector<double> schedule = logit_schedule(200.0, 40);
  for (int rep = 0; rep < 200; ++rep) {
    const int players = 2 + static_cast<int>(rng.next() % 2);
    std::vector<int> counts;
    for (int i = 0; i < players; ++i) counts.push_back(2 + static_cast<int>(rng.next() % 2));
    const StrategicGame u = random_form(rng, counts, 0, 1);
    const LogitPath path = logit_path(u, schedule);
    CHECK_MESSAGE(!path.failure.has_value(), rep);
    REQUIRE(path.points.size() == schedule.size());
    for (const LogitPoint& p : path.points) CHECK(p.residual <= 1e-10);
  }
}
