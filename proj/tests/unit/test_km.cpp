#include <doctest.h>

#include <cmath>
#include <numeric>

#include "quitsolve/km.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

namespace {

std::vector<double> random_point(Rng& rng, int d, double lo, double hi) {
  std::vector<double> x(static_cast<std::size_t>(d));
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

// Water-filling level by bisection on the monotone mass function.
double level_by_bisection(const std::vector<double>& y) {
  double lo = *std::min_element(y.begin(), y.end()) - 2.0;
  double hi = *std::max_element(y.begin(), y.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double mass = 0.0;
    for (double v : y) mass += std::max(0.0, v - mid);
    (mass > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("decompose examples and invariants") {
  SUBCASE("constant game") {
    const StrategicGame u({2, 3}, std::vector<double>(12, 0.4));
    const auto d = decompose(u);
    for (const auto& t : d.tilde_u) {
      for (double v : t) CHECK(v == doctest::Approx(0.0));
    }
    for (const auto& b : d.bar_u) {
      for (double v : b) CHECK(v == doctest::Approx(0.4));
    }
  }
  SUBCASE("2x2 by hand") {
    // u_1 = [[1,0],[0,0]], u_2 = 0
    const StrategicGame u({2, 2}, {1, 0, 0, 0, 0, 0, 0, 0});
    const auto d = decompose(u);
    CHECK(d.bar_u[0] == std::vector<double>{0.5, 0.0});
    CHECK(d.tilde_u[0] == std::vector<double>{0.5, -0.5, 0.0, 0.0});
  }
  SUBCASE("random recomposition and zero means") {
    Rng rng(1);
    const StrategicGame u = random_form(rng, {2, 3, 2}, -1, 1);
    const auto d = decompose(u);
    for (std::size_t i = 0; i < 3; ++i) {
      std::vector<double> sums(static_cast<std::size_t>(u.actions(i)), 0.0);
      for (std::size_t k = 0; k < u.profile_count(); ++k) {
        const auto a = static_cast<std::size_t>(u.action_of(k, i));
        CHECK(std::abs(d.tilde_u[i][k] + d.bar_u[i][a] - u.payoff(k, i)) <= 1e-12);
        sums[a] += d.tilde_u[i][k];
      }
      for (double s : sums) CHECK(std::abs(s) <= 1e-12);
    }
  }
}

TEST_CASE("g_map examples") {
  for (int d = 1; d <= 5; ++d) {
    const std::vector<double> zero(static_cast<std::size_t>(d), 0.0);
    for (double v : g_map(7.0, zero)) CHECK(v == doctest::Approx(1.0 / d).epsilon(1e-15));
  }
  CHECK(g_map(3.0, std::vector<double>{2.5})[0] == doctest::Approx(3.5));
  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const auto x = random_point(rng, 5, -3, 3);
    const auto g = g_map(rng.uniform(0.5, 1000.0), x);
    double dist = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dist += (g[i] - x[i]) * (g[i] - x[i]);
    CHECK(std::accumulate(g.begin(), g.end(), 0.0) - std::accumulate(x.begin(), x.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::sqrt(dist) <= 1.0 + 1e-15);
    for (double v : g) CHECK(std::isfinite(v));
  }
}

TEST_CASE("g_jacobian matches finite differences and has the sign pattern") {
  CHECK(g_jacobian(4.0, std::vector<double>{0.3})(0, 0) == doctest::Approx(1.0));
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 2 + rep % 5;
    const double n = rng.uniform(0.5, 20.0);
    const auto x = random_point(rng, d, -1, 1);
    const Eigen::MatrixXd j = g_jacobian(n, x);
    const double h = 1e-6;
    for (int c = 0; c < d; ++c) {
      auto xp = x;
      auto xm = x;
      xp[static_cast<std::size_t>(c)] += h;
      xm[static_cast<std::size_t>(c)] -= h;
      const auto gp = g_map(n, xp);
      const auto gm = g_map(n, xm);
      for (int r = 0; r < d; ++r) {
        const double fd = (gp[static_cast<std::size_t>(r)] - gm[static_cast<std::size_t>(r)]) / (2 * h);
        CHECK(std::abs(fd - j(r, c)) <= 1e-6);
        if (r == c) CHECK(j(r, c) > 0.0);
        if (r != c) CHECK(j(r, c) < 0.0);
      }
      CHECK(std::abs(j.col(c).sum() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("h_n_inverse examples and round trip") {
  const std::vector<double> sym(4, 0.25);
  for (double v : h_n_inverse(10.0, sym)) CHECK(std::abs(v) <= 1e-12);
  CHECK(h_n_inverse(2.0, std::vector<double>{5.0})[0] == doctest::Approx(4.0));
  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 2 + rep % 5;
    const double n = std::vector<double>{1, 5, 10, 20}[static_cast<std::size_t>(rep % 4)];
    const auto x = random_point(rng, d, -3, 3);
    const auto back = h_n_inverse(n, g_map(n, x));
    CHECK(max_abs_diff(back, x) <= 1e-8);
  }
}

TEST_CASE("h_limit water filling") {
  SUBCASE("two coordinates by hand") {
    const WaterFilling w = h_limit(std::vector<double>{2.0, 0.0});
    CHECK(w.level == doctest::Approx(1.0));
    CHECK(w.h == std::vector<double>{1.0, 0.0});
    CHECK(w.excess[0] + w.excess[1] == doctest::Approx(1.0));
  }
  SUBCASE("one coordinate") {
    const WaterFilling w = h_limit(std::vector<double>{0.7});
    CHECK(w.level == doctest::Approx(-0.3));
    CHECK(w.h[0] == doctest::Approx(-0.3));
  }
  SUBCASE("equal coordinates") {
    const WaterFilling w = h_limit(std::vector<double>(5, 0.4));
    for (double v : w.h) CHECK(v == doctest::Approx(0.4 - 0.2));
  }
  SUBCASE("random: level matches bisection and excess is a probability vector") {
    Rng rng(5);
    for (int rep = 0; rep < 200; ++rep) {
      const auto y = random_point(rng, 1 + rep % 6, -2, 2);
      const WaterFilling w = h_limit(y);
      CHECK(w.level == doctest::Approx(level_by_bisection(y)).epsilon(1e-12));
      double mass = 0.0;
      for (double e : w.excess) {
        CHECK(e >= 0.0);
        mass += e;
      }
      CHECK(std::abs(mass - 1.0) <= 1e-12);
    }
  }
  SUBCASE("mass function strictly decreasing on its positive region") {
    Rng rng(6);
    const auto y = random_point(rng, 4, -2, 2);
    const double top = *std::max_element(y.begin(), y.end());
    double prev = std::numeric_limits<double>::infinity();
    for (double a = top - 3.0; a < top; a += 0.01) {
      double m = 0.0;
      for (double v : y) m += std::max(0.0, v - a);
      CHECK(m < prev);
      prev = m;
    }
  }
}

TEST_CASE("phi and phi_n") {
  SUBCASE("zero game at uniform") {
    const StrategicGame u = StrategicGame::zeros({2, 3});
    const MixedProfile x = MixedProfile::uniform(u.action_counts());
    const auto p = phi(u, x);
    CHECK(p.size() == 12 + 5);
    for (std::size_t k = 0; k < 12; ++k) CHECK(p[k] == 0.0);
    CHECK(p[12] == doctest::Approx(0.5));
    CHECK(p[14] == doctest::Approx(1.0 / 3));
  }
  SUBCASE("own constant shift moves only the z block") {
    Rng rng(7);
    const StrategicGame u = random_form(rng, {2, 2}, 0, 1);
    const MixedProfile x = random_profile(rng, {2, 2});
    const double c = rng.uniform(-1, 1);
    const auto a = phi(u, x);
    const auto b = phi(u.shifted(0, c), x);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-12);
    CHECK(std::abs(b[8] - a[8] - c) <= 1e-12);
    CHECK(std::abs(b[9] - a[9] - c) <= 1e-12);
    CHECK(std::abs(b[10] - a[10]) <= 1e-12);
  }
  SUBCASE("2x2 hand computation") {
    // u_1 = [[1,0],[0,1]], u_2 = [[0,1],[1,0]], x = ((0.25,0.75),(0.6,0.4))
    const StrategicGame u({2, 2}, {1, 0, 0, 1, 0, 1, 1, 0});
    const MixedProfile x = MixedProfile::make({{0.25, 0.75}, {0.6, 0.4}});
    const auto p = phi(u, x);
    CHECK(p[8] == doctest::Approx(0.6 + 0.25));
    CHECK(p[9] == doctest::Approx(0.4 + 0.75));
    CHECK(p[10] == doctest::Approx(0.75 + 0.6));
    CHECK(p[11] == doctest::Approx(0.25 + 0.4));
  }
  SUBCASE("phi_n softmax groups sum to one and constant games give uniform") {
    Rng rng(8);
    const StrategicGame u = random_form(rng, {2, 2}, 0, 1);
    const MixedProfile x = random_profile(rng, {2, 2});
    const auto p = phi_n(5.0, u, x);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto vals = u.action_values(i, x);
      CHECK(p[8 + 2 * i] - vals[0] + p[9 + 2 * i] - vals[1] == doctest::Approx(1.0));
    }
    const StrategicGame c({3, 2}, std::vector<double>(12, 0.3));
    const auto pc = phi_n(9.0, c, MixedProfile::uniform(c.action_counts()));
    CHECK(pc[12] == doctest::Approx(0.3 + 1.0 / 3));
    CHECK(pc[15] == doctest::Approx(0.3 + 0.5));
  }
}

TEST_CASE("softmax tail epsilon solves its defining equation") {
  for (double n : {1.0, 20.0, 50.0, 100.0}) {
    const double e = softmax_tail_epsilon(n);
    CHECK(std::abs(e - 1.0 / (1.0 + std::exp(e * n))) <= 1e-14);
  }
}

TEST_CASE("convergence report respects the bound") {
  const auto one = convergence_report(10.0, 1, 50, -2, 2, 1);
  CHECK(one.sup_deviation <= 1e-12);
  double prev = std::numeric_limits<double>::infinity();
  for (double n : {20.0, 40.0, 80.0}) {
    const auto r = convergence_report(n, 4, 200, -2, 2, 42);
    CHECK(r.sup_deviation <= r.bound);
    CHECK(r.sup_deviation <= prev);
    prev = r.sup_deviation;
  }
}
