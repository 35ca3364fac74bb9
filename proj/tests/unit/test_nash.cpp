#include <doctest.h>

#include "quitsolve/nash.hpp"
#include "support.hpp"

using namespace quitsolve;
using namespace qs_test;

namespace {

bool contains(const NashEnumeration& ne, const MixedProfile& x) {
  for (const auto& e : ne.equilibria) {
    if (e.distance(x) <= 1e-9) return true;
  }
  return false;
}

double max_regret(const StrategicGame& u, const MixedProfile& x) {
  double m = 0.0;
  for (double r : best_response_regret(u, x)) m = std::max(m, r);
  return m;
}

}  // namespace

TEST_CASE("2x2 coordination game has two pure and one mixed equilibrium") {
  const StrategicGame u({2, 2}, {1, 1, 0, 0, 0, 0, 1, 1});
  const NashEnumeration ne = brute_force_nash(u);
  CHECK(ne.equilibria.size() == 3);
  CHECK(contains(ne, MixedProfile::make({{1, 0}, {1, 0}})));
  CHECK(contains(ne, MixedProfile::make({{0, 1}, {0, 1}})));
  CHECK(contains(ne, MixedProfile::make({{0.5, 0.5}, {0.5, 0.5}})));
}

TEST_CASE("dominant-strategy game has a unique pure equilibrium") {
  const StrategicGame u({2, 2}, {0.9, 0.8, 0.7, 0.3, 0.2, 0.6, 0.1, 0.1});
  const NashEnumeration ne = brute_force_nash(u);
  REQUIRE(ne.equilibria.size() == 1);
  CHECK(ne.equilibria[0].distance(MixedProfile::make({{1, 0}, {1, 0}})) <= 1e-12);
}

TEST_CASE("matching pennies equilibrium") {
  const StrategicGame u({2, 2}, {1, 0, 0, 1, 0, 1, 1, 0});
  const NashEnumeration ne = brute_force_nash(u);
  REQUIRE(ne.equilibria.size() == 1);
  CHECK(ne.equilibria[0][0][0] == doctest::Approx(0.5));
}

TEST_CASE("every enumerated profile is an equilibrium on random games") {
  Rng rng(1);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<int> counts;
    const int players = 2 + rep % 2;
    for (int i = 0; i < players; ++i) counts.push_back(2 + static_cast<int>(rng.next() % 2));
    const StrategicGame u = random_form(rng, counts, 0, 1);
    const NashEnumeration ne = brute_force_nash(u);
    CHECK_FALSE(ne.equilibria.empty());
    for (const auto& e : ne.equilibria) CHECK(max_regret(u, e) <= 1e-9);
  }
}

TEST_CASE("degenerate supports are reported") {
  // Player 2 is indifferent everywhere.
  const StrategicGame u({2, 2}, {1, 0, 1, 0, 0, 0, 0, 0});
  const NashEnumeration ne = brute_force_nash(u);
  CHECK_FALSE(ne.degenerate_supports.empty());
  for (const auto& e : ne.equilibria) CHECK(max_regret(u, e) <= 1e-9);
}
