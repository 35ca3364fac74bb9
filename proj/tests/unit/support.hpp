#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "quitsolve/quitting_game.hpp"
#include "quitsolve/rng.hpp"
#include "quitsolve/strategic_game.hpp"

namespace qs_test {

using namespace quitsolve;

inline StrategicGame random_form(Rng& rng, std::vector<int> counts, double lo, double hi) {
  std::size_t profiles = 1;
  for (int c : counts) profiles *= static_cast<std::size_t>(c);
  std::vector<double> payoffs(profiles * counts.size());
  for (double& v : payoffs) v = rng.uniform(lo, hi);
  return StrategicGame(std::move(counts), std::move(payoffs));
}

// Quitting game with `continues[i]` continue actions per player; nonabsorbing
// entries zeroed when recursive.
inline GeneralQuittingGame random_quitting(Rng& rng, const std::vector<int>& continues, double lo, double hi,
                                           bool recursive) {
  std::vector<int> counts;
  for (int c : continues) counts.push_back(c + 1);
  StrategicGame form = random_form(rng, counts, lo, hi);
  if (recursive) {
    for (std::size_t k = 0; k < form.profile_count(); ++k) {
      bool absorbing = false;
      for (std::size_t i = 0; i < form.players(); ++i) absorbing |= form.action_of(k, i) == 0;
      if (!absorbing) {
        for (std::size_t i = 0; i < form.players(); ++i) form.set_payoff(k, i, 0.0);
      }
    }
  }
  return GeneralQuittingGame::from_form(std::move(form));
}

inline MixedAction random_simplex(Rng& rng, int k) {
  MixedAction a(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& v : a) {
    v = -std::log(1.0 - rng.uniform());
    sum += v;
  }
  for (double& v : a) v /= sum;
  return a;
}

inline MixedProfile random_profile(Rng& rng, const std::vector<int>& counts) {
  std::vector<MixedAction> xs;
  for (int c : counts) xs.push_back(random_simplex(rng, c));
  return MixedProfile::make(std::move(xs));
}

// Probability of a pure profile under x, by direct product.
inline double profile_probability(const StrategicGame& form, const MixedProfile& x, std::size_t k) {
  double p = 1.0;
  for (std::size_t i = 0; i < form.players(); ++i) p *= x[i][static_cast<std::size_t>(form.action_of(k, i))];
  return p;
}

struct Enumerated {
  double p = 0.0;
  std::vector<double> mass;  // sum over absorbing profiles of prob * u
};

// Absorption probability and absorbing mass by summing over every pure
// profile; independent of the library's expm1 / product formulas.
inline Enumerated enumerate_absorption(const GeneralQuittingGame& g, const MixedProfile& x) {
  const StrategicGame& form = g.form();
  Enumerated e;
  e.mass.assign(g.players(), 0.0);
  for (std::size_t k = 0; k < form.profile_count(); ++k) {
    bool absorbing = false;
    for (std::size_t i = 0; i < form.players(); ++i) absorbing |= form.action_of(k, i) == 0;
    if (!absorbing) continue;
    const double pr = profile_probability(form, x, k);
    e.p += pr;
    for (std::size_t i = 0; i < g.players(); ++i) e.mass[i] += pr * form.payoff(k, i);
  }
  return e;
}

// Discounted value by summing the truncated geometric series stage by stage.
inline std::vector<double> series_value(const GeneralQuittingGame& g, const MixedProfile& x, double lambda,
                                        const std::vector<double>& q, int stages = 20000) {
  const Enumerated e = enumerate_absorption(g, x);
  std::vector<double> v(g.players(), 0.0);
  double alive = 1.0;
  double weight = lambda;
  for (int t = 0; t < stages; ++t) {
    // Stage payoff: absorbed earlier pays ubar; this stage's absorption pays ubar too.
    for (std::size_t i = 0; i < g.players(); ++i) {
      const double absorbed_before = 1.0 - alive;
      const double ubar = e.p > 0.0 ? e.mass[i] / e.p : 0.0;
      v[i] += weight * (absorbed_before * ubar + alive * e.p * ubar + alive * (1.0 - e.p) * q[i]);
    }
    alive *= 1.0 - e.p;
    weight *= 1.0 - lambda;
  }
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace qs_test
