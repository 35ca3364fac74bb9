#include <benchmark/benchmark.h>

#include <vector>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/equilibrium_path.hpp"
#include "quitsolve/km.hpp"
#include "quitsolve/logit.hpp"
#include "quitsolve/rng.hpp"
#include "quitsolve/simulation.hpp"

using namespace quitsolve;

namespace {

StrategicGame random_game(std::uint64_t seed, std::vector<int> counts) {
  Rng rng(seed);
  std::size_t profiles = 1;
  for (int c : counts) profiles *= static_cast<std::size_t>(c);
  std::vector<double> payoffs(profiles * counts.size());
  for (double& v : payoffs) v = rng.uniform();
  return StrategicGame(std::move(counts), std::move(payoffs));
}

GeneralQuittingGame recursive_game(std::uint64_t seed, std::vector<int> counts) {
  StrategicGame form = random_game(seed, std::move(counts));
  for (std::size_t k = 0; k < form.profile_count(); ++k) {
    bool absorbing = false;
    for (std::size_t i = 0; i < form.players(); ++i) absorbing |= form.action_of(k, i) == 0;
    if (!absorbing)
      for (std::size_t i = 0; i < form.players(); ++i) form.set_payoff(k, i, 0.0);
  }
  return GeneralQuittingGame::from_form(std::move(form));
}

void BM_h_n_inverse(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (double& v : y) v = rng.uniform(-2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(h_n_inverse(50.0, y));
}
BENCHMARK(BM_h_n_inverse)->Arg(2)->Arg(4)->Arg(6);

void BM_logit_fixed_point(benchmark::State& state) {
  const StrategicGame u = random_game(2, {3, 3, 3});
  for (auto _ : state) benchmark::DoNotOptimize(logit_fixed_point(u, 5.0));
}
BENCHMARK(BM_logit_fixed_point);

void BM_logit_limit(benchmark::State& state) {
  const StrategicGame u = random_game(3, {2, 3, 3});
  for (auto _ : state) benchmark::DoNotOptimize(nash_from_logit_limit(u, 200.0));
}
BENCHMARK(BM_logit_limit)->Unit(benchmark::kMillisecond);

void BM_stationary_equilibrium(benchmark::State& state) {
  const GeneralQuittingGame g = recursive_game(4, {3, 2, 2});
  const std::vector<MixedAction> alpha{{0.4, 0.6}, {1.0}, {1.0}};
  for (auto _ : state)
    benchmark::DoNotOptimize(discounted_stationary_equilibrium(g, alpha, {0, 0, 0}, 0.01, 50.0));
}
BENCHMARK(BM_stationary_equilibrium);

void BM_monte_carlo(benchmark::State& state) {
  const GeneralQuittingGame g = recursive_game(5, {3, 2, 2});
  const MixedProfile x = MixedProfile::make({{0.1, 0.5, 0.4}, {0.05, 0.95}, {0.2, 0.8}});
  SimulationOptions o;
  o.runs = static_cast<std::size_t>(state.range(0));
  o.horizon = 200;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_payoff(g, stationary_profile(x), {0, 0, 0}, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_monte_carlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
