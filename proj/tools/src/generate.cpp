#include "quitsolve/cli.hpp"

#include "quitsolve/errors.hpp"
#include "quitsolve/rng.hpp"

namespace quitsolve::cli {

GeneralQuittingGame generate_instance(const GenerateSpec& spec) {
  const std::size_t players = spec.continue_counts.size();
  if (players < 1 || players > 5) throw InvalidInput("generate: between 1 and 5 players");
  std::vector<int> counts;
  for (int k : spec.continue_counts) {
    if (k < 1 || k > 3) throw InvalidInput("generate: between 1 and 3 continue actions per player");
    counts.push_back(k + 1);
  }
  Rng rng(spec.seed);
  StrategicGame form = StrategicGame::zeros(counts);
  const double lo = spec.positive ? 0.0 : -1.0;
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    bool absorbing = false;
    for (std::size_t i = 0; i < players; ++i) absorbing = absorbing || form.action_of(idx, i) == 0;
    for (std::size_t i = 0; i < players; ++i) {
      const double u = rng.uniform(lo, 1.0);
      if (absorbing || !spec.recursive) form.set_payoff(idx, i, u);
    }
  }
  return GeneralQuittingGame::from_form(std::move(form));
}

}  // namespace quitsolve::cli
