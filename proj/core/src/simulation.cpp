#include "quitsolve/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "quitsolve/errors.hpp"
#include "quitsolve/rng.hpp"

namespace quitsolve {

SplitAction split_action(const MixedAction& x) {
  if (x.size() < 2) throw InvalidInput("a mixed action needs Q and at least one continue action");
  SplitAction s;
  s.quit = x[0];
  const double cont = 1.0 - x[0];
  if (cont > 0.0) {
    for (std::size_t k = 1; k < x.size(); ++k) s.alpha.push_back(x[k] / cont);
  } else {
    s.alpha.assign(x.size() - 1, 1.0 / static_cast<double>(x.size() - 1));
  }
  return s;
}

SignalThresholdStrategy::SignalThresholdStrategy(std::vector<Rule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw InvalidInput("a signal strategy needs at least one rule");
  for (const Rule& r : rules_) {
    if (!(r.lo >= 0.0 && r.lo < r.hi && r.hi <= 1.0)) throw InvalidInput("signal intervals must satisfy 0 <= lo < hi <= 1");
    split_.push_back(split_action(r.action));
  }
}

SplitAction SignalThresholdStrategy::act(const History& h) const {
  if (h.signals.empty()) throw InvalidInput("signal strategy called without a current signal");
  const double y = h.signals.back();
  for (std::size_t k = 0; k < rules_.size(); ++k) {
    const Rule& r = rules_[k];
    if (y >= r.lo && (y < r.hi || (r.hi == 1.0 && y <= 1.0))) return split_[k];
  }
  throw InvalidInput("no rule covers signal " + std::to_string(y));
}

LiftedStrategy::LiftedStrategy(std::shared_ptr<const GeneralQuittingGame> base,
                               std::shared_ptr<const PlayerStrategy> aux_strategy, MixedAction alpha)
    : base_(std::move(base)), aux_(std::move(aux_strategy)), alpha_(std::move(alpha)) {}

SplitAction LiftedStrategy::act(const History& h) const {
  const SplitAction a = aux_->act(project_history(*base_, h));
  return SplitAction{alpha_, a.quit};
}

StrategyProfile stationary_profile(const MixedProfile& x) {
  StrategyProfile out;
  for (std::size_t i = 0; i < x.players(); ++i) out.push_back(std::make_shared<StationaryStrategy>(x[i]));
  return out;
}

StrategyProfile lift_profile(const AuxiliaryQuittingGame& aux, const StrategyProfile& aux_profile) {
  if (aux_profile.size() != aux.players()) throw InvalidInput("profile has the wrong number of players");
  auto base = std::make_shared<const GeneralQuittingGame>(aux.base());
  StrategyProfile out;
  for (std::size_t i = 0; i < aux.players(); ++i) {
    out.push_back(std::make_shared<LiftedStrategy>(base, aux_profile[i], aux.alpha()[i]));
  }
  return out;
}

unsigned configured_threads() {
  unsigned n = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QUITSOLVE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

namespace {

struct RunOutcome {
  PayoffVector payoff;
  bool absorbed = false;
};

int pick(const MixedAction& alpha, double u) {
  double acc = 0.0;
  int last = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] <= 0.0) continue;
    last = static_cast<int>(k);
    acc += alpha[k];
    if (u < acc) return last;
  }
  return last;
}

RunOutcome run_once(const GeneralQuittingGame& g, const StrategyProfile& profile, const PayoffVector& q,
                    const SimulationOptions& options, std::uint64_t run) {
  const std::size_t players = g.players();
  Rng rng = Rng::for_stream(options.seed, run);
  History h;
  std::vector<int> actions(players);
  std::vector<MixedAction> alphas(players);
  for (std::size_t t = 0; t < options.horizon; ++t) {
    h.signals.push_back(rng.uniform());
    QuitMask mask = 0;
    for (std::size_t i = 0; i < players; ++i) {
      SplitAction s = profile[i]->act(h);
      if (s.alpha.size() != static_cast<std::size_t>(g.continue_count(i))) {
        throw InvalidInput("strategy of player " + std::to_string(i + 1) + " returned the wrong number of actions");
      }
      const double uq = rng.uniform();
      const double uc = rng.uniform();
      if (uq < s.quit) {
        actions[i] = GeneralQuittingGame::kQuit;
        mask |= QuitMask{1} << i;
      } else {
        actions[i] = 1 + pick(s.alpha, uc);
      }
      alphas[i] = std::move(s.alpha);
    }
    if (mask != 0) {
      PayoffVector u(players);
      if (options.estimator == PayoffEstimator::Realized) {
        const std::size_t idx = g.form().index(actions);
        for (std::size_t i = 0; i < players; ++i) u[i] = g.form().payoff(idx, i);
      } else {
        u = continue_mix_payoff(g, mask, alphas);
      }
      if (options.lambda) {
        // Stages 1..t pay q, then the absorbing payoff forever.
        const double w = std::pow(1.0 - *options.lambda, static_cast<double>(t));
        for (std::size_t i = 0; i < players; ++i) u[i] = (1.0 - w) * q[i] + w * u[i];
      }
      return {std::move(u), true};
    }
    h.actions.push_back(actions);
  }
  return {q, false};
}

}  // namespace

SimulationEstimate monte_carlo_payoff(const GeneralQuittingGame& g, const StrategyProfile& profile,
                                      const PayoffVector& q, const SimulationOptions& options) {
  const std::size_t players = g.players();
  if (profile.size() != players) throw InvalidInput("strategy profile has the wrong number of players");
  for (const auto& s : profile) {
    if (!s) throw InvalidInput("missing strategy");
  }
  if (q.size() != players) throw InvalidInput("q has the wrong number of players");
  if (options.horizon < 1 || options.runs < 1) throw InvalidInput("horizon and runs must be at least 1");
  if (options.lambda && !(*options.lambda > 0.0 && *options.lambda <= 1.0)) {
    throw InvalidInput("lambda must lie in (0,1]");
  }

  std::vector<RunOutcome> outcomes(options.runs);
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(options.threads ? options.threads : configured_threads(), options.runs));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) outcomes[r] = run_once(g, profile, q, options, r);
  };
  if (threads <= 1) {
    work(0, options.runs);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (options.runs + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(options.runs, t * chunk);
      const std::size_t end = std::min(options.runs, begin + chunk);
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  SimulationEstimate est;
  est.runs = options.runs;
  est.horizon = options.horizon;
  est.seed = options.seed;
  est.mean.assign(players, 0.0);
  est.standard_error.assign(players, 0.0);
  for (const RunOutcome& o : outcomes) {
    if (o.absorbed) ++est.absorbed_runs;
    for (std::size_t i = 0; i < players; ++i) est.mean[i] += o.payoff[i];
  }
  const auto runs = static_cast<double>(options.runs);
  for (double& m : est.mean) m /= runs;
  if (options.runs > 1) {
    for (const RunOutcome& o : outcomes) {
      for (std::size_t i = 0; i < players; ++i) {
        const double d = o.payoff[i] - est.mean[i];
        est.standard_error[i] += d * d;
      }
    }
    for (double& s : est.standard_error) s = std::sqrt(s / (runs - 1.0) / runs);
  }
  if (options.keep_runs) {
    for (RunOutcome& o : outcomes) est.per_run.push_back(std::move(o.payoff));
  }
  return est;
}

}  // namespace quitsolve
