#include "quitsolve/nash.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "quitsolve/errors.hpp"
#include "quitsolve/newton.hpp"
#include "quitsolve/rng.hpp"

namespace quitsolve {

namespace {

constexpr double kAcceptRegret = 1e-9;

std::vector<std::vector<int>> supports(int actions) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << actions); ++mask) {
    std::vector<int> s;
    for (int a = 0; a < actions; ++a) {
      if (mask & (1 << a)) s.push_back(a);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string describe(const std::vector<std::vector<int>>& supp) {
  std::ostringstream out;
  for (std::size_t i = 0; i < supp.size(); ++i) {
    out << (i ? " x " : "") << "{";
    for (std::size_t k = 0; k < supp[i].size(); ++k) out << (k ? "," : "") << supp[i][k];
    out << "}";
  }
  return out.str();
}

// Clips rounding noise, rejects clearly negative weights, renormalizes.
std::optional<MixedAction> to_mixed(int actions, const std::vector<int>& support, const Eigen::VectorXd& w) {
  MixedAction x(static_cast<std::size_t>(actions), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    double v = w(static_cast<Eigen::Index>(k));
    if (!std::isfinite(v) || v < -1e-10) return std::nullopt;
    v = std::max(v, 0.0);
    x[static_cast<std::size_t>(support[k])] = v;
    total += v;
  }
  if (!(total > 0.0)) return std::nullopt;
  for (double& v : x) v /= total;
  return x;
}

void add_if_new(NashEnumeration& out, const StrategicGame& u, MixedProfile x) {
  const std::vector<double> regret = best_response_regret(u, x);
  if (*std::max_element(regret.begin(), regret.end()) > kAcceptRegret) return;
  for (const MixedProfile& y : out.equilibria) {
    if (y.distance(x) <= 1e-9) return;
  }
  out.equilibria.push_back(std::move(x));
}

// Opponent j's weights on support sj make every action in si of player i
// equally good.
std::optional<MixedAction> indifference_weights(const StrategicGame& u, std::size_t i, std::size_t j,
                                                const std::vector<int>& si, const std::vector<int>& sj, bool& singular) {
  const auto m = static_cast<Eigen::Index>(si.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + 1, m + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  std::vector<int> prof(2);
  for (Eigen::Index r = 0; r < m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      prof[i] = si[static_cast<std::size_t>(r)];
      prof[j] = sj[static_cast<std::size_t>(c)];
      a(r, c) = u.payoff(u.index(prof), i);
    }
    a(r, m) = -1.0;
  }
  a.row(m).head(m).setOnes();
  b(m) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    singular = true;
    return std::nullopt;
  }
  const Eigen::VectorXd sol = lu.solve(b);
  return to_mixed(u.actions(j), sj, sol.head(m));
}

void enumerate_two(const StrategicGame& u, NashEnumeration& out) {
  const auto s0 = supports(u.actions(0));
  const auto s1 = supports(u.actions(1));
  for (const auto& a : s0) {
    for (const auto& b : s1) {
      if (a.size() != b.size()) continue;
      bool singular = false;
      const auto y = indifference_weights(u, 0, 1, a, b, singular);
      const auto x = indifference_weights(u, 1, 0, b, a, singular);
      if (singular) {
        out.degenerate_supports.push_back(describe({a, b}));
        continue;
      }
      if (x && y) add_if_new(out, u, MixedProfile::make({*x, *y}));
    }
  }
}

void enumerate_three(const StrategicGame& u, NashEnumeration& out) {
  const std::array<std::vector<std::vector<int>>, 3> all = {supports(u.actions(0)), supports(u.actions(1)),
                                                            supports(u.actions(2))};
  for (const auto& a : all[0]) {
    for (const auto& b : all[1]) {
      for (const auto& c : all[2]) {
        const std::array<const std::vector<int>*, 3> supp = {&a, &b, &c};
        std::array<std::size_t, 3> offset{};
        std::size_t dim = 0;
        for (std::size_t i = 0; i < 3; ++i) {
          offset[i] = dim;
          dim += supp[i]->size();
        }
        // Unknowns: weights on each support, then one value per player.
        auto profile_of = [&](const Eigen::VectorXd& w) {
          std::vector<MixedAction> xs;
          for (std::size_t i = 0; i < 3; ++i) {
            MixedAction x(static_cast<std::size_t>(u.actions(i)), 0.0);
            for (std::size_t k = 0; k < supp[i]->size(); ++k) {
              x[static_cast<std::size_t>((*supp[i])[k])] = w(static_cast<Eigen::Index>(offset[i] + k));
            }
            xs.push_back(std::move(x));
          }
          return MixedProfile::unchecked(std::move(xs));
        };
        auto f = [&](const Eigen::VectorXd& w) {
          Eigen::VectorXd r(w.size());
          const MixedProfile x = profile_of(w);
          for (std::size_t i = 0; i < 3; ++i) {
            const std::vector<double> v = u.action_values(i, x);
            double total = 0.0;
            for (std::size_t k = 0; k < supp[i]->size(); ++k) {
              r(static_cast<Eigen::Index>(offset[i] + k)) =
                  v[static_cast<std::size_t>((*supp[i])[k])] - w(static_cast<Eigen::Index>(dim + i));
              total += w(static_cast<Eigen::Index>(offset[i] + k));
            }
            r(static_cast<Eigen::Index>(dim + i)) = total - 1.0;
          }
          return r;
        };
        Rng rng(0x5eed0000ULL + out.equilibria.size() + dim);
        for (int start = 0; start < 8; ++start) {
          Eigen::VectorXd w0(static_cast<Eigen::Index>(dim + 3));
          for (std::size_t i = 0; i < 3; ++i) {
            double total = 0.0;
            for (std::size_t k = 0; k < supp[i]->size(); ++k) {
              const double v = start == 0 ? 1.0 : rng.uniform(0.05, 1.0);
              w0(static_cast<Eigen::Index>(offset[i] + k)) = v;
              total += v;
            }
            for (std::size_t k = 0; k < supp[i]->size(); ++k) w0(static_cast<Eigen::Index>(offset[i] + k)) /= total;
          }
          const MixedProfile x0 = profile_of(w0);
          for (std::size_t i = 0; i < 3; ++i) {
            const std::vector<double> v = u.action_values(i, x0);
            w0(static_cast<Eigen::Index>(dim + i)) = v[static_cast<std::size_t>((*supp[i])[0])];
          }
          NewtonOptions opts;
          opts.tolerance = 1e-13;
          opts.max_iterations = 40;
          const NewtonResult r = newton_solve(f, w0, opts);
          if (!r.converged) continue;
          std::vector<MixedAction> xs;
          bool ok = true;
          for (std::size_t i = 0; i < 3 && ok; ++i) {
            const auto x = to_mixed(u.actions(i), *supp[i], r.x.segment(static_cast<Eigen::Index>(offset[i]),
                                                                         static_cast<Eigen::Index>(supp[i]->size())));
            if (!x) ok = false;
            else xs.push_back(*x);
          }
          if (ok) add_if_new(out, u, MixedProfile::make(std::move(xs)));
        }
      }
    }
  }
}

}  // namespace

NashEnumeration brute_force_nash(const StrategicGame& u) {
  const std::size_t players = u.players();
  if (players < 1 || players > 3) throw InvalidInput("support enumeration handles 1 to 3 players");
  for (int a : u.action_counts()) {
    if (a > 3) throw InvalidInput("support enumeration handles at most 3 actions per player");
  }
  NashEnumeration out;
  if (players == 1) {
    for (int a = 0; a < u.actions(0); ++a) add_if_new(out, u, MixedProfile::pure(u.action_counts(), std::vector<int>{a}));
  } else if (players == 2) {
    enumerate_two(u, out);
  } else {
    enumerate_three(u, out);
  }
  return out;
}

}  // namespace quitsolve
