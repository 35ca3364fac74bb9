#include "quitsolve/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "quitsolve/errors.hpp"

namespace quitsolve {

MixedProfile logit_response(const StrategicGame& u, double n, const MixedProfile& x) {
  std::vector<MixedAction> out(u.players());
  for (std::size_t i = 0; i < u.players(); ++i) out[i] = softmax(n, u.action_values(i, x));
  return MixedProfile::unchecked(std::move(out));
}

double logit_residual(const StrategicGame& u, double n, const MixedProfile& x) {
  return x.distance(logit_response(u, n, x));
}

namespace {

struct Layout {
  std::vector<std::size_t> offset;
  std::size_t size = 0;
  explicit Layout(const StrategicGame& u) {
    for (std::size_t i = 0; i < u.players(); ++i) {
      offset.push_back(size);
      size += static_cast<std::size_t>(u.actions(i));
    }
  }
};

MixedProfile from_logs(const StrategicGame& u, const Layout& layout, const Eigen::VectorXd& w) {
  std::vector<MixedAction> x(u.players());
  for (std::size_t i = 0; i < u.players(); ++i) {
    x[i].resize(static_cast<std::size_t>(u.actions(i)));
    for (std::size_t a = 0; a < x[i].size(); ++a) x[i][a] = std::exp(w(static_cast<Eigen::Index>(layout.offset[i] + a)));
  }
  return MixedProfile::unchecked(std::move(x));
}

Eigen::VectorXd to_logs(const Layout& layout, const MixedProfile& x) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(layout.size));
  for (std::size_t i = 0; i < x.players(); ++i)
    for (std::size_t a = 0; a < x[i].size(); ++a)
      w(static_cast<Eigen::Index>(layout.offset[i] + a)) = std::log(std::max(x[i][a], 1e-300));
  return w;
}

// F(w) = w - log softmax(n U(exp w)).
Eigen::VectorXd log_system(const StrategicGame& u, const Layout& layout, double n, const Eigen::VectorXd& w,
                           std::vector<std::vector<double>>* responses = nullptr) {
  const auto x = from_logs(u, layout, w);
  Eigen::VectorXd f(w.size());
  if (responses) responses->resize(u.players());
  for (std::size_t i = 0; i < u.players(); ++i) {
    const auto values = u.action_values(i, x);
    const double top = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(n * (v - top));
    const double lse = n * top + std::log(sum);
    for (std::size_t a = 0; a < values.size(); ++a) {
      const auto k = static_cast<Eigen::Index>(layout.offset[i] + a);
      f(k) = w(k) - (n * values[a] - lse);
    }
    if (responses) (*responses)[i] = softmax(n, values);
  }
  return f;
}

Eigen::MatrixXd log_jacobian(const StrategicGame& u, const Layout& layout, double n, const Eigen::VectorXd& w,
                             const std::vector<std::vector<double>>& sigma) {
  const auto x = from_logs(u, layout, w);
  const auto d = static_cast<Eigen::Index>(layout.size);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(d, d);
  for (std::size_t i = 0; i < u.players(); ++i) {
    const auto ai = static_cast<std::size_t>(u.actions(i));
    for (std::size_t j = 0; j < u.players(); ++j) {
      if (j == i) continue;
      const auto aj = static_cast<std::size_t>(u.actions(j));
      const auto pv = u.pair_values(i, j, x);
      for (std::size_t b = 0; b < aj; ++b) {
        double mean = 0.0;
        for (std::size_t c = 0; c < ai; ++c) mean += sigma[i][c] * pv[c * aj + b];
        for (std::size_t a = 0; a < ai; ++a) {
          jac(static_cast<Eigen::Index>(layout.offset[i] + a), static_cast<Eigen::Index>(layout.offset[j] + b)) =
              -n * (pv[a * aj + b] - mean) * x[j][b];
        }
      }
    }
  }
  return jac;
}

// Newton on the log system; returns the final iterate (callers check the
// probability residual).
MixedProfile newton_polish(const StrategicGame& u, double n, const MixedProfile& start, int max_iterations) {
  const Layout layout(u);
  Eigen::VectorXd w = to_logs(layout, start);
  std::vector<std::vector<double>> sigma;
  Eigen::VectorXd f = log_system(u, layout, n, w, &sigma);
  double merit = f.squaredNorm();
  for (int it = 0; it < max_iterations && f.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
    const Eigen::MatrixXd jac = log_jacobian(u, layout, n, w, sigma);
    const Eigen::VectorXd step = jac.partialPivLu().solve(-f);
    if (!step.allFinite()) break;
    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      const Eigen::VectorXd trial = w + t * step;
      std::vector<std::vector<double>> trial_sigma;
      const Eigen::VectorXd ft = log_system(u, layout, n, trial, &trial_sigma);
      if (!ft.allFinite()) continue;
      if (ft.squaredNorm() < merit) {
        w = trial;
        f = ft;
        sigma = std::move(trial_sigma);
        merit = f.squaredNorm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return from_logs(u, layout, w);
}

MixedProfile normalized(const MixedProfile& x) {
  std::vector<MixedAction> out = x.actions();
  for (auto& a : out) {
    double s = 0.0;
    for (double v : a) s += v;
    for (double& v : a) v /= s;
  }
  return MixedProfile::unchecked(std::move(out));
}

// dF/dn of the log system: sum_c sigma_c v_c - v_a.
Eigen::VectorXd log_system_dn(const StrategicGame& u, const Layout& layout, const Eigen::VectorXd& w,
                              const std::vector<std::vector<double>>& sigma) {
  const auto x = from_logs(u, layout, w);
  Eigen::VectorXd d(w.size());
  for (std::size_t i = 0; i < u.players(); ++i) {
    const auto values = u.action_values(i, x);
    double mean = 0.0;
    for (std::size_t a = 0; a < values.size(); ++a) mean += sigma[i][a] * values[a];
    for (std::size_t a = 0; a < values.size(); ++a) d(static_cast<Eigen::Index>(layout.offset[i] + a)) = mean - values[a];
  }
  return d;
}

// Pseudo-arclength continuation of the branch through `from` in (log x, n),
// for when the branch folds back in n. Stops at the first crossing of
// n = target and returns a start point for the solve there.
std::optional<MixedProfile> trace_through_fold(const StrategicGame& u, const LogitPoint& from, double target) {
  const Layout layout(u);
  const auto d = static_cast<Eigen::Index>(layout.size);
  Eigen::VectorXd y(d + 1);
  y.head(d) = to_logs(layout, from.x);
  y(d) = from.n;

  Eigen::VectorXd f;
  auto augmented = [&](const Eigen::VectorXd& at) {
    std::vector<std::vector<double>> sigma;
    f = log_system(u, layout, at(d), at.head(d), &sigma);
    Eigen::MatrixXd m(d + 1, d + 1);
    m.topLeftCorner(d, d) = log_jacobian(u, layout, at(d), at.head(d), sigma);
    m.topRightCorner(d, 1) = log_system_dn(u, layout, at.head(d), sigma);
    m.row(d).setZero();
    return m;
  };

  const Eigen::MatrixXd m = augmented(y);
  Eigen::VectorXd tangent(d + 1);
  tangent.head(d) = m.topLeftCorner(d, d).partialPivLu().solve(-m.topRightCorner(d, 1));
  tangent(d) = 1.0;
  if (!tangent.allFinite()) return std::nullopt;
  tangent.normalize();

  double h = 0.05;
  for (int step = 0; step < 20000; ++step) {
    if (h < 1e-10) return std::nullopt;
    const Eigen::VectorXd predicted = y + h * tangent;
    Eigen::VectorXd z = predicted;
    bool converged = false;
    for (int it = 0; it < 12; ++it) {
      Eigen::MatrixXd a = augmented(z);
      if (!f.allFinite()) break;
      if (f.lpNorm<Eigen::Infinity>() <= 1e-12) {
        converged = true;
        break;
      }
      a.row(d) = tangent.transpose();
      Eigen::VectorXd rhs(d + 1);
      rhs.head(d) = -f;
      rhs(d) = -tangent.dot(z - predicted);
      const Eigen::VectorXd delta = a.partialPivLu().solve(rhs);
      if (!delta.allFinite()) break;
      z += delta;
    }
    if (!converged || (z - y).norm() > 4.0 * h) {
      h *= 0.5;
      continue;
    }
    Eigen::MatrixXd a = augmented(z);
    a.row(d) = tangent.transpose();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d + 1);
    e(d) = 1.0;
    Eigen::VectorXd next = a.partialPivLu().solve(e);
    if (!next.allFinite()) return std::nullopt;
    next.normalize();
    if (z(d) >= target) {
      const double s = (target - y(d)) / (z(d) - y(d));
      const Eigen::VectorXd w = y.head(d) + s * (z.head(d) - y.head(d));
      return normalized(from_logs(u, layout, w));
    }
    y = z;
    tangent = next;
    h = std::min(1.5 * h, 2.0);
  }
  return std::nullopt;
}

}  // namespace

LogitPoint logit_fixed_point(const StrategicGame& u, double n, const std::optional<MixedProfile>& x0,
                             const LogitOptions& options) {
  if (!(n >= 0.0) || !std::isfinite(n)) throw InvalidInput("logit sharpness n must be finite and nonnegative");
  MixedProfile x = x0 ? normalized(*x0) : MixedProfile::uniform(u.action_counts());
  if (x.players() != u.players()) throw InvalidInput("start profile has the wrong number of players");

  double res = logit_residual(u, n, x);
  double tau = 1.0;
  int plateau = 0;
  for (int it = 0; it < options.max_fixed_point_iterations && res > options.tolerance; ++it) {
    const auto r = logit_response(u, n, x);
    std::vector<MixedAction> cand = x.actions();
    for (std::size_t i = 0; i < cand.size(); ++i)
      for (std::size_t a = 0; a < cand[i].size(); ++a) cand[i][a] = (1.0 - tau) * cand[i][a] + tau * r[i][a];
    auto candidate = MixedProfile::unchecked(std::move(cand));
    const double cres = logit_residual(u, n, candidate);
    if (cres < res) {
      plateau = cres > 0.9 * res ? plateau + 1 : 0;
      x = std::move(candidate);
      res = cres;
      tau = std::min(1.0, 1.5 * tau);
      if (plateau > 8) break;
    } else {
      tau *= 0.5;
      if (tau < 1e-3) break;
    }
  }
  if (res > options.tolerance) {
    x = normalized(newton_polish(u, n, x, options.max_newton_iterations));
  }
  // Report the response of the final iterate: it is exactly a softmax, so
  // every probability is positive and the floor bound holds by construction.
  x = logit_response(u, n, x);
  res = logit_residual(u, n, x);
  if (!(res <= options.tolerance))
    throw ConvergenceFailure("logit_fixed_point: residual " + std::to_string(res) + " at n = " + std::to_string(n));
  return LogitPoint{n, std::move(x), res};
}

namespace {

std::optional<LogitPoint> try_solve(const StrategicGame& u, double n, const MixedProfile& start,
                                    const LogitOptions& options) {
  try {
    return logit_fixed_point(u, n, start, options);
  } catch (const ConvergenceFailure&) {
    return std::nullopt;
  }
}

MixedProfile extrapolate(const LogitPoint& older, const LogitPoint& newer, double n) {
  if (newer.n == older.n) return newer.x;
  const double t = (n - newer.n) / (newer.n - older.n);
  std::vector<MixedAction> out = newer.x.actions();
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (std::size_t a = 0; a < out[i].size(); ++a) {
      const double lw = std::log(newer.x[i][a]) + t * (std::log(newer.x[i][a]) - std::log(older.x[i][a]));
      out[i][a] = std::exp(std::clamp(lw, -700.0, 0.0));
      s += out[i][a];
    }
    for (double& v : out[i]) v /= s;
  }
  return MixedProfile::unchecked(std::move(out));
}

}  // namespace

LogitPath logit_path(const StrategicGame& u, std::span<const double> schedule, const LogitOptions& options) {
  LogitPath path;
  if (schedule.empty()) return path;
  if (schedule.front() > 1.0) throw InvalidInput("logit path schedule must start at n <= 1");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k - 1])) throw InvalidInput("logit path schedule must be increasing");

  std::optional<LogitPoint> older;
  std::optional<LogitPoint> newer;
  for (double target : schedule) {
    if (!newer) {
      auto first = try_solve(u, target, MixedProfile::uniform(u.action_counts()), options);
      if (!first) {
        path.failure = "no O_n-equilibrium found at the first schedule value";
        path.failed_at = target;
        return path;
      }
      newer = std::move(first);
      path.points.push_back(*newer);
      continue;
    }
    // Walk towards the target, halving the step on failure.
    double reached = newer->n;
    double step = target - reached;
    int halvings = 0;
    int attempts = 0;
    while (reached < target) {
      if (++attempts > 400) {
        path.failure = "continuation budget exhausted at n = " + std::to_string(reached);
        path.failed_at = target;
        return path;
      }
      const double n = std::min(target, reached + step);
      const auto start = older ? extrapolate(*older, *newer, n) : newer->x;
      auto next = try_solve(u, n, start, options);
      if (!next) next = try_solve(u, n, newer->x, options);
      if (!next) {
        step *= 0.5;
        if (++halvings > 30) {
          if (auto through = trace_through_fold(u, *newer, target)) {
            if (auto landed = try_solve(u, target, *through, options)) {
              older.reset();
              newer = std::move(landed);
              reached = target;
              continue;
            }
          }
          path.failure = "continuation stalled at n = " + std::to_string(reached);
          path.failed_at = target;
          return path;
        }
        continue;
      }
      older = std::move(newer);
      newer = std::move(next);
      reached = n;
      step *= 2.0;
    }
    path.step_distances.push_back(path.points.back().x.distance(newer->x));
    path.points.push_back(*newer);
  }
  return path;
}

std::vector<double> logit_schedule(double n_max, int steps) {
  std::vector<double> out{0.0};
  if (n_max <= 0.0) return out;
  if (n_max <= 1.0 || steps < 2) {
    out.push_back(n_max);
    return out;
  }
  const double ratio = std::pow(n_max, 1.0 / static_cast<double>(steps - 1));
  double n = 1.0;
  for (int k = 0; k < steps; ++k) {
    out.push_back(k + 1 == steps ? n_max : n);
    n *= ratio;
  }
  return out;
}

namespace {

// x(n2) + (x(n2) - x(n1)) n1 / (n2 - n1) removes the 1/n term, clipped back
// onto the simplex.
MixedProfile richardson(const LogitPoint& a, const LogitPoint& b) {
  const double c = a.n / (b.n - a.n);
  std::vector<MixedAction> xs;
  for (std::size_t i = 0; i < b.x.players(); ++i) {
    MixedAction m(b.x[i].size());
    double total = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      m[k] = std::max(0.0, b.x[i][k] + c * (b.x[i][k] - a.x[i][k]));
      total += m[k];
    }
    for (double& v : m) v /= total;
    xs.push_back(std::move(m));
  }
  return MixedProfile::unchecked(std::move(xs));
}

}  // namespace

LogitLimit nash_from_logit_limit(const StrategicGame& u, double n_max, int steps, const LogitOptions& options) {
  std::vector<double> schedule = logit_schedule(n_max, steps);
  const std::size_t at_max = schedule.size() - 1;
  if (n_max > 0.0) {
    const double ratio = std::pow(kLimitExtension, 1.0 / kLimitExtensionSteps);
    for (int k = 1; k <= kLimitExtensionSteps; ++k) schedule.push_back(n_max * std::pow(ratio, k));
  }
  const LogitPath path = logit_path(u, schedule, options);
  std::optional<LogitPoint> terminal;
  if (path.points.size() > at_max) {
    terminal = path.points[at_max];
  } else {
    // Past a fold the continuation gave up; any O_n point at n_max serves.
    if (!path.points.empty()) terminal = try_solve(u, n_max, path.points.back().x, options);
    if (!terminal) terminal = try_solve(u, n_max, MixedProfile::uniform(u.action_counts()), options);
  }
  if (!terminal) throw ConvergenceFailure("nash_from_logit_limit: no O_n-equilibrium at n_max");
  LogitLimit out{*terminal, best_response_regret(u, terminal->x), terminal->x};
  const std::size_t m = path.points.size();
  if (m > at_max + 1) out.limit = richardson(path.points[m - 2], path.points[m - 1]);
  return out;
}

}  // namespace quitsolve
