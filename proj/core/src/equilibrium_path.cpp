#include "quitsolve/equilibrium_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/errors.hpp"
#include "quitsolve/newton.hpp"
#include "quitsolve/rng.hpp"

namespace quitsolve {

namespace {

constexpr double kLogitTolerance = 1e-10;
constexpr double kExactTolerance = 1e-8;

double sigma(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidInput("lambda must lie in (0,1]");
}

void require_n(double n) {
  if (!(n >= 0.0) || !std::isfinite(n)) throw InvalidInput("n must be finite and nonnegative");
}

// The one-shot game y_lambda(alpha, .) for fixed (alpha, q, lambda). Absorbing
// entries u(alpha_J, Q_{-J}) are tabulated by quit mask; the continuation
// value is computed from the same table. alpha is not validated, so the
// system can be evaluated slightly outside the simplex by finite differences.
class OneShot {
 public:
  OneShot(const GeneralQuittingGame& g, std::vector<MixedAction> alpha, PayoffVector q, double lambda)
      : alpha_(std::move(alpha)), q_(std::move(q)), lambda_(lambda), players_(g.players()) {
    const QuitMask masks = QuitMask{1} << players_;
    table_.reserve(masks);
    table_.push_back(q_);
    for (QuitMask m = 1; m < masks; ++m) table_.push_back(continue_mix_payoff(g, m, alpha_));
  }

  const std::vector<MixedAction>& alpha() const { return alpha_; }
  const PayoffVector& q() const { return q_; }

  PayoffVector value(std::span<const double> z) const {
    const double p = absorption_probability(z);
    PayoffVector mass(players_, 0.0);
    const QuitMask masks = QuitMask{1} << players_;
    for (QuitMask m = 1; m < masks; ++m) {
      double w = 1.0;
      for (std::size_t i = 0; i < players_; ++i) w *= (m >> i) & 1U ? z[i] : 1.0 - z[i];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < players_; ++i) mass[i] += w * table_[m][i];
    }
    const double denom = lambda_ + p * (1.0 - lambda_);
    for (std::size_t i = 0; i < players_; ++i) mass[i] = (mass[i] + (1.0 - p) * lambda_ * q_[i]) / denom;
    return mass;
  }

  std::size_t players() const { return players_; }

  // D_i(z) = U_i(Q) - U_i(C) in the one-shot game.
  std::vector<double> advantage(std::span<const double> z) const {
    const PayoffVector v = value(z);
    std::vector<double> d(players_, 0.0);
    const QuitMask masks = QuitMask{1} << players_;
    for (std::size_t i = 0; i < players_; ++i) {
      const QuitMask own = QuitMask{1} << i;
      double uq = 0.0;
      double uc = 0.0;
      for (QuitMask m = 0; m < masks; ++m) {
        if (m & own) continue;
        double prob = 1.0;
        for (std::size_t j = 0; j < players_; ++j) {
          if (j == i) continue;
          prob *= (m >> j) & 1U ? z[j] : 1.0 - z[j];
        }
        if (prob == 0.0) continue;
        uq += prob * table_[m | own][i];
        const double cont = m == 0 ? lambda_ * q_[i] + (1.0 - lambda_) * v[i] : table_[m][i];
        uc += prob * cont;
      }
      d[i] = uq - uc;
    }
    return d;
  }

  double logit_residual(std::span<const double> z, double n) const {
    const std::vector<double> d = advantage(z);
    double r = 0.0;
    for (std::size_t i = 0; i < players_; ++i) r = std::max(r, std::abs(z[i] - sigma(n * d[i])));
    return r;
  }

  double exact_residual(std::span<const double> z) const {
    const std::vector<double> d = advantage(z);
    double r = 0.0;
    for (std::size_t i = 0; i < players_; ++i) {
      const double regret = d[i] > 0.0 ? (1.0 - z[i]) * d[i] : -z[i] * d[i];
      r = std::max(r, regret);
    }
    return r;
  }

  std::vector<double> quit_probabilities(const Eigen::VectorXd& tau, double n) const {
    std::vector<double> z(players_);
    for (std::size_t i = 0; i < players_; ++i) z[i] = sigma(n * tau(static_cast<Eigen::Index>(i)));
    return z;
  }

  Eigen::VectorXd fixed_point_map(const Eigen::VectorXd& tau, double n) const {
    const std::vector<double> d = advantage(quit_probabilities(tau, n));
    return tau - Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  }

 private:
  std::vector<MixedAction> alpha_;
  PayoffVector q_;
  double lambda_;
  std::size_t players_;
  std::vector<PayoffVector> table_;
};

// Validated entry point for public operations.
OneShot checked_one_shot(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha, const PayoffVector& q,
                         double lambda) {
  require_lambda(lambda);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha, q);
  return OneShot(g, aux.alpha(), aux.q(), lambda);
}

Eigen::VectorXd to_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// O_n equilibrium in scaled log-odds coordinates: z = sigma(n tau), tau = D(z).
std::optional<Eigen::VectorXd> solve_tau(const OneShot& game, double n, Eigen::VectorXd tau0) {
  NewtonOptions opts;
  opts.tolerance = 1e-13;
  opts.max_iterations = 50;
  opts.max_step = 1.0;
  const NewtonResult r = newton_solve([&](const Eigen::VectorXd& t) { return game.fixed_point_map(t, n); },
                                      std::move(tau0), opts);
  if (!r.x.allFinite()) return std::nullopt;
  if (game.logit_residual(game.quit_probabilities(r.x, n), n) > kLogitTolerance) return std::nullopt;
  return r.x;
}

// Continuation in n from the O_0 point (z = 1/2).
std::optional<Eigen::VectorXd> continue_tau(const OneShot& game, double n_target) {
  const std::vector<double> half(game.players(), 0.5);
  Eigen::VectorXd tau = to_vector(game.advantage(half));
  if (n_target == 0.0) return tau;
  double n = 0.0;
  double step = std::min(1.0, n_target);
  const double min_step = 1e-6 * std::max(1.0, n_target);
  while (n < n_target) {
    const double next = std::min(n_target, n + step);
    if (auto t = solve_tau(game, next, tau)) {
      tau = *t;
      n = next;
      step *= 2.0;
    } else {
      // A fold in n: natural continuation cannot pass it.
      step *= 0.5;
      if (step < min_step) return std::nullopt;
    }
  }
  return tau;
}

// Newton from a fixed grid of starts in z, for when continuation in n fails.
std::optional<Eigen::VectorXd> multistart_tau(const OneShot& game, double n) {
  const std::size_t players = game.players();
  const std::vector<double> levels{0.5, 0.02, 0.98, 0.2, 0.8};
  std::size_t total = 1;
  for (std::size_t i = 0; i < players; ++i) total *= levels.size();
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> z(players);
    std::size_t c = code;
    for (std::size_t i = 0; i < players; ++i) {
      z[i] = levels[c % levels.size()];
      c /= levels.size();
    }
    if (auto t = solve_tau(game, n, to_vector(game.advantage(z)))) return t;
  }
  return std::nullopt;
}

std::optional<Eigen::VectorXd> solve_logit(const OneShot& game, double n, const std::optional<std::vector<double>>& start) {
  if (start) {
    if (auto t = solve_tau(game, n, to_vector(game.advantage(*start)))) return t;
  }
  if (auto t = continue_tau(game, n)) return t;
  return multistart_tau(game, n);
}

// Exact best-response equilibrium: locate a sharp O_n point, read off the
// support pattern and solve the indifference conditions of the mixing players.
std::optional<std::vector<double>> solve_exact(const OneShot& game, const std::optional<std::vector<double>>& start) {
  const std::size_t players = game.players();
  if (start && game.exact_residual(*start) <= kExactTolerance) return *start;

  auto polish = [&](std::vector<double> z, const std::vector<int>& pattern) -> std::optional<std::vector<double>> {
    std::vector<std::size_t> mixing;
    for (std::size_t i = 0; i < players; ++i) {
      if (pattern[i] == 0) z[i] = 0.0;
      if (pattern[i] == 1) z[i] = 1.0;
      if (pattern[i] == 2) mixing.push_back(i);
    }
    if (!mixing.empty()) {
      Eigen::VectorXd x0(static_cast<Eigen::Index>(mixing.size()));
      for (std::size_t k = 0; k < mixing.size(); ++k) x0(static_cast<Eigen::Index>(k)) = z[mixing[k]];
      auto f = [&](const Eigen::VectorXd& x) {
        std::vector<double> trial = z;
        for (std::size_t k = 0; k < mixing.size(); ++k) trial[mixing[k]] = x(static_cast<Eigen::Index>(k));
        const std::vector<double> d = game.advantage(trial);
        Eigen::VectorXd out(x.size());
        for (std::size_t k = 0; k < mixing.size(); ++k) out(static_cast<Eigen::Index>(k)) = d[mixing[k]];
        return out;
      };
      NewtonOptions opts;
      opts.tolerance = 1e-14;
      opts.max_step = 0.1;
      const NewtonResult r = newton_solve(f, x0, opts);
      for (std::size_t k = 0; k < mixing.size(); ++k) {
        z[mixing[k]] = std::clamp(r.x(static_cast<Eigen::Index>(k)), 0.0, 1.0);
      }
    }
    if (game.exact_residual(z) <= kExactTolerance) return z;
    return std::nullopt;
  };

  for (double n : {1e3, 1e4, 1e5}) {
    const auto tau = solve_logit(game, n, start);
    if (!tau) continue;
    const std::vector<double> z = game.quit_probabilities(*tau, n);
    const double band = 20.0 / n;
    std::vector<int> by_tau(players);
    std::vector<int> by_z(players);
    for (std::size_t i = 0; i < players; ++i) {
      const double t = (*tau)(static_cast<Eigen::Index>(i));
      by_tau[i] = t > band ? 1 : (t < -band ? 0 : 2);
      by_z[i] = z[i] < 1e-6 ? 0 : (z[i] > 1.0 - 1e-6 ? 1 : 2);
    }
    if (auto r = polish(z, by_tau)) return r;
    if (by_z != by_tau) {
      if (auto r = polish(z, by_z)) return r;
    }
  }
  return std::nullopt;
}

PathPoint make_point(const GeneralQuittingGame& g, const OneShot& game, std::vector<MixedAction> alpha,
                     std::vector<double> z, double lambda, std::optional<double> n) {
  PathPoint p;
  p.alpha = std::move(alpha);
  p.z = std::move(z);
  p.lambda = lambda;
  p.n = n;
  p.absorption = absorption_probability(p.z);
  p.value = discounted_stationary_value(g, p.profile(), lambda, game.q());
  p.residual = n ? game.logit_residual(p.z, *n) : game.exact_residual(p.z);
  return p;
}

std::vector<MixedAction> segment_alpha(const std::vector<MixedAction>& from, const std::vector<MixedAction>& to,
                                       double t) {
  std::vector<MixedAction> a = from;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      a[i][k] = (1.0 - t) * from[i][k] + t * to[i][k];
    }
  }
  return a;
}

// The equilibrium system along an alpha segment in coordinates P = (t, tau).
class SegmentSystem {
 public:
  SegmentSystem(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n,
                const std::vector<MixedAction>& from, const std::vector<MixedAction>& to)
      : g_(g), q_(q), lambda_(lambda), n_(n), from_(from), to_(to) {}

  OneShot at(double t) const { return OneShot(g_, segment_alpha(from_, to_, t), q_, lambda_); }

  Eigen::VectorXd residual(const Eigen::VectorXd& p) const {
    return at(p(0)).fixed_point_map(p.tail(p.size() - 1), n_);
  }

  std::vector<double> z(const Eigen::VectorXd& p) const { return at(p(0)).quit_probabilities(p.tail(p.size() - 1), n_); }

  double z_residual(const Eigen::VectorXd& p) const { return at(p(0)).logit_residual(z(p), n_); }

  // Solve the system plus the hyperplane <P - anchor, d> = 0.
  std::optional<Eigen::VectorXd> correct(const Eigen::VectorXd& anchor, const Eigen::VectorXd& d,
                                         const Eigen::VectorXd& guess, double max_step, double tolerance = 1e-12) const {
    auto f = [&](const Eigen::VectorXd& p) {
      Eigen::VectorXd out(p.size());
      out.head(p.size() - 1) = residual(p);
      out(p.size() - 1) = d.dot(p - anchor);
      return out;
    };
    NewtonOptions opts;
    opts.tolerance = tolerance;
    opts.max_iterations = 25;
    opts.max_step = max_step;
    const NewtonResult r = newton_solve(f, guess, opts);
    if (!r.converged && !(r.x.allFinite() && z_residual(r.x) <= kLogitTolerance)) return std::nullopt;
    if (z_residual(r.x) > kLogitTolerance) return std::nullopt;
    return r.x;
  }

  // Solve for tau with t held fixed.
  std::optional<Eigen::VectorXd> at_fixed_t(double t, const Eigen::VectorXd& tau0) const {
    const OneShot game = at(t);
    auto tau = solve_tau(game, n_, tau0);
    if (!tau) return std::nullopt;
    Eigen::VectorXd p(tau->size() + 1);
    p(0) = t;
    p.tail(tau->size()) = *tau;
    return p;
  }

  const GeneralQuittingGame& game() const { return g_; }
  double lambda() const { return lambda_; }
  double n() const { return n_; }
  const std::vector<MixedAction>& from() const { return from_; }
  const std::vector<MixedAction>& to() const { return to_; }

 private:
  const GeneralQuittingGame& g_;
  PayoffVector q_;
  double lambda_;
  double n_;
  std::vector<MixedAction> from_;
  std::vector<MixedAction> to_;
};

PathPoint system_point(const SegmentSystem& sys, const Eigen::VectorXd& p) {
  const OneShot game = sys.at(p(0));
  PathPoint point = make_point(sys.game(), game, segment_alpha(sys.from(), sys.to(), p(0)), sys.z(p), sys.lambda(), sys.n());
  point.t = p(0);
  return point;
}

// Unit null vector of the Jacobian at p, signed to agree with `orient`.
Eigen::VectorXd tangent(const SegmentSystem& sys, const Eigen::VectorXd& p, const Eigen::VectorXd& orient) {
  const Eigen::MatrixXd jac = fd_jacobian([&](const Eigen::VectorXd& x) { return sys.residual(x); }, p, 1e-7);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
  Eigen::VectorXd d = svd.matrixV().col(p.size() - 1);
  if (d.dot(orient) < 0.0) d = -d;
  return d.normalized();
}

}  // namespace

MixedProfile PathPoint::profile() const { return compose_profile(SplitProfile{alpha, z}); }

StrategicGame one_shot_payoffs(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                               const PayoffVector& q, std::span<const double> z, double lambda) {
  require_lambda(lambda);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha, q);
  if (z.size() != g.players()) throw InvalidInput("z has the wrong number of players");
  const PayoffVector v =
      discounted_stationary_value(g, compose_profile(SplitProfile::make(aux.alpha(), {z.begin(), z.end()})), lambda, q);
  const std::size_t players = g.players();
  StrategicGame form = StrategicGame::zeros(std::vector<int>(players, 2));
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    QuitMask mask = 0;
    for (std::size_t i = 0; i < players; ++i) {
      if (form.action_of(idx, i) == 0) mask |= QuitMask{1} << i;
    }
    for (std::size_t i = 0; i < players; ++i) {
      const double u = mask == 0 ? lambda * q[i] + (1.0 - lambda) * v[i] : aux.payoff(mask)[i];
      form.set_payoff(idx, i, u);
    }
  }
  return form;
}

double one_shot_residual(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha, const PayoffVector& q,
                         std::span<const double> z, double lambda, std::optional<double> n) {
  const OneShot game = checked_one_shot(g, alpha, q, lambda);
  if (z.size() != g.players()) throw InvalidInput("z has the wrong number of players");
  return n ? game.logit_residual(z, *n) : game.exact_residual(z);
}

PathPoint discounted_stationary_equilibrium(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                                            const PayoffVector& q, double lambda, std::optional<double> n,
                                            const std::optional<std::vector<double>>& start) {
  if (n) require_n(*n);
  const OneShot game = checked_one_shot(g, alpha, q, lambda);
  if (start && start->size() != g.players()) throw InvalidInput("start has the wrong number of players");
  if (n) {
    const auto tau = solve_logit(game, *n, start);
    if (!tau) {
      std::ostringstream msg;
      msg << "no O_n stationary equilibrium found at lambda=" << lambda << " n=" << *n;
      throw ConvergenceFailure(msg.str());
    }
    return make_point(g, game, game.alpha(), game.quit_probabilities(*tau, *n), lambda, n);
  }
  const auto z = solve_exact(game, start);
  if (!z) {
    std::ostringstream msg;
    msg << "no exact stationary equilibrium found at lambda=" << lambda;
    throw ConvergenceFailure(msg.str());
  }
  return make_point(g, game, game.alpha(), *z, lambda, n);
}

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Complete: return "complete";
    case PathStatus::Stalled: return "stalled";
    case PathStatus::ReturnedToStart: return "returned-to-start";
  }
  return "unknown";
}

EquilibriumPath trace_alpha_path(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n,
                                 const std::vector<MixedAction>& from, const std::vector<MixedAction>& to,
                                 const PathOptions& options, const std::optional<std::vector<double>>& start) {
  require_lambda(lambda);
  require_n(n);
  if (n == 0.0) throw InvalidInput("path tracing needs n > 0");
  // Validates both endpoints.
  const std::vector<MixedAction> a0 = build_auxiliary(g, from, q).alpha();
  const std::vector<MixedAction> a1 = build_auxiliary(g, to, q).alpha();
  const SegmentSystem sys(g, q, lambda, n, a0, a1);

  EquilibriumPath path;
  path.from = a0;
  path.to = a1;

  const OneShot game0 = sys.at(0.0);
  const auto tau0 = solve_logit(game0, n, start);
  if (!tau0) {
    path.status = PathStatus::Stalled;
    path.message = "no equilibrium at the start of the segment";
    return path;
  }
  std::vector<Eigen::VectorXd> pts;
  Eigen::VectorXd p0(tau0->size() + 1);
  p0(0) = 0.0;
  p0.tail(tau0->size()) = *tau0;
  pts.push_back(p0);

  Rng rng(options.seed);
  Eigen::VectorXd dir = tangent(sys, p0, Eigen::VectorXd::Unit(p0.size(), 0));
  double h = options.initial_step;
  int streak = 0;
  path.status = PathStatus::Stalled;
  path.message = "point budget exhausted";

  while (static_cast<int>(pts.size()) < options.max_points) {
    const Eigen::VectorXd& cur = pts.back();
    auto attempt = [&](const Eigen::VectorXd& pred) -> std::optional<Eigen::VectorXd> {
      auto next = sys.correct(pred, dir, pred, std::max(h, 1e-3));
      if (!next) return std::nullopt;
      const Eigen::VectorXd step = *next - cur;
      if (step.norm() > 2.0 * h || step.dot(dir) <= 0.0) return std::nullopt;
      return next;
    };
    std::optional<Eigen::VectorXd> next = attempt(cur + h * dir);
    if (!next && h * 0.5 < options.min_step) {
      for (int j = 0; j < 3 && !next; ++j) {
        Eigen::VectorXd pred = cur + h * dir;
        for (Eigen::Index k = 1; k < pred.size(); ++k) pred(k) += h * rng.uniform(-1.0, 1.0);
        next = attempt(pred);
      }
    }
    if (!next) {
      streak = 0;
      h *= 0.5;
      if (h < options.min_step) {
        std::ostringstream msg;
        msg << "minimum step reached at t=" << cur(0);
        path.message = msg.str();
        break;
      }
      continue;
    }
    if ((*next)(0) >= 1.0) {
      // Land exactly on t = 1 by interpolating tau at the crossing.
      const double w = (1.0 - cur(0)) / ((*next)(0) - cur(0));
      const Eigen::VectorXd guess = cur + w * (*next - cur);
      if (auto end = sys.at_fixed_t(1.0, guess.tail(guess.size() - 1))) {
        pts.push_back(*end);
        path.status = PathStatus::Complete;
        path.message.clear();
        break;
      }
      streak = 0;
      h *= 0.5;
      if (h < options.min_step) {
        path.message = "could not land on t=1";
        break;
      }
      continue;
    }
    if ((*next)(0) < 0.0) {
      path.status = PathStatus::ReturnedToStart;
      path.message = "path returned to t=0";
      break;
    }
    pts.push_back(*next);
    dir = tangent(sys, pts.back(), pts.back() - pts[pts.size() - 2]);
    if (++streak >= 3) {
      h = std::min(2.0 * h, options.max_step);
      streak = 0;
    }
  }

  double length = 0.0;
  std::vector<double> arc(pts.size(), 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const double gap = (pts[k] - pts[k - 1]).norm();
    path.max_gap = std::max(path.max_gap, gap);
    length += gap;
    arc[k] = length;
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    PathPoint point = system_point(sys, pts[k]);
    point.s = length > 0.0 ? arc[k] / length : 0.0;
    path.points.push_back(std::move(point));
  }
  path.starts_at_from = std::abs(path.points.front().t) <= 1e-9;
  path.ends_at_to = path.status == PathStatus::Complete && std::abs(path.points.back().t - 1.0) <= 1e-9;
  return path;
}

AbsorptionFloor absorption_floor(const EquilibriumPath& path) {
  if (path.points.empty()) throw InvalidInput("empty path");
  AbsorptionFloor f;
  f.min_absorption = path.points[0].absorption;
  for (std::size_t k = 1; k < path.points.size(); ++k) {
    if (path.points[k].absorption < f.min_absorption) {
      f.min_absorption = path.points[k].absorption;
      f.index = k;
    }
  }
  f.s = path.points[f.index].s;
  return f;
}

std::string to_string(Section3Branch b) {
  switch (b) {
    case Section3Branch::Degenerate: return "degenerate";
    case Section3Branch::EndpointOne: return "endpoint-1";
    case Section3Branch::EndpointZero: return "endpoint-0";
    case Section3Branch::InteriorRoot: return "interior-root";
  }
  return "unknown";
}

std::vector<double> continue_action_values(const GeneralQuittingGame& g, const MixedProfile& x, std::size_t player) {
  require_profile_shape(g, x);
  std::vector<double> values;
  for (int k = 1; k <= g.continue_count(player); ++k) {
    MixedAction pure(static_cast<std::size_t>(g.form().actions(player)), 0.0);
    pure[static_cast<std::size_t>(k)] = 1.0;
    values.push_back(expected_absorbing_payoff(g, x.with_action(player, pure))[player]);
  }
  return values;
}

std::vector<MixedAction> continue_logit_map(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                                            std::span<const double> z, double n) {
  const MixedProfile x = compose_profile(SplitProfile::make(alpha, {z.begin(), z.end()}));
  std::vector<MixedAction> out;
  for (std::size_t i = 0; i < g.players(); ++i) {
    if (g.continue_count(i) == 1) {
      out.push_back({1.0});
      continue;
    }
    out.push_back(softmax(n, continue_action_values(g, x, i)));
  }
  return out;
}

Section3Result section3_solve(const GeneralQuittingGame& g, const PayoffVector& q, std::span<const double> lambdas,
                              std::span<const double> ns, const Section3Options& options) {
  const std::size_t players = g.players();
  if (players < 2) throw InvalidInput("needs at least two players");
  if (g.continue_count(0) != 2) throw InvalidInput("player 1 must have exactly two continue actions");
  for (std::size_t i = 1; i < players; ++i) {
    if (g.continue_count(i) != 1) throw InvalidInput("players other than player 1 must have one continue action");
  }
  if (!g.is_positive()) throw InvalidInput("game is not positive");
  if (!g.is_recursive()) throw InvalidInput("game is not recursive");
  if (lambdas.empty() || ns.empty()) throw InvalidInput("empty schedule");
  for (double l : lambdas) require_lambda(l);
  for (double n : ns) require_n(n);
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    if (!(lambdas[k] < lambdas[k - 1])) throw InvalidInput("lambda schedule must decrease");
  }
  for (std::size_t k = 1; k < ns.size(); ++k) {
    if (!(ns[k] > ns[k - 1])) throw InvalidInput("n schedule must increase");
  }
  const double n_final = ns.back();
  const double lambda_final = lambdas.back();
  if (n_final <= 0.0) throw InvalidInput("the last n must be positive");

  std::vector<MixedAction> from(players, MixedAction{1.0});
  std::vector<MixedAction> to = from;
  from[0] = {0.0, 1.0};
  to[0] = {1.0, 0.0};

  auto warm_start = [&](const std::vector<MixedAction>& alpha) {
    std::optional<std::vector<double>> warm;
    for (double n : ns) warm = discounted_stationary_equilibrium(g, alpha, q, lambdas[0], n, warm).z;
    for (double l : lambdas) warm = discounted_stationary_equilibrium(g, alpha, q, l, n_final, warm).z;
    return warm;
  };

  Section3Result result;
  result.path = trace_alpha_path(g, q, lambda_final, n_final, from, to, options.path, warm_start(from));
  if (!result.path.complete()) {
    // The component through our start may fold back to t = 0; the one
    // reaching t = 1 can still be found from the other end.
    EquilibriumPath back = trace_alpha_path(g, q, lambda_final, n_final, to, from, options.path, warm_start(to));
    if (!back.complete()) {
      std::ostringstream msg;
      msg << "alpha path " << to_string(result.path.status) << " after " << result.path.points.size()
          << " points: " << result.path.message << "; reverse trace " << to_string(back.status) << " after "
          << back.points.size() << " points: " << back.message;
      throw PathStalled(msg.str());
    }
    std::reverse(back.points.begin(), back.points.end());
    for (PathPoint& p : back.points) {
      p.t = 1.0 - p.t;
      p.s = 1.0 - p.s;
    }
    std::swap(back.from, back.to);
    result.path = std::move(back);
  }
  const std::vector<PathPoint>& pts = result.path.points;
  const PayoffVector zero_q(players, 0.0);
  const EvaluationMode undiscounted = EvaluationMode::undiscounted(zero_q);
  auto finish = [&](Section3Branch branch, PathPoint point) {
    result.branch = branch;
    result.point = std::move(point);
    double others = 0.0;
    for (std::size_t i = 1; i < players; ++i) others += result.point.z[i];
    if (others > 0.0) {
      const std::vector<double> u = continue_action_values(g, result.point.profile(), 0);
      result.u1 = u[0];
      result.u2 = u[1];
    }
    // Candidates at the returned alpha: the path point itself, the exact
    // one-shot equilibrium next to it, and either with quit probabilities
    // below the snap threshold set to 0. The one with least regret wins.
    auto snap = [](std::vector<double> z, double threshold) {
      for (double& v : z) {
        if (v < threshold) v = 0.0;
      }
      return z;
    };
    std::vector<std::pair<std::string, std::vector<double>>> candidates = {{"none", result.point.z}};
    const OneShot game(g, result.point.alpha, q, result.point.lambda);
    if (auto exact = solve_exact(game, result.point.z)) candidates.emplace_back("exact", *exact);
    const std::size_t base = candidates.size();
    for (std::size_t k = 0; k < base; ++k) {
      const std::string prefix = k == 0 ? "" : candidates[k].first + "+";
      candidates.emplace_back(prefix + "snapped", snap(candidates[k].second, options.snap_threshold));
      candidates.emplace_back(prefix + "snapped-below-lambda", snap(candidates[k].second, result.point.lambda));
    }
    bool first = true;
    for (auto& [name, z] : candidates) {
      const MixedProfile x = compose_profile(SplitProfile{result.point.alpha, z});
      EquilibriumCheck chk = check_epsilon_equilibrium(g, x, undiscounted, options.epsilon);
      if (first || chk.report.max_regret() < result.check.report.max_regret()) {
        result.check = std::move(chk);
        result.profile = x;
        result.refinement = name;
        first = false;
      }
    }
    return result;
  };

  for (const PathPoint& p : pts) {
    double others = 0.0;
    for (std::size_t i = 1; i < players; ++i) others += p.z[i];
    if (others <= options.degenerate_threshold) {
      PathPoint snapped = p;
      for (std::size_t i = 1; i < players; ++i) snapped.z[i] = 0.0;
      snapped.absorption = absorption_probability(snapped.z);
      snapped.value = discounted_stationary_value(g, snapped.profile(), snapped.lambda, q);
      return finish(Section3Branch::Degenerate, std::move(snapped));
    }
  }

  auto gap_at = [&](const PathPoint& p) {
    const std::vector<double> u = continue_action_values(g, p.profile(), 0);
    return u[0] - u[1];
  };
  std::vector<double> gaps;
  for (const PathPoint& p : pts) gaps.push_back(gap_at(p));
  if (gaps.back() >= 0.0) return finish(Section3Branch::EndpointOne, pts.back());
  if (gaps.front() <= 0.0) return finish(Section3Branch::EndpointZero, pts.front());

  std::size_t k = 0;
  while (k + 1 < gaps.size() && !(gaps[k] > 0.0 && gaps[k + 1] <= 0.0)) ++k;
  if (k + 1 >= gaps.size()) {
    std::ostringstream msg;
    msg << "no sign change of u1^1 - u1^2 along the path; signs:";
    for (double d : gaps) msg << (d > 0.0 ? " +" : (d < 0.0 ? " -" : " 0"));
    throw IndifferenceRootNotBracketed(msg.str());
  }

  const SegmentSystem sys(g, q, lambda_final, n_final, result.path.from, result.path.to);
  auto coords = [&](const PathPoint& p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(players) + 1);
    v(0) = p.t;
    const std::vector<double> d = sys.at(p.t).advantage(p.z);
    for (std::size_t i = 0; i < players; ++i) v(static_cast<Eigen::Index>(i) + 1) = d[i];
    return v;
  };
  const Eigen::VectorXd pa = coords(pts[k]);
  const Eigen::VectorXd pb = coords(pts[k + 1]);
  const Eigen::VectorXd chord = pb - pa;
  const Eigen::VectorXd dir = chord.normalized();
  double lo = 0.0;
  double hi = 1.0;
  double best_gap = std::numeric_limits<double>::infinity();
  std::optional<PathPoint> best;
  Eigen::VectorXd guess = pa;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Eigen::VectorXd anchor = pa + mid * chord;
    auto p = sys.correct(anchor, dir, anchor, 0.1, 1e-13);
    if (!p) break;
    PathPoint point = system_point(sys, *p);
    point.s = pts[k].s + mid * (pts[k + 1].s - pts[k].s);
    const double gap = gap_at(point);
    if (std::abs(gap) < best_gap) {
      best_gap = std::abs(gap);
      best = point;
    }
    if (best_gap <= 0.1 * options.root_tolerance || hi - lo < 1e-15) break;
    (gap > 0.0 ? lo : hi) = mid;
  }
  if (!best || best_gap > options.root_tolerance) {
    std::ostringstream msg;
    msg << "bisection between path points " << k << " and " << k + 1 << " stopped at |u1^1 - u1^2| = " << best_gap;
    throw IndifferenceRootNotBracketed(msg.str());
  }
  return finish(Section3Branch::InteriorRoot, std::move(*best));
}

namespace {

double max_alpha_diff(const std::vector<MixedAction>& a, const std::vector<MixedAction>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, max_abs_diff(a[i], b[i]));
  return d;
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Joint system in coordinates (beta, tau): beta holds log(alpha_i^k / alpha_i^1)
// for k >= 2 of every player with several continue actions.
class JointSystem {
 public:
  JointSystem(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n)
      : g_(g), q_(q), lambda_(lambda), n_(n) {
    for (std::size_t i = 0; i < g.players(); ++i) {
      offsets_.push_back(betas_);
      betas_ += static_cast<std::size_t>(g.continue_count(i) - 1);
    }
  }

  std::size_t dimension() const { return betas_ + g_.players(); }

  std::vector<MixedAction> alpha(const Eigen::VectorXd& x) const {
    std::vector<MixedAction> a;
    for (std::size_t i = 0; i < g_.players(); ++i) {
      std::vector<double> logits(static_cast<std::size_t>(g_.continue_count(i)), 0.0);
      for (std::size_t k = 1; k < logits.size(); ++k) logits[k] = x(static_cast<Eigen::Index>(offsets_[i] + k - 1));
      a.push_back(softmax(1.0, logits));
    }
    return a;
  }

  Eigen::VectorXd encode(const std::vector<MixedAction>& alpha, const std::vector<double>& z) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dimension()));
    for (std::size_t i = 0; i < g_.players(); ++i) {
      for (std::size_t k = 1; k < alpha[i].size(); ++k) {
        x(static_cast<Eigen::Index>(offsets_[i] + k - 1)) =
            std::log(std::max(alpha[i][k], 1e-300)) - std::log(std::max(alpha[i][0], 1e-300));
      }
    }
    const OneShot game(g_, alpha, q_, lambda_);
    const std::vector<double> d = game.advantage(z);
    for (std::size_t i = 0; i < g_.players(); ++i) x(static_cast<Eigen::Index>(betas_ + i)) = d[i];
    return x;
  }

  std::vector<double> z(const Eigen::VectorXd& x) const {
    std::vector<double> out(g_.players());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma(n_ * x(static_cast<Eigen::Index>(betas_ + i)));
    return out;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const std::vector<MixedAction> a = alpha(x);
    const std::vector<double> zz = z(x);
    Eigen::VectorXd out(x.size());
    const MixedProfile prof = compose_profile(SplitProfile{a, zz});
    for (std::size_t i = 0; i < g_.players(); ++i) {
      if (g_.continue_count(i) < 2) continue;
      const std::vector<double> u = continue_action_values(g_, prof, i);
      for (std::size_t k = 1; k < u.size(); ++k) {
        const auto row = static_cast<Eigen::Index>(offsets_[i] + k - 1);
        out(row) = x(row) - n_ * (u[k] - u[0]);
      }
    }
    const OneShot game(g_, a, q_, lambda_);
    const std::vector<double> d = game.advantage(zz);
    for (std::size_t i = 0; i < g_.players(); ++i) {
      const auto row = static_cast<Eigen::Index>(betas_ + i);
      out(row) = x(row) - d[i];
    }
    return out;
  }

 private:
  const GeneralQuittingGame& g_;
  PayoffVector q_;
  double lambda_;
  double n_;
  std::vector<std::size_t> offsets_;
  std::size_t betas_ = 0;
};

}  // namespace

PathPoint joint_fixed_point(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n,
                            const SplitProfile& start, const JointOptions& options) {
  require_lambda(lambda);
  require_n(n);
  const std::size_t players = g.players();
  if (start.alpha.size() != players || start.z.size() != players) throw InvalidInput("start has the wrong shape");
  // Validates shapes and normalizes.
  std::vector<MixedAction> alpha = build_auxiliary(g, start.alpha, q).alpha();
  std::vector<double> z = start.z;
  auto collapse = [&](const std::vector<double>& zz) {
    if (sum(zz) < options.absorption_floor) {
      std::ostringstream msg;
      msg << "sum of quit probabilities " << sum(zz) << " fell below the floor " << options.absorption_floor;
      throw AbsorptionCollapse(msg.str());
    }
  };
  collapse(z);

  auto finish = [&](std::vector<MixedAction> a, std::vector<double> zz) {
    const OneShot game(g, a, q, lambda);
    PathPoint p = make_point(g, game, std::move(a), std::move(zz), lambda, n);
    p.alpha_residual = max_alpha_diff(continue_logit_map(g, p.alpha, p.z, n), p.alpha);
    return p;
  };
  auto accepted = [&](const PathPoint& p) {
    return p.alpha_residual <= options.tolerance && p.residual <= options.tolerance;
  };

  const JointSystem joint(g, q, lambda, n);
  auto try_newton = [&]() -> std::optional<PathPoint> {
    NewtonOptions opts;
    opts.tolerance = 1e-12;
    opts.max_iterations = 60;
    opts.max_step = 2.0;
    const NewtonResult r =
        newton_solve([&](const Eigen::VectorXd& x) { return joint.residual(x); }, joint.encode(alpha, z), opts);
    if (!r.x.allFinite()) return std::nullopt;
    std::vector<double> zz = joint.z(r.x);
    if (sum(zz) < options.absorption_floor) return std::nullopt;
    PathPoint p = finish(joint.alpha(r.x), std::move(zz));
    if (!accepted(p)) return std::nullopt;
    return p;
  };

  double omega = options.damping;
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const OneShot game(g, alpha, q, lambda);
    const auto tau = solve_logit(game, n, z);
    if (!tau) throw ConvergenceFailure("no O_n equilibrium of the one-shot game during the joint iteration");
    z = game.quit_probabilities(*tau, n);
    collapse(z);
    const std::vector<MixedAction> mapped = continue_logit_map(g, alpha, z, n);
    const double ra = max_alpha_diff(mapped, alpha);
    if (ra <= 0.1 * options.tolerance) {
      PathPoint p = finish(alpha, z);
      if (accepted(p)) return p;
    }
    if (it % 25 == 0) {
      if (auto p = try_newton()) return *p;
    }
    omega = ra < previous ? std::min(1.0, omega * 1.2) : std::max(0.05, omega * 0.5);
    previous = ra;
    for (std::size_t i = 0; i < players; ++i) {
      for (std::size_t k = 0; k < alpha[i].size(); ++k) {
        alpha[i][k] = (1.0 - omega) * alpha[i][k] + omega * mapped[i][k];
      }
    }
  }
  if (auto p = try_newton()) return *p;
  std::ostringstream msg;
  msg << "joint fixed point did not converge at lambda=" << lambda << " n=" << n;
  throw ConvergenceFailure(msg.str());
}

LimitScheduleReport limit_schedule(const GeneralQuittingGame& g, const PayoffVector& q,
                                   std::span<const double> lambdas, std::span<const double> ns,
                                   const std::optional<SplitProfile>& start, const LimitScheduleOptions& options) {
  if (lambdas.empty() || ns.empty()) throw InvalidInput("empty schedule");
  for (double l : lambdas) require_lambda(l);
  for (double n : ns) require_n(n);
  for (std::size_t k = 1; k < lambdas.size(); ++k) {
    if (!(lambdas[k] < lambdas[k - 1])) throw InvalidInput("lambda schedule must decrease");
  }
  for (std::size_t k = 1; k < ns.size(); ++k) {
    if (!(ns[k] > ns[k - 1])) throw InvalidInput("n schedule must increase");
  }
  const std::size_t players = g.players();
  SplitProfile outer;
  if (start) {
    outer = *start;
  } else {
    for (std::size_t i = 0; i < players; ++i) {
      const auto k = static_cast<std::size_t>(g.continue_count(i));
      outer.alpha.push_back(MixedAction(k, 1.0 / static_cast<double>(k)));
      outer.z.push_back(0.5);
    }
  }

  LimitScheduleReport report;
  std::vector<std::size_t> terminal;
  for (double n : ns) {
    SplitProfile warm = outer;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      ScheduleCell cell;
      cell.lambda = lambdas[li];
      cell.n = n;
      try {
        PathPoint p = joint_fixed_point(g, q, cell.lambda, n, warm, options.joint);
        warm = SplitProfile{p.alpha, p.z};
        if (li == 0) outer = warm;
        cell.converged = true;
        cell.point = std::move(p);
      } catch (const Error& e) {
        cell.error = e.what();
      }
      report.cells.push_back(std::move(cell));
    }
    if (report.cells.back().converged) terminal.push_back(report.cells.size() - 1);
  }

  const PayoffVector check_q = options.check_q.value_or(PayoffVector(players, 0.0));
  std::vector<MixedProfile> anchors;
  for (std::size_t idx : terminal) {
    const PathPoint& p = *report.cells[idx].point;
    const MixedProfile x = p.profile();
    std::size_t c = 0;
    while (c < anchors.size() && anchors[c].distance(x) > options.cluster_tolerance) ++c;
    if (c == anchors.size()) {
      anchors.push_back(x);
      report.clusters.emplace_back();
    }
    AccumulationCluster& cluster = report.clusters[c];
    cluster.members.push_back(idx);
    cluster.representative = p;
  }
  for (AccumulationCluster& cluster : report.clusters) {
    cluster.absorption_sum = sum(cluster.representative.z);
    cluster.above_floor = cluster.absorption_sum >= options.joint.absorption_floor;
    cluster.regret = best_pure_deviation(g, cluster.representative.profile(), EvaluationMode::undiscounted(check_q));
  }
  return report;
}

}  // namespace quitsolve
