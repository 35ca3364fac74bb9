#include "quitsolve/km.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "quitsolve/errors.hpp"
#include "quitsolve/rng.hpp"

namespace quitsolve {

PayoffDecomposition decompose(const StrategicGame& u) {
  const std::size_t n = u.players();
  PayoffDecomposition d;
  d.bar_u.resize(n);
  d.tilde_u.assign(n, std::vector<double>(u.profile_count()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ai = static_cast<std::size_t>(u.actions(i));
    const double opponents = static_cast<double>(u.profile_count() / ai);
    std::vector<double> sums(ai, 0.0);
    for (std::size_t p = 0; p < u.profile_count(); ++p)
      sums[static_cast<std::size_t>(u.action_of(p, i))] += u.payoff(p, i);
    for (double& s : sums) s /= opponents;
    for (std::size_t p = 0; p < u.profile_count(); ++p)
      d.tilde_u[i][p] = u.payoff(p, i) - sums[static_cast<std::size_t>(u.action_of(p, i))];
    d.bar_u[i] = std::move(sums);
  }
  return d;
}

std::vector<double> g_map(double n, std::span<const double> x) {
  auto s = softmax(n, x);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] += x[i];
  return s;
}

Eigen::MatrixXd g_jacobian(double n, std::span<const double> x) {
  const auto s = softmax(n, x);
  const auto d = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd jac(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const double si = s[static_cast<std::size_t>(i)];
      const double sj = s[static_cast<std::size_t>(j)];
      jac(i, j) = i == j ? 1.0 + n * si * (1.0 - si) : -n * si * sj;
    }
  return jac;
}

WaterFilling h_limit(std::span<const double> y) {
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // On the segment where exactly the top k coordinates exceed the level,
  // sum_{j<k} (y_j - level) = 1 gives level = (S_k - 1) / k.
  double prefix = 0.0;
  double level = sorted.front() - 1.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    prefix += sorted[k];
    const double candidate = (prefix - 1.0) / static_cast<double>(k + 1);
    if (candidate < sorted[k]) level = candidate;
    else break;
  }
  WaterFilling w;
  w.level = level;
  w.h.resize(y.size());
  w.excess.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    w.h[i] = std::min(y[i], level);
    w.excess[i] = std::max(y[i] - level, 0.0);
  }
  return w;
}

namespace {

double residual_norm(double n, const std::vector<double>& x, std::span<const double> y) {
  const auto g = g_map(n, x);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) r = std::max(r, std::abs(g[i] - y[i]));
  return r;
}

}  // namespace

std::vector<double> h_n_inverse(double n, std::span<const double> y, const InverseOptions& options) {
  const auto d = static_cast<Eigen::Index>(y.size());
  std::vector<double> x = h_limit(y).h;
  double r = residual_norm(n, x, y);
  for (int it = 0; it < options.max_iterations && r > options.tolerance; ++it) {
    const auto g = g_map(n, x);
    Eigen::VectorXd rhs(d);
    for (Eigen::Index i = 0; i < d; ++i) rhs(i) = y[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i)];
    const Eigen::VectorXd step = g_jacobian(n, x).partialPivLu().solve(rhs);
    // Halve the step until the residual decreases.
    double t = 1.0;
    std::vector<double> trial(x.size());
    double trial_r = r;
    for (; t > 1e-12; t *= 0.5) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + t * step(static_cast<Eigen::Index>(i));
      trial_r = residual_norm(n, trial, y);
      if (trial_r < r) break;
    }
    if (!(trial_r < r)) break;
    x = trial;
    r = trial_r;
  }
  // Roundoff can stall the line search just above the target; anything
  // within 1e-10 is still an accurate inverse.
  if (r > std::max(options.tolerance, 1e-10))
    throw ConvergenceFailure("h_n_inverse: residual " + std::to_string(r) + " after Newton iterations");
  return x;
}

namespace {

std::vector<double> phi_with(const StrategicGame& u, const MixedProfile& x,
                             const std::function<std::vector<double>(std::size_t, const std::vector<double>&)>& tail) {
  const auto dec = decompose(u);
  std::vector<double> out;
  for (const auto& block : dec.tilde_u) out.insert(out.end(), block.begin(), block.end());
  for (std::size_t i = 0; i < u.players(); ++i) {
    const auto values = u.action_values(i, x);
    const auto extra = tail(i, values);
    for (std::size_t a = 0; a < values.size(); ++a) out.push_back(values[a] + extra[a]);
  }
  return out;
}

}  // namespace

std::vector<double> phi(const StrategicGame& u, const MixedProfile& x) {
  return phi_with(u, x, [&](std::size_t i, const std::vector<double>&) { return x[i]; });
}

std::vector<double> phi_n(double n, const StrategicGame& u, const MixedProfile& x) {
  return phi_with(u, x, [&](std::size_t, const std::vector<double>& values) { return softmax(n, values); });
}

double softmax_tail_epsilon(double n) {
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid - 1.0 / (1.0 + std::exp(mid * n)) < 0.0) lo = mid;
    else hi = mid;
  }
  return hi;
}

ConvergenceReport convergence_report(double n, std::span<const std::vector<double>> points) {
  ConvergenceReport report;
  report.n = n;
  report.dimension = points.empty() ? 0 : static_cast<int>(points.front().size());
  report.epsilon = softmax_tail_epsilon(n);
  report.bound = report.dimension * report.epsilon;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto hn = h_n_inverse(n, points[k]);
    const auto h = h_limit(points[k]).h;
    double dev = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) dev = std::max(dev, std::abs(hn[i] - h[i]));
    report.samples.push_back({k, dev, report.bound});
    report.sup_deviation = std::max(report.sup_deviation, dev);
  }
  return report;
}

ConvergenceReport convergence_report(double n, int dimension, std::size_t samples, double lo, double hi,
                                     std::uint64_t seed) {
  if (dimension < 1) throw InvalidInput("dimension must be positive");
  Rng rng(seed);
  std::vector<std::vector<double>> points(samples, std::vector<double>(static_cast<std::size_t>(dimension)));
  for (auto& p : points)
    for (double& v : p) v = rng.uniform(lo, hi);
  return convergence_report(n, points);
}

}  // namespace quitsolve
