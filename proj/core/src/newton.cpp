#include "quitsolve/newton.hpp"

#include <cmath>

namespace quitsolve {

Eigen::MatrixXd fd_jacobian(const VectorFunction& f, const Eigen::VectorXd& x, double step) {
  Eigen::MatrixXd jac;
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step * std::max(1.0, std::abs(x(j)));
    probe(j) = x(j) + h;
    const Eigen::VectorXd plus = f(probe);
    probe(j) = x(j) - h;
    const Eigen::VectorXd minus = f(probe);
    probe(j) = x(j);
    if (jac.size() == 0) jac.resize(plus.size(), x.size());
    jac.col(j) = (plus - minus) / (2.0 * h);
  }
  return jac;
}

NewtonResult newton_solve(const VectorFunction& f, Eigen::VectorXd x0, const NewtonOptions& options) {
  NewtonResult result;
  result.x = std::move(x0);
  Eigen::VectorXd fx = f(result.x);
  if (!fx.allFinite()) {
    result.residual = std::numeric_limits<double>::infinity();
    return result;
  }
  result.residual = fx.lpNorm<Eigen::Infinity>();
  double merit = fx.squaredNorm();
  while (result.residual > options.tolerance && result.iterations < options.max_iterations) {
    ++result.iterations;
    const Eigen::MatrixXd jac = fd_jacobian(f, result.x, options.fd_step);
    Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-fx);
    if (!step.allFinite()) break;
    const double size = step.lpNorm<Eigen::Infinity>();
    if (size > options.max_step) step *= options.max_step / size;
    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      const Eigen::VectorXd trial = result.x + t * step;
      const Eigen::VectorXd ft = f(trial);
      if (!ft.allFinite()) continue;
      const double trial_merit = ft.squaredNorm();
      if (trial_merit < merit) {
        result.x = trial;
        fx = ft;
        merit = trial_merit;
        result.residual = ft.lpNorm<Eigen::Infinity>();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  result.converged = result.residual <= options.tolerance;
  return result;
}

}  // namespace quitsolve
