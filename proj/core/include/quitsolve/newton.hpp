#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace quitsolve {

using VectorFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct NewtonOptions {
  double tolerance = 1e-12;  // max-norm of F at acceptance
  int max_iterations = 60;
  double fd_step = 1e-7;
  // Max-norm cap on a single Newton step.
  double max_step = std::numeric_limits<double>::infinity();
};

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Central-difference Jacobian.
Eigen::MatrixXd fd_jacobian(const VectorFunction& f, const Eigen::VectorXd& x, double step);

// Damped Newton for small dense square systems: finite-difference Jacobian,
// step halving until ||F||_2 decreases. Non-finite evaluations count as a
// failed trial.
NewtonResult newton_solve(const VectorFunction& f, Eigen::VectorXd x0, const NewtonOptions& options = {});

}  // namespace quitsolve
