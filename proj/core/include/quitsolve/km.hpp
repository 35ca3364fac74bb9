#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "quitsolve/strategic_game.hpp"

namespace quitsolve {

// u_i(a) = tilde_u_i(a) + bar_u_i(a_i), where bar_u_i(a_i) averages u_i over
// the opponents' pure profiles.
struct PayoffDecomposition {
  std::vector<std::vector<double>> tilde_u;  // [player][profile index]
  std::vector<std::vector<double>> bar_u;    // [player][own action]
};

PayoffDecomposition decompose(const StrategicGame& u);

// g_i(x) = x_i + softmax(n x)_i.
std::vector<double> g_map(double n, std::span<const double> x);

// dg/dx = I + n (diag(s) - s s^T) with s = softmax(n x).
Eigen::MatrixXd g_jacobian(double n, std::span<const double> x);

// Water-filling solution: level is the largest alpha with
// sum_i (y_i - alpha)_+ = 1, h_i = min(y_i, level), excess_i = (y_i - level)_+.
struct WaterFilling {
  std::vector<double> h;
  double level = 0.0;
  std::vector<double> excess;
};

WaterFilling h_limit(std::span<const double> y);

struct InverseOptions {
  double tolerance = 1e-12;  // max-norm residual of g(x) - y
  int max_iterations = 100;
};

// Inverse of g_map by damped Newton, warm-started at h_limit(y).
// Throws ConvergenceFailure.
std::vector<double> h_n_inverse(double n, std::span<const double> y, const InverseOptions& options = {});

// Flattened point (tilde_u, z): the tilde_u block lists players in order and
// profiles in index order, then the z block lists players and their actions
// in order. z_{i,a} = u_i(a, x_{-i}) + x_i(a).
std::vector<double> phi(const StrategicGame& u, const MixedProfile& x);

// Same layout with z_{i,a} = u_i(a, x_{-i}) + softmax_a(n u_i(., x_{-i})).
std::vector<double> phi_n(double n, const StrategicGame& u, const MixedProfile& x);

// Root of eps = 1 / (1 + exp(eps n)), found by bisection.
double softmax_tail_epsilon(double n);

struct ConvergenceSample {
  std::size_t index = 0;
  double deviation = 0.0;  // ||h^(n)(y) - h(y)||_inf
  double bound = 0.0;      // d * eps(n)
};

struct ConvergenceReport {
  double n = 0.0;
  int dimension = 0;
  double epsilon = 0.0;
  double bound = 0.0;
  double sup_deviation = 0.0;
  std::vector<ConvergenceSample> samples;
};

// Samples y uniformly in [lo, hi]^d and compares h^(n) with h.
ConvergenceReport convergence_report(double n, int dimension, std::size_t samples, double lo, double hi,
                                     std::uint64_t seed);

// Deviation check on caller-provided points.
ConvergenceReport convergence_report(double n, std::span<const std::vector<double>> points);

}  // namespace quitsolve
