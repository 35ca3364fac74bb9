#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quitsolve/strategic_game.hpp"

namespace quitsolve {

// A point of the O_n manifold for a fixed game: x solves
// x_i(a) = softmax_a(n u_i(., x_{-i})) up to `residual` in max norm.
struct LogitPoint {
  double n = 0.0;
  MixedProfile x;
  double residual = 0.0;
};

struct LogitOptions {
  double tolerance = 1e-10;
  int max_fixed_point_iterations = 400;
  int max_newton_iterations = 100;
};

// The logit response map x -> softmax(n u_i(., x_{-i})).
MixedProfile logit_response(const StrategicGame& u, double n, const MixedProfile& x);

// max-norm of x - logit_response(x).
double logit_residual(const StrategicGame& u, double n, const MixedProfile& x);

// O_n-equilibrium by damped fixed-point iteration followed by Newton in
// log-probability coordinates once the iteration plateaus. Throws
// ConvergenceFailure.
LogitPoint logit_fixed_point(const StrategicGame& u, double n, const std::optional<MixedProfile>& x0 = {},
                             const LogitOptions& options = {});

struct LogitPath {
  std::vector<LogitPoint> points;
  std::vector<double> step_distances;  // max-norm between consecutive points
  std::optional<std::string> failure;  // set when the path stops early
  std::optional<double> failed_at;     // schedule value that could not be reached
};

// Warm-started continuation along an increasing schedule starting at n <= 1.
// A failing step returns the prefix with a diagnostic instead of throwing.
LogitPath logit_path(const StrategicGame& u, std::span<const double> schedule, const LogitOptions& options = {});

// 0 followed by `steps` geometrically spaced values from 1 to n_max.
std::vector<double> logit_schedule(double n_max, int steps);

// The path is continued past n_max up to kLimitExtension * n_max to estimate
// where it is heading.
inline constexpr double kLimitExtension = 50.0;
inline constexpr int kLimitExtensionSteps = 20;

struct LogitLimit {
  LogitPoint point;            // the path point at n_max
  std::vector<double> regret;  // of point.x
  // Richardson estimate from the last two points of the extended path,
  // clipped to the simplex; point.x when the extension fails.
  MixedProfile limit;
};

// Path point at n_max with its per-player regret, plus a limit estimate.
LogitLimit nash_from_logit_limit(const StrategicGame& u, double n_max, int steps = 40,
                                 const LogitOptions& options = {});

}  // namespace quitsolve
