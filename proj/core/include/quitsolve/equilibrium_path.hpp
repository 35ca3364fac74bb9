#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quitsolve/quitting_game.hpp"
#include "quitsolve/verification.hpp"

namespace quitsolve {

// A stationary profile in split form together with the discount and logit
// sharpness it was solved at. n empty means exact best responses.
struct PathPoint {
  std::vector<MixedAction> alpha;
  std::vector<double> z;
  double lambda = 1.0;
  std::optional<double> n;
  PayoffVector value;            // discounted value of x(alpha, z), nonabsorbing payoff q
  double absorption = 0.0;       // p(z)
  double residual = 0.0;         // z-residual (logit or best-response)
  double alpha_residual = 0.0;   // ||g^[n](alpha, z) - alpha||, joint fixed point only
  double t = 0.0;                // position on the alpha segment
  double s = 0.0;                // normalized arclength along a traced path

  MixedProfile profile() const;
};

// The binary one-shot game y_lambda(alpha, z): action 0 = Q, action 1 = C.
// Absorbing entries are u(alpha_J, Q_{-J}); the all-continue entry is
// lambda q + (1 - lambda) times the discounted value of x(alpha, z).
StrategicGame one_shot_payoffs(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                               const PayoffVector& q, std::span<const double> z, double lambda);

// max_i |z_i - sigma(n D_i(z))| in logit mode, max_i best-response regret
// of z_i in the one-shot game in exact mode. D_i is player i's payoff from
// Q minus C in y_lambda(alpha, z).
double one_shot_residual(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                         const PayoffVector& q, std::span<const double> z, double lambda, std::optional<double> n);

// A z that is an equilibrium (O_n if n is set, exact otherwise) of the
// one-shot game it induces. Residual <= 1e-10 in logit mode and <= 1e-8 in
// exact mode, else ConvergenceFailure.
PathPoint discounted_stationary_equilibrium(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                                            const PayoffVector& q, double lambda, std::optional<double> n,
                                            const std::optional<std::vector<double>>& start = {});

struct PathOptions {
  double initial_step = 0.05;
  double max_step = 0.25;
  double min_step = 1e-6;
  int max_points = 20000;
  std::uint64_t seed = 0;  // jitter of stalled corrector starts
};

enum class PathStatus { Complete, Stalled, ReturnedToStart };

std::string to_string(PathStatus s);

struct EquilibriumPath {
  std::vector<PathPoint> points;
  std::vector<MixedAction> from;  // alpha at t = 0
  std::vector<MixedAction> to;    // alpha at t = 1
  bool starts_at_from = false;    // t = 0 attained within 1e-9
  bool ends_at_to = false;        // t = 1 attained within 1e-9
  double max_gap = 0.0;           // largest step between consecutive points
  PathStatus status = PathStatus::Stalled;
  std::string message;

  bool complete() const { return starts_at_from && ends_at_to; }
};

// Pseudo-arclength continuation of the O_n stationary equilibrium while
// alpha moves along the segment (1 - t) from + t to. Needs n > 0. A path
// that stalls is returned with its prefix and status set; the caller decides
// whether that is an error.
EquilibriumPath trace_alpha_path(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n,
                                 const std::vector<MixedAction>& from, const std::vector<MixedAction>& to,
                                 const PathOptions& options = {},
                                 const std::optional<std::vector<double>>& start = {});

struct AbsorptionFloor {
  double min_absorption = 0.0;
  std::size_t index = 0;
  double s = 0.0;
};

AbsorptionFloor absorption_floor(const EquilibriumPath& path);

enum class Section3Branch { Degenerate, EndpointOne, EndpointZero, InteriorRoot };

std::string to_string(Section3Branch b);

struct Section3Options {
  PathOptions path;
  double epsilon = 1e-2;          // equilibrium check
  double degenerate_threshold = 1e-10;
  double root_tolerance = 1e-9;
  double snap_threshold = 1e-6;
};

struct Section3Result {
  Section3Branch branch = Section3Branch::EndpointZero;
  MixedProfile profile;
  PathPoint point;
  double u1 = 0.0;  // u_1(C^1, x_{-1}) at the returned point
  double u2 = 0.0;  // u_1(C^2, x_{-1})
  EquilibriumPath path;
  // The returned profile keeps the point's alpha; its z is the point's z,
  // the exact one-shot equilibrium next to it, or either with quit
  // probabilities below snap_threshold (or below lambda) set to 0, whichever
  // has the least undiscounted regret.
  std::string refinement = "none";
  EquilibriumCheck check;  // undiscounted, nonabsorbing payoff 0
};

// Player 0 has two continue actions, every other player one. Warm-starts at
// alpha_1 = 0 along the n schedule (at the first lambda) and then the lambda
// schedule (at the last n), traces alpha_1 from 0 to 1 (or from 1 back to 0
// when the forward path folds) and applies the endpoint / indifference-root
// case analysis. Throws InvalidInput,
// PathStalled or IndifferenceRootNotBracketed.
Section3Result section3_solve(const GeneralQuittingGame& g, const PayoffVector& q, std::span<const double> lambdas,
                              std::span<const double> ns, const Section3Options& options = {});

// u_i(C_i^k, x_{-i}) for k = 1..k_i: expected absorbing payoff of each
// continue action against the others. Throws NonAbsorbingProfile if no
// other player quits with positive probability.
std::vector<double> continue_action_values(const GeneralQuittingGame& g, const MixedProfile& x, std::size_t player);

// The logit map on continue mixes: softmax over k of n u_i(C_i^k, x_{-i}).
std::vector<MixedAction> continue_logit_map(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha,
                                            std::span<const double> z, double n);

struct JointOptions {
  double tolerance = 1e-8;
  double absorption_floor = 1e-3;  // on sum_i z_i
  int max_iterations = 200;
  double damping = 0.5;
};

// Joint fixed point g^[n](alpha, z) = alpha with z an O_n equilibrium of
// y_lambda(alpha, z). Throws ConvergenceFailure or AbsorptionCollapse.
PathPoint joint_fixed_point(const GeneralQuittingGame& g, const PayoffVector& q, double lambda, double n,
                            const SplitProfile& start, const JointOptions& options = {});

struct ScheduleCell {
  double lambda = 0.0;
  double n = 0.0;
  bool converged = false;
  std::optional<PathPoint> point;
  std::string error;
  std::string perturbation = "not-applicable";
};

struct AccumulationCluster {
  PathPoint representative;  // the member at the largest n
  std::vector<std::size_t> members;  // indices into cells
  double absorption_sum = 0.0;        // sum_i z_i of the representative
  bool above_floor = false;
  RegretReport regret;  // undiscounted, nonabsorbing payoff check_q
};

struct LimitScheduleOptions {
  JointOptions joint;
  double cluster_tolerance = 1e-3;
  std::optional<PayoffVector> check_q;  // zeros when empty
};

struct LimitScheduleReport {
  std::vector<ScheduleCell> cells;  // n-major, lambda inner
  std::vector<AccumulationCluster> clusters;
};

// Runs joint_fixed_point over lambdas (decreasing, inner loop) and ns
// (increasing, outer loop) with warm starts, then clusters the terminal
// point of every n (its smallest lambda).
LimitScheduleReport limit_schedule(const GeneralQuittingGame& g, const PayoffVector& q,
                                   std::span<const double> lambdas, std::span<const double> ns,
                                   const std::optional<SplitProfile>& start = {},
                                   const LimitScheduleOptions& options = {});

}  // namespace quitsolve
