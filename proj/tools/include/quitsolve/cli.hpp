#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quitsolve/quitting_game.hpp"

namespace quitsolve::cli {

// Exit codes of every subcommand.
inline constexpr int kPass = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kFailure = 2;

struct RunConfig {
  std::string command;  // "validate", "path solve3", ...

  std::string game;
  std::string q;
  std::string profile;
  std::string alpha;
  std::string from;
  std::string to;
  std::string xhat;
  std::string strategy;
  std::string start;
  std::string out;

  std::optional<double> lambda;
  std::optional<double> n;
  double epsilon = 1e-2;
  double eta = 1e-2;
  double floor = 1e-3;
  double n_max = 200.0;
  int steps = 40;
  std::vector<double> lambdas;
  std::vector<double> ns;
  std::string mode = "undiscounted";
  std::string estimator = "realized";

  std::vector<int> continue_counts;
  bool positive = false;
  bool recursive = false;
  std::uint64_t seed = 0;

  int dimension = 4;
  std::size_t samples = 1000;
  double lo = -2.0;
  double hi = 2.0;
  std::size_t horizon = 1000;
  std::size_t runs = 1000;

  bool verbose = false;
};

struct GenerateSpec {
  std::vector<int> continue_counts;
  bool positive = false;
  bool recursive = false;
  std::uint64_t seed = 0;
};

// Payoffs uniform in [0,1] when positive, else in [-1,1]; nonabsorbing
// entries zeroed when recursive. Players p1.., continue actions c1...
GeneralQuittingGame generate_instance(const GenerateSpec& spec);

// Parses argv (argv[0] is the program name) and executes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace quitsolve::cli
