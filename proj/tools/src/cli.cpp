#include "quitsolve/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quitsolve/auxiliary.hpp"
#include "quitsolve/equilibrium_path.hpp"
#include "quitsolve/errors.hpp"
#include "quitsolve/game_io.hpp"
#include "quitsolve/km.hpp"
#include "quitsolve/logit.hpp"
#include "quitsolve/simulation.hpp"
#include "quitsolve/verification.hpp"

namespace quitsolve::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Written to a sibling temporary and renamed, so a failed run never leaves a
// half-written report behind.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidInput(path + ": cannot write file");
    f << content;
    if (!f) throw InvalidInput(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw InvalidInput(path + ": " + ec.message());
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

class Csv {
 public:
  Csv() { buf_.imbue(std::locale::classic()); }
  Csv& header(const std::vector<std::string>& cols) {
    for (std::size_t k = 0; k < cols.size(); ++k) buf_ << (k ? "," : "") << cols[k];
    buf_ << "\n";
    return *this;
  }
  Csv& row(const std::vector<double>& vals) {
    buf_ << std::setprecision(17);
    for (std::size_t k = 0; k < vals.size(); ++k) buf_ << (k ? "," : "") << vals[k];
    buf_ << "\n";
    return *this;
  }
  std::string str() const { return buf_.str(); }

 private:
  std::ostringstream buf_;
};

GeneralQuittingGame load_game(const RunConfig& c) {
  if (c.game.empty()) throw InvalidInput("--game is required");
  return game_from_json(read_json_file(c.game));
}

PayoffVector load_q(const RunConfig& c, const GeneralQuittingGame& g) {
  if (c.q.empty()) return PayoffVector(g.players(), 0.0);
  return payoff_vector_from_json(g, read_json_file(c.q));
}

double require_lambda(const RunConfig& c) {
  if (!c.lambda) throw InvalidInput("--lambda is required");
  return *c.lambda;
}

double require_n(const RunConfig& c) {
  if (!c.n) throw InvalidInput("--n is required");
  return *c.n;
}

ojson regret_json(const GeneralQuittingGame& g, const RegretReport& r) {
  ojson players = ojson::object();
  for (std::size_t i = 0; i < r.players.size(); ++i) {
    const PlayerRegret& p = r.players[i];
    const int a = p.best_action;
    players[g.player_names()[i]] = {
        {"value", p.value},
        {"best_deviation", p.best_deviation},
        {"best_action", a == 0 ? std::string("Q") : g.continue_action_names(i)[static_cast<std::size_t>(a - 1)]},
        {"regret", p.regret}};
  }
  ojson mode = {{"kind", r.mode.lambda ? "discounted" : "undiscounted"}};
  if (r.mode.lambda) mode["lambda"] = *r.mode.lambda;
  mode["q"] = payoff_vector_to_json(g, r.mode.q);
  return {{"mode", mode}, {"max_regret", r.max_regret()}, {"players", players}};
}

ojson point_json(const GeneralQuittingGame& g, const PathPoint& p) {
  ojson j = {{"lambda", p.lambda}};
  j["n"] = p.n ? ojson(*p.n) : ojson(nullptr);
  j["alpha"] = alpha_to_json(g, p.alpha);
  j["z"] = payoff_vector_to_json(g, p.z);
  j["absorption"] = p.absorption;
  j["value"] = payoff_vector_to_json(g, p.value);
  j["residual"] = p.residual;
  j["alpha_residual"] = p.alpha_residual;
  j["t"] = p.t;
  j["s"] = p.s;
  j["profile"] = profile_to_json(g, p.profile());
  return j;
}

std::vector<std::string> path_columns(const GeneralQuittingGame& g) {
  std::vector<std::string> cols = {"s", "t"};
  for (std::size_t i = 0; i < g.players(); ++i) {
    for (const std::string& a : g.continue_action_names(i)) cols.push_back("alpha_" + g.player_names()[i] + "_" + a);
  }
  for (const std::string& p : g.player_names()) cols.push_back("z_" + p);
  cols.push_back("p");
  for (const std::string& p : g.player_names()) cols.push_back("value_" + p);
  cols.push_back("residual");
  cols.push_back("alpha_residual");
  return cols;
}

std::vector<double> path_row(const PathPoint& p) {
  std::vector<double> row = {p.s, p.t};
  for (const MixedAction& a : p.alpha) row.insert(row.end(), a.begin(), a.end());
  row.insert(row.end(), p.z.begin(), p.z.end());
  row.push_back(p.absorption);
  row.insert(row.end(), p.value.begin(), p.value.end());
  row.push_back(p.residual);
  row.push_back(p.alpha_residual);
  return row;
}

// Three-player shape: player 1 has two continue actions, every other player one.
std::pair<std::vector<MixedAction>, std::vector<MixedAction>> default_segment(const GeneralQuittingGame& g) {
  if (g.continue_count(0) != 2) throw InvalidInput("--from/--to are required unless player 1 has two continue actions");
  std::vector<MixedAction> from;
  for (std::size_t i = 0; i < g.players(); ++i) {
    if (i > 0 && g.continue_count(i) != 1) {
      throw InvalidInput("--from/--to are required unless every other player has one continue action");
    }
    from.push_back(MixedAction{1.0});
  }
  std::vector<MixedAction> to = from;
  from[0] = {0.0, 1.0};
  to[0] = {1.0, 0.0};
  return {from, to};
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  ojson j = {{"valid", true}, {"players", g.players()}};
  ojson counts = ojson::object();
  for (std::size_t i = 0; i < g.players(); ++i) counts[g.player_names()[i]] = g.continue_count(i);
  j["continue_actions"] = counts;
  j["profiles"] = g.form().profile_count();
  j["recursive"] = g.is_recursive();
  j["positive"] = g.is_positive();
  emit(c.out, dump(j), out);
  return kPass;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = generate_instance({c.continue_counts, c.positive, c.recursive, c.seed});
  emit(c.out, dump(game_to_json(g)), out);
  return kPass;
}

int cmd_aux_build(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  if (c.alpha.empty()) throw InvalidInput("--alpha is required");
  const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha_from_json(g, read_json_file(c.alpha)), load_q(c, g));
  std::vector<std::vector<std::string>> cont(g.players(), std::vector<std::string>{"C"});
  const GeneralQuittingGame binary(g.player_names(), cont, aux.binary_form());
  emit(c.out, dump(game_to_json(binary)), out);
  return kPass;
}

int cmd_aux_check(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  if (c.alpha.empty() || c.xhat.empty()) throw InvalidInput("--alpha and --xhat are required");
  const std::vector<MixedAction> alpha = alpha_from_json(g, read_json_file(c.alpha));
  const PayoffVector q = load_q(c, g);
  const std::vector<double> xhat = quit_vector_from_json(g, read_json_file(c.xhat));
  const AuxEquilibriumClassification cls = check_aux_absorbing_equilibrium(g, alpha, q, xhat, c.epsilon);
  const AuxiliaryQuittingGame aux = build_auxiliary(g, alpha, q);
  const PayoffEquivalenceReport eq = payoff_equivalence_check(g, alpha, q, xhat, c.lambda);
  ojson j = {{"classification", to_string(cls.kind)},
             {"absorption", cls.absorption},
             {"epsilon", c.epsilon},
             {"regret", regret_json(aux.as_quitting_game(), cls.regret)}};
  j["payoff_equivalence"] = {{"base_value", payoff_vector_to_json(g, eq.base_value)},
                             {"aux_value", payoff_vector_to_json(g, eq.aux_value)},
                             {"gap", eq.gap}};
  emit(c.out, dump(j), out);
  return cls.kind == AbsorptionClass::NotEquilibrium ? kCheckFailed : kPass;
}

int cmd_km_report(const RunConfig& c, std::ostream& out) {
  const double n = require_n(c);
  const ConvergenceReport r = convergence_report(n, c.dimension, c.samples, c.lo, c.hi, c.seed);
  ojson j = {{"n", r.n},           {"dimension", r.dimension},        {"samples", r.samples.size()},
             {"epsilon", r.epsilon}, {"bound", r.bound}, {"sup_deviation", r.sup_deviation},
             {"within_bound", r.sup_deviation <= r.bound}};
  emit(c.out, dump(j), out);
  return r.sup_deviation <= r.bound ? kPass : kCheckFailed;
}

int cmd_logit_solve(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  const double n = require_n(c);
  std::optional<MixedProfile> start;
  if (!c.start.empty()) start = profile_from_json(g, read_json_file(c.start));
  const LogitPoint p = logit_fixed_point(g.form(), n, start);
  const std::vector<double> regret = best_response_regret(g.form(), p.x);
  ojson j = {{"n", p.n}, {"residual", p.residual}};
  j["profile"] = profile_to_json(g, p.x);
  j["regret"] = payoff_vector_to_json(g, regret);
  emit(c.out, dump(j), out);
  return kPass;
}

int cmd_logit_path(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const GeneralQuittingGame g = load_game(c);
  const std::vector<double> schedule = c.ns.empty() ? logit_schedule(c.n_max, c.steps) : c.ns;
  const LogitPath path = logit_path(g.form(), schedule);
  std::vector<std::string> cols = {"n"};
  for (std::size_t i = 0; i < g.players(); ++i) {
    cols.push_back("x_" + g.player_names()[i] + "_Q");
    for (const std::string& a : g.continue_action_names(i)) cols.push_back("x_" + g.player_names()[i] + "_" + a);
  }
  cols.push_back("residual");
  Csv csv;
  csv.header(cols);
  for (const LogitPoint& p : path.points) {
    std::vector<double> row = {p.n};
    const std::vector<double> flat = p.x.flatten();
    row.insert(row.end(), flat.begin(), flat.end());
    row.push_back(p.residual);
    csv.row(row);
  }
  emit(c.out, csv.str(), out);
  if (path.failure) {
    err << "logit path stopped: " << *path.failure << "\n";
    return kFailure;
  }
  return kPass;
}

int cmd_path_trace(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const GeneralQuittingGame g = load_game(c);
  const PayoffVector q = load_q(c, g);
  auto [from, to] = c.from.empty() || c.to.empty()
                        ? default_segment(g)
                        : std::pair{alpha_from_json(g, read_json_file(c.from)), alpha_from_json(g, read_json_file(c.to))};
  PathOptions opts;
  opts.seed = c.seed;
  const EquilibriumPath path = trace_alpha_path(g, q, require_lambda(c), require_n(c), from, to, opts);
  Csv csv;
  csv.header(path_columns(g));
  for (const PathPoint& p : path.points) csv.row(path_row(p));
  emit(c.out, csv.str(), out);
  if (c.verbose || !path.complete()) {
    const AbsorptionFloor f = absorption_floor(path);
    err << "path " << to_string(path.status) << ": " << path.points.size() << " points, max gap " << path.max_gap
        << ", absorption floor " << f.min_absorption << " at s=" << f.s;
    if (!path.message.empty()) err << " (" << path.message << ")";
    err << "\n";
  }
  return path.complete() ? kPass : kFailure;
}

int cmd_path_solve3(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  const PayoffVector q = load_q(c, g);
  Section3Options opts;
  opts.epsilon = c.epsilon;
  opts.path.seed = c.seed;
  const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3} : c.lambdas;
  const std::vector<double> ns = c.ns.empty() ? std::vector<double>{1, 5, 20, 50, 100, 200} : c.ns;
  const Section3Result r = section3_solve(g, q, lambdas, ns, opts);
  ojson j = {{"branch", to_string(r.branch)}};
  j["profile"] = profile_to_json(g, r.profile);
  j["u1_c1"] = r.u1;
  j["u1_c2"] = r.u2;
  j["indifference_gap"] = std::abs(r.u1 - r.u2);
  j["refinement"] = r.refinement;
  j["point"] = point_json(g, r.point);
  j["path"] = {{"points", r.path.points.size()},
               {"max_gap", r.path.max_gap},
               {"starts_at_from", r.path.starts_at_from},
               {"ends_at_to", r.path.ends_at_to},
               {"absorption_floor", absorption_floor(r.path).min_absorption}};
  j["check"] = {{"pass", r.check.pass}, {"epsilon", r.check.epsilon}, {"report", regret_json(g, r.check.report)}};
  emit(c.out, dump(j), out);
  return r.check.pass ? kPass : kCheckFailed;
}

int cmd_path_joint(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  const PayoffVector q = load_q(c, g);
  LimitScheduleOptions opts;
  opts.joint.absorption_floor = c.floor;
  const std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4} : c.lambdas;
  const std::vector<double> ns = c.ns.empty() ? std::vector<double>{1, 5, 20, 50, 100, 200} : c.ns;
  const LimitScheduleReport r = limit_schedule(g, q, lambdas, ns, std::nullopt, opts);
  ojson cells = ojson::array();
  for (const ScheduleCell& cell : r.cells) {
    ojson j = {{"lambda", cell.lambda}, {"n", cell.n}, {"converged", cell.converged}, {"perturbation", cell.perturbation}};
    if (cell.point) j["point"] = point_json(g, *cell.point);
    if (!cell.error.empty()) j["error"] = cell.error;
    cells.push_back(j);
  }
  ojson clusters = ojson::array();
  for (const AccumulationCluster& cl : r.clusters) {
    clusters.push_back({{"members", cl.members},
                        {"absorption_sum", cl.absorption_sum},
                        {"above_floor", cl.above_floor},
                        {"representative", point_json(g, cl.representative)},
                        {"regret", regret_json(g, cl.regret)}});
  }
  // The verdict is the equilibrium check of the sweep's final cell.
  const ScheduleCell& last = r.cells.back();
  ojson verdict = {{"epsilon", c.epsilon}};
  int code = kFailure;
  if (last.point) {
    const EquilibriumCheck chk = check_epsilon_equilibrium(g, last.point->profile(),
                                                           EvaluationMode::undiscounted(PayoffVector(g.players(), 0.0)),
                                                           c.epsilon);
    verdict["pass"] = chk.pass;
    verdict["report"] = regret_json(g, chk.report);
    code = chk.pass ? kPass : kCheckFailed;
  } else {
    verdict["pass"] = false;
    verdict["error"] = last.error;
  }
  emit(c.out, dump({{"cells", cells}, {"clusters", clusters}, {"final_check", verdict}}), out);
  return code;
}

int cmd_check_eq(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  if (c.profile.empty()) throw InvalidInput("--profile is required");
  const MixedProfile x = profile_from_json(g, read_json_file(c.profile));
  const PayoffVector q = load_q(c, g);
  EvaluationMode mode;
  if (c.mode == "discounted") {
    mode = EvaluationMode::discounted(require_lambda(c), q);
  } else if (c.mode == "undiscounted") {
    mode = EvaluationMode::undiscounted(q);
  } else {
    throw InvalidInput("--mode must be discounted or undiscounted");
  }
  const EquilibriumCheck chk = check_epsilon_equilibrium(g, x, mode, c.epsilon);
  emit(c.out, dump({{"pass", chk.pass}, {"epsilon", chk.epsilon}, {"report", regret_json(g, chk.report)}}), out);
  return chk.pass ? kPass : kCheckFailed;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const GeneralQuittingGame g = load_game(c);
  if (c.strategy.empty()) throw InvalidInput("--strategy is required");
  const StrategyProfile profile = strategy_from_json(g, read_json_file(c.strategy));
  SimulationOptions opts;
  opts.horizon = c.horizon;
  opts.runs = c.runs;
  opts.seed = c.seed;
  opts.lambda = c.lambda;
  if (c.estimator == "realized") {
    opts.estimator = PayoffEstimator::Realized;
  } else if (c.estimator == "conditional") {
    opts.estimator = PayoffEstimator::ConditionalOnQuitters;
  } else {
    throw InvalidInput("--estimator must be realized or conditional");
  }
  const SimulationEstimate est = monte_carlo_payoff(g, profile, load_q(c, g), opts);
  ojson j = {{"mean", payoff_vector_to_json(g, est.mean)},
             {"standard_error", payoff_vector_to_json(g, est.standard_error)},
             {"runs", est.runs},
             {"horizon", est.horizon},
             {"seed", est.seed},
             {"absorbed_runs", est.absorbed_runs}};
  if (c.lambda) j["lambda"] = *c.lambda;
  emit(c.out, dump(j), out);
  return kPass;
}

}  // namespace

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  using Handler = std::function<int()>;
  const std::map<std::string, Handler> handlers = {
      {"validate", [&] { return cmd_validate(c, out); }},
      {"generate", [&] { return cmd_generate(c, out); }},
      {"aux build", [&] { return cmd_aux_build(c, out); }},
      {"aux check", [&] { return cmd_aux_check(c, out); }},
      {"km report", [&] { return cmd_km_report(c, out); }},
      {"logit solve", [&] { return cmd_logit_solve(c, out); }},
      {"logit path", [&] { return cmd_logit_path(c, out, err); }},
      {"path trace", [&] { return cmd_path_trace(c, out, err); }},
      {"path solve3", [&] { return cmd_path_solve3(c, out); }},
      {"path joint", [&] { return cmd_path_joint(c, out); }},
      {"check eq", [&] { return cmd_check_eq(c, out); }},
      {"check aux", [&] { return cmd_aux_check(c, out); }},
      {"simulate", [&] { return cmd_simulate(c, out); }},
  };
  const auto it = handlers.find(c.command);
  if (it == handlers.end()) {
    err << "error: unknown command \"" << c.command << "\"\n";
    return kFailure;
  }
  try {
    return it->second();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Solvers and checks for general quitting games", "quitsolve"};
  app.require_subcommand(1);

  auto game_opt = [&](CLI::App* s, bool required = true) {
    auto* o = s->add_option("--game", c.game, "game file (JSON)");
    if (required) o->required();
  };
  auto q_opt = [&](CLI::App* s) { s->add_option("--q", c.q, "nonabsorbing payoff vector (JSON); zeros if omitted"); };
  auto out_opt = [&](CLI::App* s) { s->add_option("--out", c.out, "output file; stdout if omitted"); };
  auto lists = [&](CLI::App* s) {
    s->add_option("--lambda-list", c.lambdas, "decreasing discount schedule")->delimiter(',');
    s->add_option("--n-list", c.ns, "increasing logit sharpness schedule")->delimiter(',');
  };

  auto* validate = app.add_subcommand("validate", "check a game file");
  validate->add_option("file", c.game, "game file (JSON)");
  validate->add_option("--game", c.game, "game file (JSON)");
  out_opt(validate);
  validate->callback([&] { c.command = "validate"; });

  auto* generate = app.add_subcommand("generate", "emit a random game");
  generate->add_option("--continue-actions", c.continue_counts, "continue actions per player, e.g. 2,1,1")
      ->delimiter(',')
      ->required();
  generate->add_flag("--positive", c.positive, "payoffs in [0,1] instead of [-1,1]");
  generate->add_flag("--recursive", c.recursive, "zero nonabsorbing payoffs");
  generate->add_option("--seed", c.seed, "64-bit seed");
  out_opt(generate);
  generate->callback([&] { c.command = "generate"; });

  auto* aux = app.add_subcommand("aux", "auxiliary quitting games");
  aux->require_subcommand(1);
  auto* aux_build = aux->add_subcommand("build", "emit the auxiliary game for (alpha, q)");
  game_opt(aux_build);
  q_opt(aux_build);
  aux_build->add_option("--alpha", c.alpha, "continue mixes (JSON)")->required();
  out_opt(aux_build);
  aux_build->callback([&] { c.command = "aux build"; });
  auto* aux_check = aux->add_subcommand("check", "payoff equivalence and absorption class of xhat");
  game_opt(aux_check);
  q_opt(aux_check);
  aux_check->add_option("--alpha", c.alpha, "continue mixes (JSON)")->required();
  aux_check->add_option("--xhat", c.xhat, "quit probabilities (JSON)")->required();
  aux_check->add_option("--lambda", c.lambda, "discount for the equivalence check; undiscounted if omitted");
  aux_check->add_option("--eps", c.epsilon, "absorption threshold is eps^2");
  out_opt(aux_check);
  aux_check->callback([&] { c.command = "aux check"; });

  auto* km = app.add_subcommand("km", "smoothed structure maps");
  km->require_subcommand(1);
  auto* km_report = km->add_subcommand("report", "sampled distance between h^(n) and h against d*eps(n)");
  km_report->add_option("--n", c.n, "sharpness")->required();
  km_report->add_option("--dim", c.dimension, "dimension");
  km_report->add_option("--samples", c.samples, "number of samples");
  km_report->add_option("--lo", c.lo, "sample box lower bound");
  km_report->add_option("--hi", c.hi, "sample box upper bound");
  km_report->add_option("--seed", c.seed, "64-bit seed");
  out_opt(km_report);
  km_report->callback([&] { c.command = "km report"; });

  auto* logit = app.add_subcommand("logit", "logit equilibria of the one-shot game");
  logit->require_subcommand(1);
  auto* logit_solve = logit->add_subcommand("solve", "one O_n equilibrium");
  game_opt(logit_solve);
  logit_solve->add_option("--n", c.n, "sharpness")->required();
  logit_solve->add_option("--start", c.start, "warm start profile (JSON)");
  out_opt(logit_solve);
  logit_solve->callback([&] { c.command = "logit solve"; });
  auto* logit_path_cmd = logit->add_subcommand("path", "continuation in n, CSV");
  game_opt(logit_path_cmd);
  logit_path_cmd->add_option("--n-max", c.n_max, "last n of the default schedule");
  logit_path_cmd->add_option("--steps", c.steps, "geometric steps of the default schedule");
  logit_path_cmd->add_option("--n-list", c.ns, "explicit schedule")->delimiter(',');
  out_opt(logit_path_cmd);
  logit_path_cmd->callback([&] { c.command = "logit path"; });

  auto* path = app.add_subcommand("path", "equilibrium paths of auxiliary games");
  path->require_subcommand(1);
  auto* trace = path->add_subcommand("trace", "trace the stationary equilibrium along an alpha segment, CSV");
  game_opt(trace);
  q_opt(trace);
  trace->add_option("--lambda", c.lambda, "discount")->required();
  trace->add_option("--n", c.n, "sharpness")->required();
  trace->add_option("--from", c.from, "alpha at t=0 (JSON)");
  trace->add_option("--to", c.to, "alpha at t=1 (JSON)");
  trace->add_option("--seed", c.seed, "jitter seed");
  trace->add_flag("--verbose", c.verbose, "print a summary to stderr");
  out_opt(trace);
  trace->callback([&] { c.command = "path trace"; });
  auto* solve3 = path->add_subcommand("solve3", "two continue actions for player 1: path plus indifference root");
  game_opt(solve3);
  q_opt(solve3);
  lists(solve3);
  solve3->add_option("--eps", c.epsilon, "equilibrium check tolerance");
  solve3->add_option("--seed", c.seed, "jitter seed");
  out_opt(solve3);
  solve3->callback([&] { c.command = "path solve3"; });
  auto* joint = path->add_subcommand("joint", "joint fixed point over lambda and n schedules");
  game_opt(joint);
  q_opt(joint);
  lists(joint);
  joint->add_option("--floor", c.floor, "absorption floor on the sum of quit probabilities");
  joint->add_option("--eps", c.epsilon, "equilibrium check tolerance");
  out_opt(joint);
  joint->callback([&] { c.command = "path joint"; });

  auto* check = app.add_subcommand("check", "equilibrium checks");
  check->require_subcommand(1);
  auto* check_eq = check->add_subcommand("eq", "stationary epsilon-equilibrium check");
  game_opt(check_eq);
  q_opt(check_eq);
  check_eq->add_option("--profile", c.profile, "mixed profile (JSON)")->required();
  check_eq->add_option("--mode", c.mode, "discounted or undiscounted");
  check_eq->add_option("--lambda", c.lambda, "discount (discounted mode)");
  check_eq->add_option("--eps", c.epsilon, "tolerance");
  out_opt(check_eq);
  check_eq->callback([&] { c.command = "check eq"; });
  auto* check_aux = check->add_subcommand("aux", "stationary equilibrium of the auxiliary game");
  game_opt(check_aux);
  q_opt(check_aux);
  check_aux->add_option("--alpha", c.alpha, "continue mixes (JSON)")->required();
  check_aux->add_option("--xhat", c.xhat, "quit probabilities (JSON)")->required();
  check_aux->add_option("--eps", c.epsilon, "absorption threshold is eps^2");
  out_opt(check_aux);
  check_aux->callback([&] { c.command = "check aux"; });

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo payoff of a strategy profile");
  game_opt(simulate);
  q_opt(simulate);
  simulate->add_option("--strategy", c.strategy, "strategy file (JSON)")->required();
  simulate->add_option("--T", c.horizon, "horizon");
  simulate->add_option("--runs", c.runs, "number of runs");
  simulate->add_option("--seed", c.seed, "64-bit seed");
  simulate->add_option("--lambda", c.lambda, "discounted payoff");
  simulate->add_option("--estimator", c.estimator, "realized or conditional");
  out_opt(simulate);
  simulate->callback([&] { c.command = "simulate"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kFailure;
  }
  return execute(c, out, err);
}

}  // namespace quitsolve::cli
