#include "quitsolve/game_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "quitsolve/errors.hpp"

namespace quitsolve {

namespace {

using nlohmann::json;

const json& unwrap(const json& j, std::initializer_list<const char*> keys) {
  if (j.is_object()) {
    for (const char* k : keys) {
      if (j.contains(k) && j.at(k).is_object()) return j.at(k);
    }
  }
  return j;
}

const json& require_key(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(where + ": missing \"" + key + "\"");
  return j.at(key);
}

double require_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where + ": expected a number");
  return j.get<double>();
}

std::size_t player_index(const GeneralQuittingGame& g, const std::string& name, const std::string& where) {
  const auto& names = g.player_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidInput(where + ": unknown player \"" + name + "\"");
  return static_cast<std::size_t>(it - names.begin());
}

// Index in the strategic form: Q is 0, continue actions follow.
int action_index(const GeneralQuittingGame& g, std::size_t player, const std::string& name, const std::string& where) {
  if (name == "Q") return GeneralQuittingGame::kQuit;
  const auto& names = g.continue_action_names(player);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw InvalidInput(where + ": unknown action \"" + name + "\" for player \"" + g.player_names()[player] + "\"");
  }
  return 1 + static_cast<int>(it - names.begin());
}

std::string action_name(const GeneralQuittingGame& g, std::size_t player, int action) {
  return action == GeneralQuittingGame::kQuit ? "Q" : g.continue_action_names(player)[static_cast<std::size_t>(action - 1)];
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of strings");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const json& e : j) {
    if (!e.is_string()) throw InvalidInput(where + ": expected an array of strings");
    std::string s = e.get<std::string>();
    if (!seen.insert(s).second) throw InvalidInput(where + ": duplicate name \"" + s + "\"");
    out.push_back(std::move(s));
  }
  return out;
}

void require_players_only(const GeneralQuittingGame& g, const json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object keyed by player");
  for (const auto& [k, v] : j.items()) player_index(g, k, where);
}

}  // namespace

json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.find(": ", what.find("parse error"));
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": JSON syntax error";
    if (colon != std::string::npos) msg << what.substr(colon);
    throw InvalidInput(msg.str());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

std::string describe_profile(const GeneralQuittingGame& g, std::span<const int> profile) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << (i ? ", " : "") << g.player_names()[i] << "=" << action_name(g, i, profile[i]);
  }
  out << ")";
  return out.str();
}

GeneralQuittingGame game_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("game: expected a JSON object");
  const std::vector<std::string> players = string_list(require_key(j, "players", "game"), "game.players");
  if (players.empty()) throw InvalidInput("game.players: at least one player is required");
  const json& cont = require_key(j, "continue_actions", "game");
  if (!cont.is_object()) throw InvalidInput("game.continue_actions: expected an object keyed by player");
  for (const auto& [k, v] : cont.items()) {
    if (std::find(players.begin(), players.end(), k) == players.end()) {
      throw InvalidInput("game.continue_actions: unknown player \"" + k + "\"");
    }
  }
  std::vector<std::vector<std::string>> actions;
  std::vector<int> counts;
  for (const std::string& p : players) {
    if (!cont.contains(p)) throw InvalidInput("game.continue_actions: missing player \"" + p + "\"");
    actions.push_back(string_list(cont.at(p), "game.continue_actions." + p));
    if (actions.back().empty()) throw InvalidInput("game.continue_actions." + p + ": at least one continue action");
    for (const std::string& a : actions.back()) {
      if (a == "Q") throw InvalidInput("game.continue_actions." + p + ": \"Q\" is reserved for the quit action");
    }
    counts.push_back(static_cast<int>(actions.back().size()) + 1);
  }
  bool recursive = false;
  if (j.contains("recursive")) {
    if (!j.at("recursive").is_boolean()) throw InvalidInput("game.recursive: expected true or false");
    recursive = j.at("recursive").get<bool>();
  }

  // A shell game with zero payoffs gives name lookups and profile indexing.
  const GeneralQuittingGame shell(players, actions, StrategicGame::zeros(counts));
  StrategicGame form = StrategicGame::zeros(counts);
  std::vector<bool> seen(form.profile_count(), false);
  const json& entries = require_key(j, "payoffs", "game");
  if (!entries.is_array()) throw InvalidInput("game.payoffs: expected an array");
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const std::string where = "game.payoffs[" + std::to_string(e) + "]";
    const json& entry = entries[e];
    const json& prof = require_key(entry, "profile", where);
    require_players_only(shell, prof, where + ".profile");
    std::vector<int> profile(players.size());
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (!prof.contains(players[i])) throw InvalidInput(where + ".profile: missing player \"" + players[i] + "\"");
      const json& a = prof.at(players[i]);
      if (!a.is_string()) throw InvalidInput(where + ".profile: action names must be strings");
      profile[i] = action_index(shell, i, a.get<std::string>(), where + ".profile");
    }
    const std::string label = describe_profile(shell, profile);
    const std::size_t idx = form.index(profile);
    if (seen[idx]) throw InvalidInput(where + ": duplicate entry for profile " + label);
    seen[idx] = true;
    const json& u = require_key(entry, "u", where);
    require_players_only(shell, u, where + ".u");
    for (std::size_t i = 0; i < players.size(); ++i) {
      if (!u.contains(players[i])) throw InvalidInput(where + ".u: missing payoff of \"" + players[i] + "\" at " + label);
      const double v = require_number(u.at(players[i]), where + ".u." + players[i]);
      if (!(v >= -1.0 && v <= 1.0)) {
        throw InvalidInput(where + ": payoff of \"" + players[i] + "\" at " + label + " is outside [-1,1]");
      }
      form.set_payoff(idx, i, v);
    }
    if (recursive && !shell.is_absorbing(idx)) {
      for (std::size_t i = 0; i < players.size(); ++i) {
        if (form.payoff(idx, i) != 0.0) {
          throw InvalidInput(where + ": game is marked recursive but nonabsorbing profile " + label +
                             " has a nonzero payoff");
        }
      }
    }
  }
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    if (seen[idx]) continue;
    const std::vector<int> profile = form.decode(idx);
    if (shell.is_absorbing(idx)) {
      throw InvalidInput("game.payoffs: missing entry for absorbing profile " + describe_profile(shell, profile));
    }
    if (!recursive) {
      throw InvalidInput("game.payoffs: missing entry for nonabsorbing profile " + describe_profile(shell, profile) +
                         " (allowed only with \"recursive\": true)");
    }
  }
  return GeneralQuittingGame(players, actions, std::move(form));
}

nlohmann::ordered_json game_to_json(const GeneralQuittingGame& g) {
  nlohmann::ordered_json out;
  out["players"] = g.player_names();
  nlohmann::ordered_json cont = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < g.players(); ++i) cont[g.player_names()[i]] = g.continue_action_names(i);
  out["continue_actions"] = cont;
  out["recursive"] = g.is_recursive();
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  const StrategicGame& form = g.form();
  for (std::size_t idx = 0; idx < form.profile_count(); ++idx) {
    const std::vector<int> profile = form.decode(idx);
    nlohmann::ordered_json prof = nlohmann::ordered_json::object();
    nlohmann::ordered_json u = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < g.players(); ++i) {
      prof[g.player_names()[i]] = action_name(g, i, profile[i]);
      u[g.player_names()[i]] = form.payoff(idx, i);
    }
    entries.push_back({{"profile", prof}, {"u", u}});
  }
  out["payoffs"] = entries;
  return out;
}

MixedProfile profile_from_json(const GeneralQuittingGame& g, const json& raw) {
  const json& j = unwrap(raw, {"profile"});
  require_players_only(g, j, "profile");
  std::vector<MixedAction> xs;
  for (std::size_t i = 0; i < g.players(); ++i) {
    const std::string& p = g.player_names()[i];
    if (!j.contains(p)) throw InvalidInput("profile: missing player \"" + p + "\"");
    const json& m = j.at(p);
    if (!m.is_object()) throw InvalidInput("profile." + p + ": expected {action: probability}");
    MixedAction x(static_cast<std::size_t>(g.form().actions(i)), 0.0);
    for (const auto& [a, v] : m.items()) {
      x[static_cast<std::size_t>(action_index(g, i, a, "profile." + p))] = require_number(v, "profile." + p + "." + a);
    }
    xs.push_back(std::move(x));
  }
  try {
    return MixedProfile::make(std::move(xs));
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("profile: ") + e.what());
  }
}

nlohmann::ordered_json profile_to_json(const GeneralQuittingGame& g, const MixedProfile& x) {
  require_profile_shape(g, x);
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < g.players(); ++i) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (std::size_t a = 0; a < x[i].size(); ++a) m[action_name(g, i, static_cast<int>(a))] = x[i][a];
    out[g.player_names()[i]] = m;
  }
  return out;
}

PayoffVector payoff_vector_from_json(const GeneralQuittingGame& g, const json& raw) {
  const json& j = unwrap(raw, {"q"});
  require_players_only(g, j, "q");
  PayoffVector v;
  for (const std::string& p : g.player_names()) {
    if (!j.contains(p)) throw InvalidInput("q: missing player \"" + p + "\"");
    v.push_back(require_number(j.at(p), "q." + p));
  }
  return v;
}

nlohmann::ordered_json payoff_vector_to_json(const GeneralQuittingGame& g, std::span<const double> v) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < g.players(); ++i) out[g.player_names()[i]] = v[i];
  return out;
}

std::vector<MixedAction> alpha_from_json(const GeneralQuittingGame& g, const json& raw) {
  const json& j = unwrap(raw, {"alpha"});
  require_players_only(g, j, "alpha");
  std::vector<MixedAction> out;
  for (std::size_t i = 0; i < g.players(); ++i) {
    const std::string& p = g.player_names()[i];
    if (!j.contains(p)) throw InvalidInput("alpha: missing player \"" + p + "\"");
    const json& m = j.at(p);
    if (!m.is_object()) throw InvalidInput("alpha." + p + ": expected {continue action: probability}");
    MixedAction a(static_cast<std::size_t>(g.continue_count(i)), 0.0);
    for (const auto& [name, v] : m.items()) {
      const int k = action_index(g, i, name, "alpha." + p);
      if (k == GeneralQuittingGame::kQuit) throw InvalidInput("alpha." + p + ": Q is not a continue action");
      a[static_cast<std::size_t>(k - 1)] = require_number(v, "alpha." + p + "." + name);
    }
    out.push_back(std::move(a));
  }
  return out;
}

nlohmann::ordered_json alpha_to_json(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < g.players(); ++i) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < alpha[i].size(); ++k) m[g.continue_action_names(i)[k]] = alpha[i][k];
    out[g.player_names()[i]] = m;
  }
  return out;
}

std::vector<double> quit_vector_from_json(const GeneralQuittingGame& g, const json& raw) {
  const json& j = unwrap(raw, {"z", "xhat"});
  require_players_only(g, j, "z");
  std::vector<double> z;
  for (const std::string& p : g.player_names()) {
    if (!j.contains(p)) throw InvalidInput("z: missing player \"" + p + "\"");
    const double v = require_number(j.at(p), "z." + p);
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput("z." + p + ": quit probability outside [0,1]");
    z.push_back(v);
  }
  return z;
}

StrategyProfile strategy_from_json(const GeneralQuittingGame& g, const json& raw) {
  if (!(raw.is_object() && raw.contains("strategy"))) return stationary_profile(profile_from_json(g, raw));
  const json& j = raw.at("strategy");
  require_players_only(g, j, "strategy");
  auto mixed = [&](std::size_t i, const json& m, const std::string& where) {
    if (!m.is_object()) throw InvalidInput(where + ": expected {action: probability}");
    std::vector<MixedAction> xs;
    for (std::size_t k = 0; k < g.players(); ++k) xs.push_back(MixedAction(static_cast<std::size_t>(g.form().actions(k)), 0.0));
    for (const auto& [a, v] : m.items()) {
      xs[i][static_cast<std::size_t>(action_index(g, i, a, where))] = require_number(v, where + "." + a);
    }
    for (std::size_t k = 0; k < g.players(); ++k) {
      if (k != i) xs[k][0] = 1.0;
    }
    try {
      return MixedProfile::make(std::move(xs))[i];
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + ": " + e.what());
    }
  };
  StrategyProfile out;
  for (std::size_t i = 0; i < g.players(); ++i) {
    const std::string& p = g.player_names()[i];
    const std::string where = "strategy." + p;
    if (!j.contains(p)) throw InvalidInput(where + ": missing");
    const json& s = j.at(p);
    if (s.is_object() && s.contains("stationary")) {
      out.push_back(std::make_shared<StationaryStrategy>(mixed(i, s.at("stationary"), where + ".stationary")));
    } else if (s.is_object() && s.contains("rules")) {
      const json& rules = s.at("rules");
      if (!rules.is_array()) throw InvalidInput(where + ".rules: expected an array");
      std::vector<SignalThresholdStrategy::Rule> parsed;
      for (std::size_t r = 0; r < rules.size(); ++r) {
        const std::string rw = where + ".rules[" + std::to_string(r) + "]";
        const json& sig = require_key(rules[r], "signal", rw);
        if (!sig.is_array() || sig.size() != 2) throw InvalidInput(rw + ".signal: expected [lo, hi]");
        SignalThresholdStrategy::Rule rule;
        rule.lo = require_number(sig[0], rw + ".signal");
        rule.hi = require_number(sig[1], rw + ".signal");
        rule.action = mixed(i, require_key(rules[r], "action", rw), rw + ".action");
        parsed.push_back(std::move(rule));
      }
      try {
        out.push_back(std::make_shared<SignalThresholdStrategy>(std::move(parsed)));
      } catch (const InvalidInput& e) {
        throw InvalidInput(where + ": " + e.what());
      }
    } else {
      throw InvalidInput(where + ": expected \"stationary\" or \"rules\"");
    }
  }
  return out;
}

}  // namespace quitsolve
