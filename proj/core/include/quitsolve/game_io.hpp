#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "quitsolve/quitting_game.hpp"
#include "quitsolve/simulation.hpp"

namespace quitsolve {

// Parses JSON text; syntax errors become InvalidInput carrying the source
// name with line and column.
nlohmann::json parse_json_text(std::string_view text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

// Game file:
//   { "players": [..], "continue_actions": {player: [..]},
//     "payoffs": [{"profile": {player: action}, "u": {player: number}}],
//     "recursive": bool (optional) }
// "Q" names every player's quit action. Missing absorbing entries are an
// error; missing nonabsorbing entries are 0 when "recursive" is true.
GeneralQuittingGame game_from_json(const nlohmann::json& j);
nlohmann::ordered_json game_to_json(const GeneralQuittingGame& g);

// "(p1=Q, p2=c1)" style label of a pure profile.
std::string describe_profile(const GeneralQuittingGame& g, std::span<const int> profile);

// {player: {action: probability}}; omitted actions get 0. An outer
// {"profile": ...} wrapper is accepted.
MixedProfile profile_from_json(const GeneralQuittingGame& g, const nlohmann::json& j);
nlohmann::ordered_json profile_to_json(const GeneralQuittingGame& g, const MixedProfile& x);

// {player: number}; wrapper key "q" accepted.
PayoffVector payoff_vector_from_json(const GeneralQuittingGame& g, const nlohmann::json& j);
nlohmann::ordered_json payoff_vector_to_json(const GeneralQuittingGame& g, std::span<const double> v);

// {player: {continue action: probability}}; wrapper key "alpha" accepted.
std::vector<MixedAction> alpha_from_json(const GeneralQuittingGame& g, const nlohmann::json& j);
nlohmann::ordered_json alpha_to_json(const GeneralQuittingGame& g, const std::vector<MixedAction>& alpha);

// {player: quit probability}; wrapper keys "z" or "xhat" accepted.
std::vector<double> quit_vector_from_json(const GeneralQuittingGame& g, const nlohmann::json& j);

// {"strategy": {player: {"stationary": {action: p}}
//                     | {"rules": [{"signal": [lo, hi], "action": {action: p}}]}}}
// A plain profile file is read as a stationary strategy profile.
StrategyProfile strategy_from_json(const GeneralQuittingGame& g, const nlohmann::json& j);

}  // namespace quitsolve
