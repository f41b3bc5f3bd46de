#pragma once

#include <string>
#include <variant>

#include "dsbr/game.hpp"

namespace dsbr {

using Game = std::variant<MatrixGame, MarkovGame>;

// Game file format (JSON):
//   {"type": "matrix", "payoff": [[...], ...]}
//   {"type": "markov", "n_states": N, "n_actions": [m, n], "gamma": g,
//    "transition": [[[[...]]]],   // indexed [s][a1][a2][s']
//    "reward": [[[...]]]}         // indexed [s][a1][a2]
// Loading validates every type invariant and reports the first violation
// with its indices.
Game parse_game_json(const std::string& text);
Game load_game(const std::string& path);
std::string game_to_json(const Game& game);
void save_game(const Game& game, const std::string& path);

// Policy file format (JSON): {"pi1": [[...], ...], "pi2": [[...], ...]},
// one row per state. Single policies use {"pi": [[...], ...]}.
JointPolicy parse_joint_policy_json(const std::string& text);
JointPolicy load_joint_policy(const std::string& path);
std::string joint_policy_to_json(const JointPolicy& joint);
Policy parse_policy_json(const std::string& text);
Policy load_policy(const std::string& path);

int a_max_of(const Game& game);
double gamma_of(const Game& game);

}  // namespace dsbr
