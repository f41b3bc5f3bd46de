#include "dsbr/game_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsbr/errors.hpp"

namespace dsbr {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

Mat parse_matrix(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw ValidationError(name + ": expected a 2-d array");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw ValidationError(name + ": row " + std::to_string(r) + " has inconsistent length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) {
                throw ValidationError(name + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                      "] is not a number");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

Policy policy_from_json(const json& j, const std::string& name) {
    Policy p;
    p.probs = parse_matrix(j, name);
    p.validate();
    return p;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

Game parse_game_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("type")) {
        throw ValidationError("game JSON must be an object with a \"type\" field");
    }
    const std::string type = j["type"].get<std::string>();
    if (type == "matrix") {
        if (!j.contains("payoff")) throw ValidationError("matrix game: missing \"payoff\"");
        return MatrixGame(parse_matrix(j["payoff"], "payoff"));
    }
    if (type == "markov") {
        for (const char* key : {"n_states", "n_actions", "gamma", "transition", "reward"}) {
            if (!j.contains(key)) {
                throw ValidationError(std::string("markov game: missing \"") + key + "\"");
            }
        }
        const int n_states = j["n_states"].get<int>();
        if (!j["n_actions"].is_array() || j["n_actions"].size() != 2) {
            throw ValidationError("markov game: \"n_actions\" must be a pair");
        }
        const int a1 = j["n_actions"][0].get<int>();
        const int a2 = j["n_actions"][1].get<int>();
        const double gamma = j["gamma"].get<double>();
        if (n_states < 1 || a1 < 1 || a2 < 1) {
            throw ValidationError("markov game: dimensions must be positive");
        }

        const json& jt = j["transition"];
        const json& jr = j["reward"];
        auto dim_error = [](const std::string& what) {
            return ValidationError("markov game: " + what);
        };
        if (!jt.is_array() || static_cast<int>(jt.size()) != n_states) {
            throw dim_error("transition must have n_states outer entries");
        }
        if (!jr.is_array() || static_cast<int>(jr.size()) != n_states) {
            throw dim_error("reward must have n_states outer entries");
        }
        std::vector<double> transition;
        std::vector<double> reward;
        transition.reserve(static_cast<std::size_t>(n_states) * a1 * a2 * n_states);
        reward.reserve(static_cast<std::size_t>(n_states) * a1 * a2);
        for (int s = 0; s < n_states; ++s) {
            if (static_cast<int>(jt[s].size()) != a1 || static_cast<int>(jr[s].size()) != a1) {
                throw dim_error("entry [" + std::to_string(s) + "] must have n_actions[0] rows");
            }
            for (int i = 0; i < a1; ++i) {
                if (static_cast<int>(jt[s][i].size()) != a2 ||
                    static_cast<int>(jr[s][i].size()) != a2) {
                    throw dim_error("entry [" + std::to_string(s) + "][" + std::to_string(i) +
                                    "] must have n_actions[1] columns");
                }
                for (int k = 0; k < a2; ++k) {
                    if (static_cast<int>(jt[s][i][k].size()) != n_states) {
                        throw dim_error("transition[" + std::to_string(s) + "][" +
                                        std::to_string(i) + "][" + std::to_string(k) +
                                        "] must list n_states probabilities");
                    }
                    reward.push_back(jr[s][i][k].get<double>());
                    for (int s2 = 0; s2 < n_states; ++s2) {
                        transition.push_back(jt[s][i][k][s2].get<double>());
                    }
                }
            }
        }
        return MarkovGame(n_states, a1, a2, gamma, std::move(transition), std::move(reward));
    }
    throw ValidationError("unknown game type: \"" + type + "\"");
}

Game load_game(const std::string& path) { return parse_game_json(read_file(path)); }

std::string game_to_json(const Game& game) {
    json j;
    if (const auto* mg = std::get_if<MatrixGame>(&game)) {
        j["type"] = "matrix";
        j["payoff"] = matrix_to_json(mg->payoff());
    } else {
        const auto& g = std::get<MarkovGame>(game);
        j["type"] = "markov";
        j["n_states"] = g.n_states();
        j["n_actions"] = {g.n_actions(1), g.n_actions(2)};
        j["gamma"] = g.gamma();
        json jt = json::array();
        json jr = json::array();
        for (int s = 0; s < g.n_states(); ++s) {
            json ts = json::array();
            json rs = json::array();
            for (int a1 = 0; a1 < g.n_actions(1); ++a1) {
                json ta = json::array();
                json ra = json::array();
                for (int a2 = 0; a2 < g.n_actions(2); ++a2) {
                    json probs = json::array();
                    for (int s2 = 0; s2 < g.n_states(); ++s2) probs.push_back(g.prob(s, a1, a2, s2));
                    ta.push_back(std::move(probs));
                    ra.push_back(g.reward1(s, a1, a2));
                }
                ts.push_back(std::move(ta));
                rs.push_back(std::move(ra));
            }
            jt.push_back(std::move(ts));
            jr.push_back(std::move(rs));
        }
        j["transition"] = std::move(jt);
        j["reward"] = std::move(jr);
    }
    return j.dump(2);
}

void save_game(const Game& game, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << game_to_json(game) << "\n";
}

JointPolicy parse_joint_policy_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object() || !j.contains("pi1") || !j.contains("pi2")) {
        throw ValidationError("joint policy JSON must contain \"pi1\" and \"pi2\"");
    }
    return JointPolicy{policy_from_json(j["pi1"], "pi1"), policy_from_json(j["pi2"], "pi2")};
}

JointPolicy load_joint_policy(const std::string& path) {
    return parse_joint_policy_json(read_file(path));
}

std::string joint_policy_to_json(const JointPolicy& joint) {
    json j;
    j["pi1"] = matrix_to_json(joint.p1.probs);
    j["pi2"] = matrix_to_json(joint.p2.probs);
    return j.dump(2);
}

Policy parse_policy_json(const std::string& text) {
    const json j = parse(text);
    if (j.is_object() && j.contains("pi")) return policy_from_json(j["pi"], "pi");
    if (j.is_array()) return policy_from_json(j, "pi");
    throw ValidationError("policy JSON must be {\"pi\": [[...]]} or a bare 2-d array");
}

Policy load_policy(const std::string& path) { return parse_policy_json(read_file(path)); }

int a_max_of(const Game& game) {
    return std::visit([](const auto& g) { return g.a_max(); }, game);
}

double gamma_of(const Game& game) {
    if (std::holds_alternative<MatrixGame>(game)) return 0.0;
    return std::get<MarkovGame>(game).gamma();
}

}  // namespace dsbr
