#include "legible/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace legible {

void LearningConfig::validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
        throw std::invalid_argument("LearningConfig: learning_rate must be in (0,1]");
    if (!(discount > 0.0 && discount <= 1.0))
        throw std::invalid_argument("LearningConfig: discount must be in (0,1]");
    if (!(epsilon_train >= 0.0 && epsilon_train <= 1.0))
        throw std::invalid_argument("LearningConfig: epsilon_train must be in [0,1]");
    if (episode_count < 1) throw std::invalid_argument("LearningConfig: episode_count must be >= 1");
    if (max_steps_per_episode < 1)
        throw std::invalid_argument("LearningConfig: max_steps_per_episode must be >= 1");
}

QTable q_learning_train(Env& env, const LearningConfig& cfg, const TrainProgress& progress) {
    cfg.validate();
    if (env.state_count() == 0 || env.action_count() == 0)
        throw std::invalid_argument("q_learning_train: degenerate environment");

    QTable q(env.state_count(), env.action_count(), 0.0);
    Rng rng(cfg.rng_seed);
    const std::size_t n_actions = env.action_count();

    for (int episode = 0; episode < cfg.episode_count; ++episode) {
        StateId state = env.reset(rng);
        double episode_return = 0.0;
        for (int t = 0; t < cfg.max_steps_per_episode && !env.done(); ++t) {
            ActionId action;
            if (canonical(rng) < cfg.epsilon_train)
                action = uniform_index(rng, n_actions);
            else
                action = q.greedy_action(state);

            const Transition tr = env.step(action);
            episode_return += tr.reward;

            double target = tr.reward;
            if (!tr.done) {
                const auto next_row = q.row(tr.next_state);
                target += cfg.discount * *std::max_element(next_row.begin(), next_row.end());
            }
            const double old = q.at(state, action);
            q.set(state, action, old + cfg.learning_rate * (target - old));
            state = tr.next_state;
        }
        if (progress) progress(episode, episode_return);
    }
    return q;
}

QTable value_iteration(const EnumerableMdp& mdp, double gamma, double tol, int max_iterations) {
    if (mdp.state_count() == 0 || mdp.action_count() == 0)
        throw std::invalid_argument("value_iteration: degenerate MDP");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument("value_iteration: gamma must be in [0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be positive");

    const std::size_t n_states = mdp.state_count();
    const std::size_t n_actions = mdp.action_count();
    QTable q(n_states, n_actions, 0.0);
    std::vector<double> value(n_states, 0.0);

    for (int iter = 0; iter < max_iterations; ++iter) {
        double residual = 0.0;
        for (StateId s = 0; s < n_states; ++s) {
            if (mdp.terminal(s)) continue;
            for (ActionId a = 0; a < n_actions; ++a) {
                double backup = 0.0;
                for (const MdpOutcome& o : mdp.outcomes(s, a)) {
                    double future = mdp.terminal(o.next) ? 0.0 : value[o.next];
                    backup += o.probability * (o.reward + gamma * future);
                }
                residual = std::max(residual, std::abs(backup - q.at(s, a)));
                q.set(s, a, backup);
            }
        }
        for (StateId s = 0; s < n_states; ++s) {
            const auto row = q.row(s);
            value[s] = *std::max_element(row.begin(), row.end());
        }
        if (residual < tol) return q;
    }
    throw std::runtime_error("value_iteration: no convergence within the iteration cap");
}

OracleResult tunnel_max_reward(const Tunnel& tunnel, ColorId color) {
    if (color >= static_cast<ColorId>(tunnel.color_count()))
        throw std::invalid_argument("tunnel_max_reward: color out of range");

    const int length = tunnel.length();
    const int width = tunnel.width();
    constexpr double kBlocked = -std::numeric_limits<double>::infinity();

    // value[col][row] = max reward over paths from the start to (row, col).
    // The bound covers truncated paths too (a rollout may die on an
    // obstacle after collecting), so the result is the best over every
    // reachable cell, not only the final column.
    std::vector<std::vector<double>> value(length, std::vector<double>(width, kBlocked));
    std::vector<std::vector<int>> parent(length, std::vector<int>(width, -1));
    value[0][tunnel.start_row()] = 0.0;

    int last_col = 0;
    for (int col = 1; col < length; ++col) {
        bool any = false;
        for (int row = 0; row < width; ++row) {
            if (tunnel.obstacle_at(row, col)) continue;
            const double gain = tunnel.has_color(row, col, color) ? 1.0 : 0.0;
            for (int prev = std::max(0, row - 1); prev <= std::min(width - 1, row + 1); ++prev) {
                if (value[col - 1][prev] == kBlocked) continue;
                const double candidate = value[col - 1][prev] + gain;
                if (candidate > value[col][row]) {
                    value[col][row] = candidate;
                    parent[col][row] = prev;
                }
            }
            if (value[col][row] != kBlocked) any = true;
        }
        if (!any) break;
        last_col = col;
    }

    OracleResult result;
    result.feasible = last_col == length - 1;

    int end_col = 0;
    int end_row = tunnel.start_row();
    double best = 0.0;
    for (int col = 1; col <= last_col; ++col) {
        for (int row = 0; row < width; ++row) {
            // ">=" so equal-value cells prefer the longest path, which ends
            // at the final column whenever the tunnel is feasible.
            if (value[col][row] != kBlocked && value[col][row] >= best) {
                best = value[col][row];
                end_col = col;
                end_row = row;
            }
        }
    }
    result.max_reward = best;

    std::vector<StateId> path;
    int row = end_row;
    for (int col = end_col; col >= 1; --col) {
        path.push_back(tunnel.position_id(row, col));
        row = parent[col][row];
    }
    path.push_back(tunnel.position_id(tunnel.start_row(), 0));
    std::reverse(path.begin(), path.end());
    result.optimal_path = std::move(path);
    return result;
}

} // namespace legible
