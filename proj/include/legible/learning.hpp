#pragma once

#include "legible/env.hpp"
#include "legible/tunnel.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace legible {

struct LearningConfig {
    double learning_rate = 0.1;
    double discount = 0.98;
    double epsilon_train = 0.2;
    int episode_count = 10000;
    int max_steps_per_episode = 1000;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Called every episode with (episode index, return); hook for progress
/// output. May be empty.
using TrainProgress = std::function<void(int, double)>;

/// One-step tabular Q-learning with an epsilon-greedy behavior policy.
/// Deterministic given cfg.rng_seed.
QTable q_learning_train(Env& env, const LearningConfig& cfg, const TrainProgress& progress = {});

/// Fixed-point Q* by repeated Bellman backups, stopping when the sup-norm
/// residual drops below tol. Throws on non-convergence.
QTable value_iteration(const EnumerableMdp& mdp, double gamma, double tol, int max_iterations = 100000);

struct OracleResult {
    double max_reward = 0.0;
    std::vector<StateId> optimal_path; // tunnel position ids, start included
    bool feasible = true;              // false when every row is blocked at some column
};

/// Exact maximum reward collectible for one color by any obstacle-avoiding
/// path, by dynamic programming column by column. Infeasible tunnels report
/// the best over feasible prefixes.
OracleResult tunnel_max_reward(const Tunnel& tunnel, ColorId color);

} // namespace legible
