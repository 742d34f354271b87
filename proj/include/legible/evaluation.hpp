#pragma once

#include "legible/gridworld.hpp"
#include "legible/learning.hpp"
#include "legible/mirror.hpp"
#include "legible/tunnel.hpp"

#include <functional>
#include <span>
#include <vector>

namespace legible {

struct TrajectoryStep {
    StateId state = 0; // pursued policy's observation before the action
    ActionId action = 0;
    double reward = 0.0;
    StateId next_state = 0;
    bool done = false;
    bool hit_obstacle = false;
    std::uint32_t collected_colors = 0;
    int row = 0, col = 0;           // world position before the action
    int next_row = 0, next_col = 0; // after
    std::vector<StateId> policy_states; // each policy's view before the action
};

struct Trajectory {
    std::vector<TrajectoryStep> steps;
    std::vector<double> reward_by_color; // gross pickups per color
    double total_reward = 0.0;           // net, punishments included
    bool success = false;
    bool truncated = false;
    std::uint64_t seed = 0;
    int env_rows = 0, env_cols = 0;
    int start_row = 0, start_col = 0;
};

/// Episode adapter driven by the rollout harness. policy_states() exposes
/// one observation per ensemble policy so the selection closure and the
/// legibility metric can evaluate every candidate policy's view.
class RolloutEnv {
public:
    virtual ~RolloutEnv() = default;
    virtual std::size_t policy_count() const = 0;
    virtual std::size_t color_count() const = 0;
    virtual int rows() const = 0;
    virtual int cols() const = 0;
    virtual void begin(Rng& rng) = 0;
    virtual bool done() const = 0;
    virtual bool succeeded() const = 0;
    virtual StateId own_state() const = 0;
    virtual std::vector<StateId> policy_states() const = 0;
    virtual int agent_row() const = 0;
    virtual int agent_col() const = 0;
    virtual Transition apply(ActionId a) = 0;
};

/// Rollout over a fixed tunnel; policy i observes color i.
class TunnelRollout : public RolloutEnv {
public:
    TunnelRollout(const Tunnel& tunnel, ColorId own_color);

    std::size_t policy_count() const override;
    std::size_t color_count() const override;
    int rows() const override { return sim_.tunnel().width(); }
    int cols() const override { return sim_.tunnel().length(); }
    void begin(Rng& rng) override;
    bool done() const override { return sim_.done(); }
    bool succeeded() const override { return sim_.succeeded(); }
    StateId own_state() const override { return sim_.observe_own(); }
    std::vector<StateId> policy_states() const override;
    int agent_row() const override { return sim_.agent_row(); }
    int agent_col() const override { return sim_.agent_col(); }
    Transition apply(ActionId a) override { return sim_.step(a); }

private:
    TunnelSim sim_;
};

/// Rollout from a fixed start cell; all policies share the grid state.
class GridRollout : public RolloutEnv {
public:
    GridRollout(GridWorld grid, GridWorld::Cell start, std::size_t policy_count);

    std::size_t policy_count() const override { return policy_count_; }
    std::size_t color_count() const override { return grid_.goals().size(); }
    int rows() const override { return grid_.size(); }
    int cols() const override { return grid_.size(); }
    void begin(Rng& rng) override;
    bool done() const override { return grid_.done(); }
    bool succeeded() const override { return reached_goal_; }
    StateId own_state() const override;
    std::vector<StateId> policy_states() const override;
    int agent_row() const override { return grid_.agent().first; }
    int agent_col() const override { return grid_.agent().second; }
    Transition apply(ActionId a) override;

private:
    GridWorld grid_;
    GridWorld::Cell start_;
    std::size_t policy_count_;
    bool reached_goal_ = false;
};

using PolicyFn = std::function<ActionId(std::span<const StateId>, Rng&)>;

/// Action selection over the regularized Q-row. The models must outlive
/// the returned closure.
PolicyFn make_legible_policy(const AgentModel& agent, const ObserverModel& observer,
                             const LegibilityConfig& cfg, const DistributionModel& selection);

/// Runs one seeded episode, recording every transition. Episodes that
/// exceed max_steps are truncated and flagged.
Trajectory rollout(RolloutEnv& env, const PolicyFn& policy, int max_steps, std::uint64_t seed);

double success_rate(std::span<const Trajectory> trajectories);

/// Mean over episodes of collected / oracle maximum for one color.
/// Episodes whose oracle maximum is zero are excluded; NaN when every
/// episode is excluded.
double reward_ratio(std::span<const Trajectory> trajectories, ColorId color,
                    std::span<const double> oracle_max);

/// Mean posterior probability of the pursued policy over all transitions,
/// pooled across episodes with equal weight.
double legibility_score(std::span<const Trajectory> trajectories, const ObserverModel& observer);

double legibility_gain(double l_alpha, double l_zero);

struct Heatmap {
    int rows = 0;
    int cols = 0;
    std::vector<double> frequency; // visits per cell / episode count

    double at(int row, int col) const;
};

Heatmap trajectory_heatmap(std::span<const Trajectory> trajectories);

/// Evaluation batch: tunnels regenerated until feasible with reachable
/// own-color reward, plus per-color oracle maxima and per-episode seeds.
struct TunnelBatch {
    TunnelSpec spec;
    ColorId own_color = 0;
    std::vector<Tunnel> tunnels;
    std::vector<std::uint64_t> rollout_seeds;
    std::vector<std::vector<double>> oracle_max; // [episode][color]
};

TunnelBatch make_tunnel_batch(const TunnelSpec& spec, ColorId own_color, int episodes,
                              std::uint64_t base_seed);

struct SweepRow {
    double alpha = 0.0;
    double reward_ratio_own = 0.0;
    double reward_ratio_other = 0.0; // NaN when no other colors apply
    double success_rate = 0.0;
    double legibility = 0.0;
    double legibility_gain = 1.0;
    double mean_min_other_goal_distance = 0.0; // NaN outside gridworld sweeps
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::vector<Trajectory>> trajectories; // parallel to rows
};

/// Rolls the legible policy over the batch once per alpha; alphas must
/// include 0 (the gain baseline). jobs > 1 runs episodes concurrently;
/// results are identical regardless of jobs.
SweepResult alpha_sweep_tunnel(const TunnelBatch& batch, const AgentModel& agent,
                               const ObserverModel& observer, const std::vector<double>& alphas,
                               double log_floor, const DistributionModel& selection, int jobs = 1);

/// Greedy rollouts from every non-goal start cell per alpha. The grid's
/// active goal must match the pursued policy.
SweepResult alpha_sweep_gridworld(const GridWorld& grid, const AgentModel& agent,
                                  const ObserverModel& observer, const std::vector<double>& alphas,
                                  double log_floor, const DistributionModel& selection,
                                  int max_steps, std::uint64_t base_seed);

/// Mean over trajectories of the closest approach to any non-active goal.
double mean_min_other_goal_distance(std::span<const Trajectory> trajectories,
                                    const GridWorld& grid);

} // namespace legible
