#include "legible/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace legible {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TunnelRollout::TunnelRollout(const Tunnel& tunnel, ColorId own_color) : sim_(tunnel, own_color) {}

std::size_t TunnelRollout::policy_count() const {
    return static_cast<std::size_t>(sim_.tunnel().color_count());
}

std::size_t TunnelRollout::color_count() const {
    return static_cast<std::size_t>(sim_.tunnel().color_count());
}

void TunnelRollout::begin(Rng&) { sim_.reset(); }

std::vector<StateId> TunnelRollout::policy_states() const {
    std::vector<StateId> states(policy_count());
    for (std::size_t c = 0; c < states.size(); ++c)
        states[c] = sim_.observe_color(static_cast<ColorId>(c));
    return states;
}

GridRollout::GridRollout(GridWorld grid, GridWorld::Cell start, std::size_t policy_count)
    : grid_(std::move(grid)), start_(start), policy_count_(policy_count) {
    if (policy_count_ == 0) throw std::invalid_argument("GridRollout: no policies");
}

void GridRollout::begin(Rng&) {
    grid_.reset_at(start_);
    reached_goal_ = false;
}

StateId GridRollout::own_state() const { return grid_.state_of(grid_.agent()); }

std::vector<StateId> GridRollout::policy_states() const {
    return std::vector<StateId>(policy_count_, own_state());
}

Transition GridRollout::apply(ActionId a) {
    const Transition t = grid_.step(a);
    if (t.done) reached_goal_ = true;
    return t;
}

PolicyFn make_legible_policy(const AgentModel& agent, const ObserverModel& observer,
                             const LegibilityConfig& cfg, const DistributionModel& selection) {
    cfg.validate();
    validate(selection);
    return [&agent, &observer, cfg, selection](std::span<const StateId> states, Rng& rng) {
        return legible_action(agent, observer, states, cfg, selection, rng);
    };
}

Trajectory rollout(RolloutEnv& env, const PolicyFn& policy, int max_steps, std::uint64_t seed) {
    if (max_steps < 1) throw std::invalid_argument("rollout: max_steps must be positive");
    Rng rng(seed);
    env.begin(rng);

    Trajectory traj;
    traj.seed = seed;
    traj.env_rows = env.rows();
    traj.env_cols = env.cols();
    traj.start_row = env.agent_row();
    traj.start_col = env.agent_col();
    traj.reward_by_color.assign(env.color_count(), 0.0);

    for (int step = 0; step < max_steps && !env.done(); ++step) {
        TrajectoryStep record;
        record.policy_states = env.policy_states();
        record.state = env.own_state();
        record.row = env.agent_row();
        record.col = env.agent_col();
        record.action = policy(record.policy_states, rng);

        const Transition t = env.apply(record.action);
        record.reward = t.reward;
        record.next_state = t.next_state;
        record.done = t.done;
        record.hit_obstacle = t.info.hit_obstacle;
        record.collected_colors = t.info.collected_colors;
        record.next_row = env.agent_row();
        record.next_col = env.agent_col();

        traj.total_reward += t.reward;
        for (std::size_t c = 0; c < traj.reward_by_color.size(); ++c)
            if ((t.info.collected_colors >> c) & 1u) traj.reward_by_color[c] += 1.0;
        traj.steps.push_back(std::move(record));
    }
    traj.truncated = !env.done();
    traj.success = env.succeeded();
    return traj;
}

double success_rate(std::span<const Trajectory> trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("success_rate: empty batch");
    std::size_t hits = 0;
    for (const Trajectory& t : trajectories) hits += t.success ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(trajectories.size());
}

double reward_ratio(std::span<const Trajectory> trajectories, ColorId color,
                    std::span<const double> oracle_max) {
    if (trajectories.size() != oracle_max.size())
        throw std::invalid_argument("reward_ratio: one oracle value per episode required");
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        if (!(oracle_max[i] > 0.0)) continue;
        if (color >= trajectories[i].reward_by_color.size())
            throw std::invalid_argument("reward_ratio: color out of range");
        sum += trajectories[i].reward_by_color[color] / oracle_max[i];
        ++counted;
    }
    if (counted == 0) return kNaN;
    return sum / static_cast<double>(counted);
}

double legibility_score(std::span<const Trajectory> trajectories, const ObserverModel& observer) {
    const std::size_t pursued = observer.ensemble.pursued_index();
    double sum = 0.0;
    std::size_t transitions = 0;
    for (const Trajectory& traj : trajectories) {
        for (const TrajectoryStep& step : traj.steps) {
            const PosteriorResult post =
                observer_posterior(observer, step.policy_states, step.action);
            sum += post.probabilities[pursued];
            ++transitions;
        }
    }
    if (transitions == 0) throw std::invalid_argument("legibility_score: no transitions");
    return sum / static_cast<double>(transitions);
}

double legibility_gain(double l_alpha, double l_zero) {
    if (!(l_zero > 0.0)) throw std::invalid_argument("legibility_gain: zero baseline");
    return l_alpha / l_zero;
}

double Heatmap::at(int row, int col) const {
    if (row < 0 || row >= rows || col < 0 || col >= cols)
        throw std::out_of_range("Heatmap: cell out of bounds");
    return frequency[static_cast<std::size_t>(row) * cols + col];
}

Heatmap trajectory_heatmap(std::span<const Trajectory> trajectories) {
    if (trajectories.empty()) throw std::invalid_argument("trajectory_heatmap: empty batch");
    Heatmap map;
    map.rows = trajectories[0].env_rows;
    map.cols = trajectories[0].env_cols;
    map.frequency.assign(static_cast<std::size_t>(map.rows) * map.cols, 0.0);
    for (const Trajectory& traj : trajectories) {
        if (traj.env_rows != map.rows || traj.env_cols != map.cols)
            throw std::invalid_argument("trajectory_heatmap: mixed environments");
        auto bump = [&](int row, int col) {
            map.frequency[static_cast<std::size_t>(row) * map.cols + col] += 1.0;
        };
        bump(traj.start_row, traj.start_col);
        for (const TrajectoryStep& step : traj.steps) bump(step.next_row, step.next_col);
    }
    for (double& f : map.frequency) f /= static_cast<double>(trajectories.size());
    return map;
}

TunnelBatch make_tunnel_batch(const TunnelSpec& spec, ColorId own_color, int episodes,
                              std::uint64_t base_seed) {
    spec.validate();
    if (own_color >= static_cast<ColorId>(spec.colors))
        throw std::invalid_argument("make_tunnel_batch: own color out of range");
    if (episodes < 1) throw std::invalid_argument("make_tunnel_batch: episodes must be positive");

    TunnelBatch batch;
    batch.spec = spec;
    batch.own_color = own_color;
    batch.tunnels.reserve(episodes);
    batch.rollout_seeds.reserve(episodes);
    batch.oracle_max.reserve(episodes);

    for (int i = 0; i < episodes; ++i) {
        std::uint64_t tunnel_seed = mix_seed(base_seed, static_cast<std::uint64_t>(i));
        for (;;) {
            TunnelSpec instance = spec;
            instance.seed = tunnel_seed;
            Tunnel t = tunnel_generate(instance);
            const OracleResult own = tunnel_max_reward(t, own_color);
            // Skip tunnels with no reachable own-color reward (or no path
            // through at all): they carry no signal for the ratios.
            if (own.feasible && own.max_reward > 0.0) {
                std::vector<double> maxima(spec.colors);
                for (int c = 0; c < spec.colors; ++c)
                    maxima[c] = tunnel_max_reward(t, static_cast<ColorId>(c)).max_reward;
                batch.tunnels.push_back(std::move(t));
                batch.oracle_max.push_back(std::move(maxima));
                break;
            }
            tunnel_seed = mix_seed(tunnel_seed, 0xA11CEuLL);
        }
        batch.rollout_seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
    }
    return batch;
}

namespace {

void check_alphas(const std::vector<double>& alphas) {
    if (alphas.empty()) throw std::invalid_argument("alpha_sweep: no alphas");
    for (double a : alphas)
        if (!(a >= 0.0)) throw std::invalid_argument("alpha_sweep: alphas must be non-negative");
    if (std::find(alphas.begin(), alphas.end(), 0.0) == alphas.end())
        throw std::invalid_argument("alpha_sweep: alphas must include 0 for the gain baseline");
}

void fill_gains(SweepResult& result, const std::vector<double>& alphas) {
    std::size_t zero_index = 0;
    for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] == 0.0) zero_index = i;
    const double l_zero = result.rows[zero_index].legibility;
    for (SweepRow& row : result.rows) row.legibility_gain = legibility_gain(row.legibility, l_zero);
}

/// Runs fn(i) for i in [0, count) across `jobs` threads; fn writes only
/// to its own slot, so the schedule cannot affect results.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& t : workers) t.join();
}

} // namespace

SweepResult alpha_sweep_tunnel(const TunnelBatch& batch, const AgentModel& agent,
                               const ObserverModel& observer, const std::vector<double>& alphas,
                               double log_floor, const DistributionModel& selection, int jobs) {
    check_alphas(alphas);
    if (batch.tunnels.empty()) throw std::invalid_argument("alpha_sweep_tunnel: empty batch");
    const int episodes = static_cast<int>(batch.tunnels.size());
    const int colors = batch.spec.colors;
    const int max_steps = batch.spec.length; // forced advance bounds episodes by L-1

    SweepResult result;
    for (double alpha : alphas) {
        LegibilityConfig cfg;
        cfg.alpha = alpha;
        cfg.log_floor = log_floor;
        const PolicyFn policy = make_legible_policy(agent, observer, cfg, selection);

        std::vector<Trajectory> trajectories(episodes);
        parallel_for(episodes, jobs, [&](int i) {
            TunnelRollout env(batch.tunnels[i], batch.own_color);
            trajectories[i] = rollout(env, policy, max_steps, batch.rollout_seeds[i]);
        });

        std::vector<double> own_oracle(episodes);
        for (int i = 0; i < episodes; ++i) own_oracle[i] = batch.oracle_max[i][batch.own_color];

        SweepRow row;
        row.alpha = alpha;
        row.reward_ratio_own = reward_ratio(trajectories, batch.own_color, own_oracle);
        double other_sum = 0.0;
        int other_count = 0;
        for (int c = 0; c < colors; ++c) {
            if (static_cast<ColorId>(c) == batch.own_color) continue;
            std::vector<double> oracle(episodes);
            for (int i = 0; i < episodes; ++i) oracle[i] = batch.oracle_max[i][c];
            const double ratio = reward_ratio(trajectories, static_cast<ColorId>(c), oracle);
            if (!std::isnan(ratio)) {
                other_sum += ratio;
                ++other_count;
            }
        }
        row.reward_ratio_other = other_count > 0 ? other_sum / other_count : kNaN;
        row.success_rate = success_rate(trajectories);
        row.legibility = legibility_score(trajectories, observer);
        row.mean_min_other_goal_distance = kNaN;
        result.rows.push_back(row);
        result.trajectories.push_back(std::move(trajectories));
    }
    fill_gains(result, alphas);
    return result;
}

SweepResult alpha_sweep_gridworld(const GridWorld& grid, const AgentModel& agent,
                                  const ObserverModel& observer, const std::vector<double>& alphas,
                                  double log_floor, const DistributionModel& selection,
                                  int max_steps, std::uint64_t base_seed) {
    check_alphas(alphas);
    if (grid.active_goal() != agent.ensemble.pursued_index())
        throw std::invalid_argument("alpha_sweep_gridworld: active goal must match pursued policy");

    std::vector<GridWorld::Cell> starts;
    for (int r = 0; r < grid.size(); ++r)
        for (int c = 0; c < grid.size(); ++c)
            if (!grid.is_goal_cell({r, c})) starts.push_back({r, c});

    SweepResult result;
    for (double alpha : alphas) {
        LegibilityConfig cfg;
        cfg.alpha = alpha;
        cfg.log_floor = log_floor;
        const PolicyFn policy = make_legible_policy(agent, observer, cfg, selection);

        std::vector<Trajectory> trajectories;
        trajectories.reserve(starts.size());
        for (std::size_t i = 0; i < starts.size(); ++i) {
            GridRollout env(grid, starts[i], agent.ensemble.size());
            trajectories.push_back(
                rollout(env, policy, max_steps, base_seed + static_cast<std::uint64_t>(i)));
        }

        SweepRow row;
        row.alpha = alpha;
        double return_sum = 0.0;
        for (const Trajectory& t : trajectories) return_sum += t.total_reward;
        row.reward_ratio_own = return_sum / static_cast<double>(trajectories.size());
        row.reward_ratio_other = kNaN;
        row.success_rate = success_rate(trajectories);
        row.legibility = legibility_score(trajectories, observer);
        row.mean_min_other_goal_distance = mean_min_other_goal_distance(trajectories, grid);
        result.rows.push_back(row);
        result.trajectories.push_back(std::move(trajectories));
    }
    fill_gains(result, alphas);
    return result;
}

double mean_min_other_goal_distance(std::span<const Trajectory> trajectories,
                                    const GridWorld& grid) {
    if (trajectories.empty())
        throw std::invalid_argument("mean_min_other_goal_distance: empty batch");
    double sum = 0.0;
    for (const Trajectory& traj : trajectories) {
        double best = std::numeric_limits<double>::infinity();
        auto visit = [&](int row, int col) {
            for (std::size_t g = 0; g < grid.goals().size(); ++g) {
                if (g == grid.active_goal()) continue;
                const auto [gr, gc] = grid.goals()[g];
                best = std::min(best,
                                static_cast<double>(std::abs(row - gr) + std::abs(col - gc)));
            }
        };
        visit(traj.start_row, traj.start_col);
        for (const TrajectoryStep& step : traj.steps) visit(step.next_row, step.next_col);
        sum += best;
    }
    return sum / static_cast<double>(trajectories.size());
}

} // namespace legible
