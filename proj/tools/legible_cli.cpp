#include "legible/evaluation.hpp"
#include "legible/learning.hpp"
#include "legible/manifest.hpp"
#include "legible/qtable_io.hpp"
#include "legible/svg_render.hpp"
#include "legible/text_format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace legible;

namespace {

// Exit codes: 0 ok, 1 usage, 2 validation, 3 runtime failure.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string env = "tunnel";
    std::string out_dir;
    std::string manifest_path;
    std::vector<double> alphas = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
    double alpha = 1.0;
    int episodes = 200;
    std::uint64_t seed = 0;
    std::string transform_f = "epsilon-greedy";
    std::string transform_g = "epsilon-greedy";
    double epsilon = 0.1;
    double temperature = 1.0;
    int jobs = 1;
    bool verbose = false;
    int pursued = 0;
    int train_episodes = 0; // 0 = per-environment default
    double log_floor = -1e6;
    int grid_size = 7;
    TunnelSpec tunnel;

    json to_json() const {
        json doc;
        doc["env"] = env;
        doc["out"] = out_dir;
        doc["manifest"] = manifest_path;
        doc["alphas"] = alphas;
        doc["alpha"] = alpha;
        doc["episodes"] = episodes;
        doc["seed"] = seed;
        doc["transform_f"] = transform_f;
        doc["transform_g"] = transform_g;
        doc["epsilon"] = epsilon;
        doc["temperature"] = temperature;
        doc["jobs"] = jobs;
        doc["verbose"] = verbose;
        doc["pursued"] = pursued;
        doc["train_episodes"] = train_episodes;
        doc["log_floor"] = log_floor;
        doc["grid_size"] = grid_size;
        doc["tunnel"] = json::parse(tunnel_spec_to_json(tunnel));
        return doc;
    }

    void apply_file(const json& doc) {
        env = doc.value("env", env);
        out_dir = doc.value("out", out_dir);
        manifest_path = doc.value("manifest", manifest_path);
        if (doc.contains("alphas")) alphas = doc.at("alphas").get<std::vector<double>>();
        alpha = doc.value("alpha", alpha);
        episodes = doc.value("episodes", episodes);
        seed = doc.value("seed", seed);
        transform_f = doc.value("transform_f", transform_f);
        transform_g = doc.value("transform_g", transform_g);
        epsilon = doc.value("epsilon", epsilon);
        temperature = doc.value("temperature", temperature);
        jobs = doc.value("jobs", jobs);
        verbose = doc.value("verbose", verbose);
        pursued = doc.value("pursued", pursued);
        train_episodes = doc.value("train_episodes", train_episodes);
        log_floor = doc.value("log_floor", log_floor);
        grid_size = doc.value("grid_size", grid_size);
        if (doc.contains("tunnel")) tunnel = tunnel_spec_from_json(doc.at("tunnel").dump());
    }
};

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw ValidationError("an output directory is required (--out)");
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    write_text(dir / "effective_config.json", cfg.to_json().dump(1) + "\n");
    return dir;
}

std::string csv_value(double v) { return std::isnan(v) ? "na" : fmt_full(v); }

std::string alpha_tag(double alpha) {
    std::string tag = fmt_full(alpha);
    for (char& c : tag)
        if (c == '.') c = '_';
    return tag;
}

std::vector<GridWorld::Cell> default_goals(int size) {
    return {{0, 0}, {0, size - 1}, {size - 1, size - 1}};
}

GridWorld grid_from_manifest(const EnsembleManifest& m, std::size_t active) {
    return GridWorld(m.grid_size, m.grid_goals, active);
}

struct LoadedModels {
    EnsembleManifest manifest;
    fs::path manifest_dir;
    AgentModel agent;
    ObserverModel observer;
};

LoadedModels load_models(const RunConfig& cfg, std::size_t pursued) {
    if (cfg.manifest_path.empty()) throw ValidationError("an ensemble manifest is required");
    EnsembleManifest manifest;
    fs::path dir;
    try {
        manifest = load_manifest(cfg.manifest_path);
        dir = fs::path(cfg.manifest_path).parent_path();
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }

    const DistributionModel f =
        parse_distribution_model(cfg.transform_f, cfg.epsilon, cfg.temperature);
    const DistributionModel g =
        parse_distribution_model(cfg.transform_g, cfg.epsilon, cfg.temperature);
    try {
        PolicyEnsemble agent_tables = load_ensemble(manifest, dir, pursued);
        PolicyEnsemble observer_tables = agent_tables;
        AgentModel agent(std::move(agent_tables), f);
        ObserverModel observer(std::move(observer_tables), manifest.prior, g);
        return LoadedModels{std::move(manifest), std::move(dir), std::move(agent),
                            std::move(observer)};
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }
}

std::string sweep_csv(const SweepResult& result) {
    std::string csv = "alpha,reward_ratio_own,reward_ratio_other,success_rate,legibility,"
                      "legibility_gain,mean_min_other_goal_distance\n";
    for (const SweepRow& row : result.rows) {
        csv += csv_value(row.alpha) + "," + csv_value(row.reward_ratio_own) + "," +
               csv_value(row.reward_ratio_other) + "," + csv_value(row.success_rate) + "," +
               csv_value(row.legibility) + "," + csv_value(row.legibility_gain) + "," +
               csv_value(row.mean_min_other_goal_distance) + "\n";
    }
    return csv;
}

std::string heatmap_csv(const Heatmap& map) {
    std::string csv;
    for (int r = 0; r < map.rows; ++r) {
        for (int c = 0; c < map.cols; ++c) {
            if (c) csv += ",";
            csv += fmt_full(map.at(r, c));
        }
        csv += "\n";
    }
    return csv;
}

json sweep_report(const SweepResult& result) {
    json rows = json::array();
    for (const SweepRow& row : result.rows) {
        json r;
        r["alpha"] = row.alpha;
        r["reward_ratio_own"] = row.reward_ratio_own;
        if (!std::isnan(row.reward_ratio_other)) r["reward_ratio_other"] = row.reward_ratio_other;
        r["success_rate"] = row.success_rate;
        r["legibility"] = row.legibility;
        r["legibility_gain"] = row.legibility_gain;
        if (!std::isnan(row.mean_min_other_goal_distance))
            r["mean_min_other_goal_distance"] = row.mean_min_other_goal_distance;
        rows.push_back(std::move(r));
    }
    json doc;
    doc["rows"] = std::move(rows);
    return doc;
}

json trajectory_to_json(const Trajectory& t) {
    json doc;
    doc["seed"] = t.seed;
    doc["success"] = t.success;
    doc["truncated"] = t.truncated;
    doc["total_reward"] = t.total_reward;
    doc["reward_by_color"] = t.reward_by_color;
    doc["start"] = {t.start_row, t.start_col};
    json steps = json::array();
    for (const TrajectoryStep& s : t.steps) {
        json step;
        step["row"] = s.row;
        step["col"] = s.col;
        step["action"] = s.action;
        step["reward"] = s.reward;
        step["next_row"] = s.next_row;
        step["next_col"] = s.next_col;
        step["done"] = s.done;
        if (s.hit_obstacle) step["hit_obstacle"] = true;
        if (s.collected_colors) step["collected_colors"] = s.collected_colors;
        steps.push_back(std::move(step));
    }
    doc["steps"] = std::move(steps);
    return doc;
}

int run_train(const RunConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    const DistributionModel f =
        parse_distribution_model(cfg.transform_f, cfg.epsilon, cfg.temperature);
    const DistributionModel g =
        parse_distribution_model(cfg.transform_g, cfg.epsilon, cfg.temperature);

    EnsembleManifest manifest;
    manifest.pursued_index = -1;
    manifest.transform_f = f;
    manifest.transform_g = g;

    TrainProgress progress;
    if (cfg.verbose) {
        // Streamed as "episode<TAB>mean_return" every 500 episodes.
        auto window_sum = std::make_shared<double>(0.0);
        auto window_count = std::make_shared<int>(0);
        progress = [window_sum, window_count](int episode, double episode_return) {
            *window_sum += episode_return;
            *window_count += 1;
            if ((episode + 1) % 500 == 0) {
                std::cout << episode + 1 << '\t' << fmt_fixed(*window_sum / *window_count, 4)
                          << '\n';
                *window_sum = 0.0;
                *window_count = 0;
            }
        };
    }

    if (cfg.env == "gridworld") {
        const auto goals = default_goals(cfg.grid_size);
        manifest.env_kind = "gridworld";
        manifest.grid_size = cfg.grid_size;
        manifest.grid_goals = goals;
        LearningConfig lc;
        lc.discount = 0.95;
        lc.episode_count = cfg.train_episodes > 0 ? cfg.train_episodes : 20000;
        lc.max_steps_per_episode = 4 * cfg.grid_size * cfg.grid_size;
        for (std::size_t goal = 0; goal < goals.size(); ++goal) {
            GridWorld env(cfg.grid_size, goals, goal);
            lc.rng_seed = mix_seed(cfg.seed, goal);
            QTable q = q_learning_train(env, lc, progress);
            q.set_fingerprint(env.fingerprint());
            const std::string file = "q_goal" + std::to_string(goal) + ".json";
            save_qtable(q, dir / file);
            manifest.qtable_files.push_back(file);
        }
    } else if (cfg.env == "tunnel") {
        manifest.env_kind = "tunnel";
        manifest.tunnel_spec = cfg.tunnel;
        LearningConfig lc;
        lc.discount = 0.98;
        lc.episode_count = cfg.train_episodes > 0 ? cfg.train_episodes : 30000;
        lc.max_steps_per_episode = cfg.tunnel.length;
        for (int color = 0; color < cfg.tunnel.colors; ++color) {
            TunnelTrainEnv env(cfg.tunnel);
            lc.rng_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(color));
            QTable q = q_learning_train(env, lc, progress);
            q.set_fingerprint(env.fingerprint());
            const std::string file = "q_color" + std::to_string(color) + ".json";
            save_qtable(q, dir / file);
            manifest.qtable_files.push_back(file);
        }
    } else {
        throw ValidationError("unknown environment: " + cfg.env);
    }

    manifest.prior.assign(manifest.qtable_files.size(),
                          1.0 / static_cast<double>(manifest.qtable_files.size()));
    save_manifest(manifest, dir / "manifest.json");
    std::cout << "trained " << manifest.qtable_files.size() << " policies into " << dir.string()
              << "\n";
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    LoadedModels models = load_models(cfg, static_cast<std::size_t>(cfg.pursued));
    const DistributionModel selection = Greedy{};

    SweepResult result;
    if (models.manifest.env_kind == "tunnel") {
        const TunnelBatch batch = make_tunnel_batch(*models.manifest.tunnel_spec,
                                                    static_cast<ColorId>(cfg.pursued),
                                                    cfg.episodes, cfg.seed);
        result = alpha_sweep_tunnel(batch, models.agent, models.observer, cfg.alphas,
                                    cfg.log_floor, selection, cfg.jobs);
    } else {
        const GridWorld grid = grid_from_manifest(models.manifest,
                                                  static_cast<std::size_t>(cfg.pursued));
        result = alpha_sweep_gridworld(grid, models.agent, models.observer, cfg.alphas,
                                       cfg.log_floor, selection,
                                       4 * grid.size() * grid.size(), cfg.seed);
    }

    write_text(dir / "metrics.csv", sweep_csv(result));
    write_text(dir / "report.json", sweep_report(result).dump(1) + "\n");
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const Heatmap map = trajectory_heatmap(result.trajectories[i]);
        write_text(dir / ("heatmap_alpha_" + alpha_tag(result.rows[i].alpha) + ".csv"),
                   heatmap_csv(map));
    }
    if (cfg.verbose) std::cout << sweep_csv(result);
    std::cout << "sweep complete: " << result.rows.size() << " alpha rows in " << dir.string()
              << "\n";
    return 0;
}

int run_rollout(const RunConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    LoadedModels models = load_models(cfg, static_cast<std::size_t>(cfg.pursued));
    LegibilityConfig lc;
    lc.alpha = cfg.alpha;
    lc.log_floor = cfg.log_floor;
    const PolicyFn policy = make_legible_policy(models.agent, models.observer, lc, Greedy{});

    std::vector<Trajectory> trajectories;
    if (models.manifest.env_kind == "tunnel") {
        const TunnelBatch batch = make_tunnel_batch(*models.manifest.tunnel_spec,
                                                    static_cast<ColorId>(cfg.pursued),
                                                    cfg.episodes, cfg.seed);
        for (std::size_t i = 0; i < batch.tunnels.size(); ++i) {
            TunnelRollout env(batch.tunnels[i], batch.own_color);
            trajectories.push_back(
                rollout(env, policy, batch.spec.length, batch.rollout_seeds[i]));
        }
    } else {
        const GridWorld grid = grid_from_manifest(models.manifest,
                                                  static_cast<std::size_t>(cfg.pursued));
        std::uint64_t i = 0;
        for (int r = 0; r < grid.size(); ++r) {
            for (int c = 0; c < grid.size(); ++c) {
                if (grid.is_goal_cell({r, c})) continue;
                GridRollout env(grid, {r, c}, models.agent.ensemble.size());
                trajectories.push_back(
                    rollout(env, policy, 4 * grid.size() * grid.size(), cfg.seed + i));
                ++i;
            }
        }
    }

    json doc;
    doc["alpha"] = cfg.alpha;
    doc["pursued"] = cfg.pursued;
    json list = json::array();
    for (const Trajectory& t : trajectories) list.push_back(trajectory_to_json(t));
    doc["trajectories"] = std::move(list);
    write_text(dir / "trajectories.json", doc.dump(1) + "\n");

    std::string summary = "episodes,success_rate,mean_total_reward,legibility\n";
    double mean_reward = 0.0;
    for (const Trajectory& t : trajectories) mean_reward += t.total_reward;
    mean_reward /= static_cast<double>(trajectories.size());
    summary += std::to_string(trajectories.size()) + "," +
               csv_value(success_rate(trajectories)) + "," + csv_value(mean_reward) + "," +
               csv_value(legibility_score(trajectories, models.observer)) + "\n";
    write_text(dir / "summary.csv", summary);
    std::cout << "rollout complete: " << trajectories.size() << " episodes in " << dir.string()
              << "\n";
    return 0;
}

int run_plot(const RunConfig& cfg) {
    const fs::path dir = prepare_out_dir(cfg);
    if (cfg.manifest_path.empty()) throw ValidationError("an ensemble manifest is required");

    EnsembleManifest manifest;
    try {
        manifest = load_manifest(cfg.manifest_path);
    } catch (const std::exception& e) {
        throw ValidationError(e.what());
    }

    if (manifest.env_kind == "gridworld") {
        std::vector<ArrowGrid> panels;
        for (std::size_t goal = 0; goal < manifest.grid_goals.size(); ++goal) {
            RunConfig goal_cfg = cfg;
            goal_cfg.pursued = static_cast<int>(goal);
            LoadedModels models = load_models(goal_cfg, goal);
            const GridWorld grid = grid_from_manifest(manifest, goal);

            for (const bool legible : {false, true}) {
                ArrowGrid panel;
                panel.size = grid.size();
                panel.goals = grid.goals();
                panel.active_goal = goal;
                panel.label = "goal " + std::to_string(goal) +
                              (legible ? " legible alpha=" + fmt_full(cfg.alpha) : " original");
                panel.actions.assign(static_cast<std::size_t>(grid.size()) * grid.size(), -1);
                LegibilityConfig lc;
                lc.alpha = legible ? cfg.alpha : 0.0;
                lc.log_floor = cfg.log_floor;
                for (int r = 0; r < grid.size(); ++r) {
                    for (int c = 0; c < grid.size(); ++c) {
                        if (grid.is_goal_cell({r, c})) continue;
                        const StateId s = grid.state_of({r, c});
                        const std::vector<double> row =
                            legible_q(models.agent, models.observer, s, lc);
                        panel.actions[static_cast<std::size_t>(r) * grid.size() + c] =
                            static_cast<int>(argmax_row(row));
                    }
                }
                panels.push_back(std::move(panel));
            }
        }
        write_text(dir / "gridworld_policies.svg", svg_arrow_panels(panels, 2));
        std::cout << "wrote " << (dir / "gridworld_policies.svg").string() << "\n";
    } else {
        LoadedModels models = load_models(cfg, static_cast<std::size_t>(cfg.pursued));
        const TunnelBatch batch = make_tunnel_batch(*models.manifest.tunnel_spec,
                                                    static_cast<ColorId>(cfg.pursued), 1, cfg.seed);
        const Tunnel& tunnel = batch.tunnels[0];
        for (double alpha : cfg.alphas) {
            LegibilityConfig lc;
            lc.alpha = alpha;
            lc.log_floor = cfg.log_floor;
            const PolicyFn policy = make_legible_policy(models.agent, models.observer, lc, Greedy{});
            std::vector<Trajectory> trajectories;
            for (int i = 0; i < std::max(1, cfg.episodes); ++i) {
                TunnelRollout env(tunnel, batch.own_color);
                trajectories.push_back(rollout(env, policy, tunnel.length(),
                                               cfg.seed + static_cast<std::uint64_t>(i)));
            }
            const Heatmap map = trajectory_heatmap(trajectories);
            const std::string name = "tunnel_alpha_" + alpha_tag(alpha) + ".svg";
            write_text(dir / name, svg_tunnel_map(tunnel, batch.own_color, &map,
                                                  "alpha=" + fmt_full(alpha)));
            std::cout << "wrote " << (dir / name).string() << "\n";
        }
    }
    return 0;
}

int run_validate(const RunConfig& cfg) {
    LoadedModels models = load_models(cfg, std::max(0, cfg.pursued));
    std::cout << "manifest: " << cfg.manifest_path << "\n"
              << "environment: " << models.manifest.env_kind << "\n"
              << "policies: " << models.agent.ensemble.size() << " ("
              << models.agent.ensemble.state_count() << " states x "
              << models.agent.ensemble.action_count() << " actions)\n"
              << "validation OK\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Legibility-regularized tabular reinforcement learning"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    app.add_option("--config", config_path, "JSON config file; flags override its values");

    // Shared flags, registered on every subcommand.
    std::vector<CLI::App*> commands;
    CLI::App* train = app.add_subcommand("train", "Train a policy ensemble and write a manifest");
    CLI::App* sweep = app.add_subcommand("sweep", "Run an alpha sweep and write metric tables");
    CLI::App* roll = app.add_subcommand("rollout", "Roll out the legible policy at one alpha");
    CLI::App* plot = app.add_subcommand("plot", "Render policy arrows or trajectory overlays");
    CLI::App* validate_cmd = app.add_subcommand("validate", "Check a manifest against its files");
    commands = {train, sweep, roll, plot, validate_cmd};

    for (CLI::App* cmd : commands) {
        cmd->add_option("--env", cfg.env, "Environment: gridworld | tunnel");
        cmd->add_option("--out", cfg.out_dir, "Output directory");
        cmd->add_option("--manifest", cfg.manifest_path, "Ensemble manifest file");
        cmd->add_option("--alphas", cfg.alphas, "Alpha values for sweeps/plots")
            ->delimiter(',');
        cmd->add_option("--alpha", cfg.alpha, "Regularization magnitude for rollout/plot");
        cmd->add_option("--episodes", cfg.episodes, "Episode count (training episodes for train)");
        cmd->add_option("--seed", cfg.seed, "Base RNG seed");
        cmd->add_option("--transform-f", cfg.transform_f, "Agent transform");
        cmd->add_option("--transform-g", cfg.transform_g, "Observer transform");
        cmd->add_option("--epsilon", cfg.epsilon, "Epsilon for epsilon-greedy transforms");
        cmd->add_option("--temperature", cfg.temperature, "Temperature for Boltzmann transforms");
        cmd->add_option("--jobs", cfg.jobs, "Concurrent rollout workers");
        cmd->add_flag("--verbose", cfg.verbose, "Stream progress records");
        cmd->add_option("--pursued", cfg.pursued, "Pursued policy index (goal or color)");
        cmd->add_option("--train-episodes", cfg.train_episodes, "Training episodes override");
        cmd->add_option("--log-floor", cfg.log_floor, "Lower clamp for log-probabilities");
        cmd->add_option("--grid-size", cfg.grid_size, "Gridworld side length");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* active = nullptr;
    for (CLI::App* cmd : commands)
        if (cmd->parsed()) active = cmd;

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError("cannot open config file: " + config_path);
            json doc;
            try {
                doc = json::parse(in);
            } catch (const std::exception& e) {
                throw ValidationError(std::string("bad config file: ") + e.what());
            }
            RunConfig merged; // defaults, then file values
            merged.apply_file(doc);

            // Keep every value given explicitly on the command line.
            auto given = [&](const char* name) { return active && active->count(name) > 0; };
            if (!given("--env")) cfg.env = merged.env;
            if (!given("--out")) cfg.out_dir = merged.out_dir;
            if (!given("--manifest")) cfg.manifest_path = merged.manifest_path;
            if (!given("--alphas")) cfg.alphas = merged.alphas;
            if (!given("--alpha")) cfg.alpha = merged.alpha;
            if (!given("--episodes")) cfg.episodes = merged.episodes;
            if (!given("--seed")) cfg.seed = merged.seed;
            if (!given("--transform-f")) cfg.transform_f = merged.transform_f;
            if (!given("--transform-g")) cfg.transform_g = merged.transform_g;
            if (!given("--epsilon")) cfg.epsilon = merged.epsilon;
            if (!given("--temperature")) cfg.temperature = merged.temperature;
            if (!given("--jobs")) cfg.jobs = merged.jobs;
            if (!given("--verbose")) cfg.verbose = merged.verbose;
            if (!given("--pursued")) cfg.pursued = merged.pursued;
            if (!given("--train-episodes")) cfg.train_episodes = merged.train_episodes;
            if (!given("--log-floor")) cfg.log_floor = merged.log_floor;
            if (!given("--grid-size")) cfg.grid_size = merged.grid_size;
            cfg.tunnel = merged.tunnel;
        }

        if (train->parsed()) {
            if (cfg.train_episodes == 0 && train->count("--episodes") > 0)
                cfg.train_episodes = cfg.episodes;
            return run_train(cfg);
        }
        if (sweep->parsed()) return run_sweep(cfg);
        if (roll->parsed()) return run_rollout(cfg);
        if (plot->parsed()) return run_plot(cfg);
        if (validate_cmd->parsed()) return run_validate(cfg);
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
