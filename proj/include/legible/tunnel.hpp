#pragma once

#include "legible/env.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace legible {

/// Generation parameters for procedural tunnels. Obstacles are placed
/// first; colored rectangles keep only their non-obstacle cells.
struct TunnelSpec {
    int length = 60;
    int width = 8;
    int sight = 10;
    int colors = 3;
    int rects_per_color = 3;
    int rect_min_w = 2;
    int rect_max_w = 4;
    int rect_min_h = 1;
    int rect_max_h = 3;
    int obstacle_count = 6;
    std::uint64_t seed = 0;

    /// L=200, W=12, S=20, C=4, 5 rectangles per color, 10 obstacles.
    static TunnelSpec paper_scale();

    void validate() const;
};

/// Corridor grid. The agent enters at (start_row, column 0) and is pushed
/// one column to the right every step. Cells carry an obstacle flag or a
/// set of colors (a merged tunnel may stack several colors on one cell).
class Tunnel {
public:
    Tunnel(int length, int width, int sight, int color_count, int start_row);

    int length() const { return length_; }
    int width() const { return width_; }
    int sight() const { return sight_; }
    int color_count() const { return color_count_; }
    int start_row() const { return start_row_; }

    bool obstacle_at(int row, int col) const;
    std::uint32_t colors_at(int row, int col) const;
    bool has_color(int row, int col, ColorId color) const;

    void set_obstacle(int row, int col);
    void add_color(int row, int col, ColorId color);

    /// Stage-major cell id: col * width + row.
    StateId position_id(int row, int col) const;

    std::string fingerprint() const;

    bool operator==(const Tunnel& other) const;

private:
    std::size_t index(int row, int col) const;

    int length_;
    int width_;
    int sight_;
    int color_count_;
    int start_row_;
    std::vector<std::uint8_t> obstacle_;
    std::vector<std::uint32_t> color_mask_;
};

/// Deterministic given spec.seed. Column 0 is kept free of obstacles and
/// colors so the start cell is always empty.
Tunnel tunnel_generate(const TunnelSpec& spec);

/// Merges single-color tunnels sharing dimensions, obstacles and start:
/// the colored cells of input c become color c of the result.
Tunnel tunnel_merge(std::span<const Tunnel> tunnels);

/// Single-color view: cells carrying `color` become color 0 of a
/// one-color tunnel with the same obstacles.
Tunnel tunnel_select_color(const Tunnel& t, ColorId color);

std::string tunnel_to_json(const Tunnel& t);
Tunnel tunnel_from_json(const std::string& text);

std::string tunnel_spec_to_json(const TunnelSpec& spec);
TunnelSpec tunnel_spec_from_json(const std::string& text);

constexpr ActionId kTunnelUp = 0;
constexpr ActionId kTunnelDown = 1;
constexpr ActionId kTunnelStay = 2;
constexpr std::size_t kTunnelActionCount = 3;

/// Reduced window observation: agent row plus the nearest cell of the
/// sought color and the nearest obstacle ahead, each discretized to a
/// column bucket {1-2, 3-5, 6-S, none} and an exact row offset.
struct ObservationFeatures {
    int agent_row = 0;
    int color_bucket = 3; // 3 = nothing visible
    int color_drow = 0;   // only meaningful when bucket < 3
    int obstacle_bucket = 3;
    int obstacle_drow = 0;
};

std::size_t observation_space_size(int width);
StateId encode_observation(const ObservationFeatures& f, int width);
ObservationFeatures decode_observation(StateId s, int width);

/// Observation of the tunnel from (agent_row, agent_col) for one color.
StateId observe(const Tunnel& t, int agent_row, int agent_col, ColorId color);

/// Mutable rollout state over an immutable tunnel.
class TunnelSim {
public:
    TunnelSim(const Tunnel& tunnel, ColorId reward_color);

    void reset();
    Transition step(ActionId a);

    bool done() const { return done_; }
    bool succeeded() const { return succeeded_; }
    bool hit_obstacle() const { return hit_obstacle_; }
    int agent_row() const { return row_; }
    int agent_col() const { return col_; }
    ColorId reward_color() const { return reward_color_; }
    const Tunnel& tunnel() const { return tunnel_; }

    StateId observe_color(ColorId color) const;
    StateId observe_own() const { return observe_color(reward_color_); }

private:
    const Tunnel& tunnel_;
    ColorId reward_color_;
    int row_ = 0;
    int col_ = 0;
    bool done_ = false;
    bool succeeded_ = false;
    bool hit_obstacle_ = false;
};

/// Q-learning adapter: every reset generates a fresh single-color tunnel
/// from the spec, seeded from the training generator.
class TunnelTrainEnv : public Env {
public:
    explicit TunnelTrainEnv(TunnelSpec spec);

    std::size_t state_count() const override;
    std::size_t action_count() const override { return kTunnelActionCount; }
    StateId reset(Rng& rng) override;
    Transition step(ActionId a) override;
    bool done() const override;

    std::string fingerprint() const;

private:
    TunnelSpec spec_;
    Tunnel tunnel_;
    TunnelSim sim_;
};

} // namespace legible
