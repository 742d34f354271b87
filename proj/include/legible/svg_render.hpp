#pragma once

#include "legible/evaluation.hpp"
#include "legible/gridworld.hpp"
#include "legible/tunnel.hpp"

#include <span>
#include <string>
#include <vector>

namespace legible {

/// One grid of per-cell greedy-action arrows; -1 suppresses the arrow
/// (goal cells).
struct ArrowGrid {
    int size = 0;
    std::vector<int> actions; // row-major, size*size
    std::vector<GridWorld::Cell> goals;
    std::size_t active_goal = 0;
    std::string label;
};

/// Self-contained SVG with the panels laid out in rows of panels_per_row.
/// Arrows are <use> references to #arrow-up/-down/-left/-right so content
/// can be checked textually.
std::string svg_arrow_panels(std::span<const ArrowGrid> panels, int panels_per_row);

/// Tunnel cell map with an optional trajectory-occupancy overlay. The
/// pursued color is drawn red, other colors from a fixed palette,
/// obstacles brown; occupancy as yellow cells with opacity equal to the
/// visit frequency.
std::string svg_tunnel_map(const Tunnel& tunnel, ColorId own_color, const Heatmap* occupancy,
                           const std::string& label);

} // namespace legible
