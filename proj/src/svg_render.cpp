#include "legible/svg_render.hpp"

#include "legible/text_format.hpp"

#include <algorithm>
#include <stdexcept>

namespace legible {

namespace {

constexpr int kCell = 24;
constexpr int kMargin = 16;
constexpr int kLabelSpace = 20;

const char* kArrowDefs =
    "<defs>\n"
    "<g id=\"arrow-up\"><path d=\"M12,19 L12,5 M12,5 L7,10 M12,5 L17,10\" "
    "stroke=\"black\" stroke-width=\"1.6\" fill=\"none\"/></g>\n"
    "<g id=\"arrow-down\"><path d=\"M12,5 L12,19 M12,19 L7,14 M12,19 L17,14\" "
    "stroke=\"black\" stroke-width=\"1.6\" fill=\"none\"/></g>\n"
    "<g id=\"arrow-left\"><path d=\"M19,12 L5,12 M5,12 L10,7 M5,12 L10,17\" "
    "stroke=\"black\" stroke-width=\"1.6\" fill=\"none\"/></g>\n"
    "<g id=\"arrow-right\"><path d=\"M5,12 L19,12 M19,12 L14,7 M19,12 L14,17\" "
    "stroke=\"black\" stroke-width=\"1.6\" fill=\"none\"/></g>\n"
    "</defs>\n";

const char* arrow_id(int action) {
    switch (action) {
    case 0: return "arrow-up";
    case 1: return "arrow-down";
    case 2: return "arrow-left";
    case 3: return "arrow-right";
    default: throw std::invalid_argument("svg: unknown action");
    }
}

// Matplotlib-like palette for non-pursued colors.
const char* kPalette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#17becf", "#bcbd22", "#e377c2", "#7f7f7f"};

std::string rect(int x, int y, int w, int h, const std::string& fill,
                 const std::string& extra = "") {
    return "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
           std::to_string(w) + "\" height=\"" + std::to_string(h) + "\" fill=\"" + fill + "\"" +
           extra + "/>\n";
}

} // namespace

std::string svg_arrow_panels(std::span<const ArrowGrid> panels, int panels_per_row) {
    if (panels.empty()) throw std::invalid_argument("svg_arrow_panels: no panels");
    if (panels_per_row < 1) throw std::invalid_argument("svg_arrow_panels: bad layout");

    const int size = panels[0].size;
    for (const ArrowGrid& p : panels) {
        if (p.size != size || p.actions.size() != static_cast<std::size_t>(size) * size)
            throw std::invalid_argument("svg_arrow_panels: panel dimensions disagree");
    }

    const int panel_w = size * kCell + kMargin;
    const int panel_h = size * kCell + kMargin + kLabelSpace;
    const int rows = (static_cast<int>(panels.size()) + panels_per_row - 1) / panels_per_row;
    const int width = panels_per_row * panel_w + kMargin;
    const int height = rows * panel_h + kMargin;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += kArrowDefs;

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const ArrowGrid& panel = panels[p];
        const int px = kMargin + static_cast<int>(p % panels_per_row) * panel_w;
        const int py = kMargin + static_cast<int>(p / panels_per_row) * panel_h;

        svg += "<text x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py + 12) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + panel.label + "</text>\n";
        const int gy = py + kLabelSpace;

        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) {
                const int x = px + c * kCell;
                const int y = gy + r * kCell;
                svg += rect(x, y, kCell, kCell, "white",
                            " stroke=\"#cccccc\" stroke-width=\"1\"");
                const int action = panel.actions[static_cast<std::size_t>(r) * size + c];
                if (action >= 0)
                    svg += std::string("<use href=\"#") + arrow_id(action) + "\" x=\"" +
                           std::to_string(x) + "\" y=\"" + std::to_string(y) + "\"/>\n";
            }
        }
        for (std::size_t g = 0; g < panel.goals.size(); ++g) {
            const auto [gr, gc] = panel.goals[g];
            const int cx = px + gc * kCell + kCell / 2;
            const int cy = gy + gr * kCell + kCell / 2;
            const char* fill = g == panel.active_goal ? "#d62728" : "#f4a9a9";
            svg += "<circle cx=\"" + std::to_string(cx) + "\" cy=\"" + std::to_string(cy) +
                   "\" r=\"7\" fill=\"" + fill + "\"/>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string svg_tunnel_map(const Tunnel& tunnel, ColorId own_color, const Heatmap* occupancy,
                           const std::string& label) {
    if (occupancy && (occupancy->rows != tunnel.width() || occupancy->cols != tunnel.length()))
        throw std::invalid_argument("svg_tunnel_map: occupancy does not match the tunnel");

    const int cell = 12;
    const int width = tunnel.length() * cell + 2 * kMargin;
    const int height = tunnel.width() * cell + 2 * kMargin + kLabelSpace;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<text x=\"" + std::to_string(kMargin) + "\" y=\"" + std::to_string(kMargin - 2) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + label + "</text>\n";
    const int oy = kMargin + kLabelSpace;

    for (int col = 0; col < tunnel.length(); ++col) {
        for (int row = 0; row < tunnel.width(); ++row) {
            const int x = kMargin + col * cell;
            const int y = oy + row * cell;
            std::string fill = "white";
            if (tunnel.obstacle_at(row, col)) {
                fill = "#8c564b";
            } else {
                const std::uint32_t mask = tunnel.colors_at(row, col);
                if ((mask >> own_color) & 1u) {
                    fill = "#d62728";
                } else if (mask != 0) {
                    int lowest = 0;
                    while (((mask >> lowest) & 1u) == 0) ++lowest;
                    // Non-pursued colors keep stable palette slots.
                    const int slot = lowest < static_cast<int>(own_color) ? lowest : lowest - 1;
                    fill = kPalette[slot % 8];
                }
            }
            svg += rect(x, y, cell, cell, fill, " stroke=\"#e0e0e0\" stroke-width=\"0.5\"");
        }
    }

    if (occupancy) {
        for (int col = 0; col < tunnel.length(); ++col) {
            for (int row = 0; row < tunnel.width(); ++row) {
                const double f = std::min(1.0, occupancy->at(row, col));
                if (f <= 0.0) continue;
                const int x = kMargin + col * cell;
                const int y = oy + row * cell;
                svg += rect(x, y, cell, cell, "#ffdd00",
                            " fill-opacity=\"" + fmt_fixed(f, 4) + "\" class=\"occupancy\"");
            }
        }
    }

    // start marker
    svg += "<circle cx=\"" + std::to_string(kMargin + cell / 2) + "\" cy=\"" +
           std::to_string(oy + tunnel.start_row() * cell + cell / 2) +
           "\" r=\"4\" fill=\"black\"/>\n";
    svg += "</svg>\n";
    return svg;
}

} // namespace legible
