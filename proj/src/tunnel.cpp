#include "legible/tunnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace legible {

using nlohmann::json;

TunnelSpec TunnelSpec::paper_scale() {
    TunnelSpec s;
    s.length = 200;
    s.width = 12;
    s.sight = 20;
    s.colors = 4;
    s.rects_per_color = 5;
    s.obstacle_count = 10;
    return s;
}

void TunnelSpec::validate() const {
    if (length < 2) throw std::invalid_argument("TunnelSpec: length must be at least 2");
    if (width < 1) throw std::invalid_argument("TunnelSpec: width must be at least 1");
    if (sight < 1) throw std::invalid_argument("TunnelSpec: sight must be at least 1");
    if (colors < 1 || colors > 32)
        throw std::invalid_argument("TunnelSpec: colors must be in [1,32]");
    if (rects_per_color < 0 || obstacle_count < 0)
        throw std::invalid_argument("TunnelSpec: counts must be non-negative");
    if (rect_min_w < 1 || rect_min_h < 1 || rect_max_w < rect_min_w || rect_max_h < rect_min_h)
        throw std::invalid_argument("TunnelSpec: bad rectangle size range");
    if (rects_per_color > 0 && (rect_max_w > length - 1 || rect_max_h > width))
        throw std::invalid_argument("TunnelSpec: rectangles cannot fit the grid");
    if (obstacle_count > 0 && (length < 4 || width < 2))
        throw std::invalid_argument("TunnelSpec: obstacles cannot fit the grid");
}

Tunnel::Tunnel(int length, int width, int sight, int color_count, int start_row)
    : length_(length), width_(width), sight_(sight), color_count_(color_count),
      start_row_(start_row),
      obstacle_(static_cast<std::size_t>(length) * width, 0),
      color_mask_(static_cast<std::size_t>(length) * width, 0) {
    if (length < 2 || width < 1) throw std::invalid_argument("Tunnel: bad dimensions");
    if (sight < 1) throw std::invalid_argument("Tunnel: sight must be positive");
    if (color_count < 1 || color_count > 32)
        throw std::invalid_argument("Tunnel: color count must be in [1,32]");
    if (start_row < 0 || start_row >= width)
        throw std::invalid_argument("Tunnel: start row out of bounds");
}

std::size_t Tunnel::index(int row, int col) const {
    if (row < 0 || row >= width_ || col < 0 || col >= length_)
        throw std::out_of_range("Tunnel: cell out of bounds");
    return static_cast<std::size_t>(col) * width_ + row;
}

bool Tunnel::obstacle_at(int row, int col) const { return obstacle_[index(row, col)] != 0; }

std::uint32_t Tunnel::colors_at(int row, int col) const { return color_mask_[index(row, col)]; }

bool Tunnel::has_color(int row, int col, ColorId color) const {
    if (color >= static_cast<ColorId>(color_count_))
        throw std::out_of_range("Tunnel: color out of range");
    return (colors_at(row, col) >> color) & 1u;
}

void Tunnel::set_obstacle(int row, int col) {
    const std::size_t i = index(row, col);
    obstacle_[i] = 1;
    color_mask_[i] = 0; // obstacle and color never coexist
}

void Tunnel::add_color(int row, int col, ColorId color) {
    if (color >= static_cast<ColorId>(color_count_))
        throw std::out_of_range("Tunnel: color out of range");
    const std::size_t i = index(row, col);
    if (obstacle_[i]) return; // obstacles placed first take precedence
    color_mask_[i] |= (1u << color);
}

StateId Tunnel::position_id(int row, int col) const { return index(row, col); }

std::string Tunnel::fingerprint() const {
    return "tunnel:v1:L" + std::to_string(length_) + ":W" + std::to_string(width_) + ":S" +
           std::to_string(sight_) + ":C" + std::to_string(color_count_);
}

bool Tunnel::operator==(const Tunnel& other) const {
    return length_ == other.length_ && width_ == other.width_ && sight_ == other.sight_ &&
           color_count_ == other.color_count_ && start_row_ == other.start_row_ &&
           obstacle_ == other.obstacle_ && color_mask_ == other.color_mask_;
}

namespace {

struct Shape {
    int rows = 0;
    int cols = 0;
};

// Tracks cells taken by earlier shapes so placements never overlap and
// every placed shape keeps its full cell count.
class Occupancy {
public:
    Occupancy(int length, int width)
        : length_(length), width_(width),
          taken_(static_cast<std::size_t>(length) * width, 0) {}

    bool free(int row, int col, const Shape& shape) const {
        for (int r = 0; r < shape.rows; ++r)
            for (int c = 0; c < shape.cols; ++c)
                if (taken_[index(row + r, col + c)]) return false;
        return true;
    }

    void claim(int row, int col, const Shape& shape) {
        for (int r = 0; r < shape.rows; ++r)
            for (int c = 0; c < shape.cols; ++c) taken_[index(row + r, col + c)] = 1;
    }

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(col) * width_ + row;
    }
    int length_;
    int width_;
    std::vector<std::uint8_t> taken_;
};

// Uniform top-left placement over every in-bounds position with col >= 1
// that does not overlap earlier shapes. Throws when the shape cannot fit.
std::pair<int, int> place_shape(Rng& rng, const Shape& shape, int length, int width,
                                const Occupancy& occupancy) {
    const int col_lo = 1;
    const int col_hi = length - shape.cols; // inclusive
    const int row_hi = width - shape.rows;  // inclusive
    if (col_hi < col_lo || row_hi < 0)
        throw std::invalid_argument("tunnel_generate: shape does not fit the grid");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const int col = col_lo + static_cast<int>(uniform_index(rng, col_hi - col_lo + 1));
        const int row = static_cast<int>(uniform_index(rng, row_hi + 1));
        if (occupancy.free(row, col, shape)) return {row, col};
    }
    throw std::invalid_argument("tunnel_generate: no free placement for a shape");
}

} // namespace

Tunnel tunnel_generate(const TunnelSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Tunnel t(spec.length, spec.width, spec.sight, spec.colors, spec.width / 2);
    Occupancy occupancy(spec.length, spec.width);

    for (int i = 0; i < spec.obstacle_count; ++i) {
        Shape shape;
        if (uniform_index(rng, 2) == 0) {
            shape = {2, 2}; // square
        } else {
            shape = uniform_index(rng, 2) == 0 ? Shape{1, 3} : Shape{3, 1}; // line
        }
        const auto [row, col] = place_shape(rng, shape, spec.length, spec.width, occupancy);
        occupancy.claim(row, col, shape);
        for (int r = 0; r < shape.rows; ++r)
            for (int c = 0; c < shape.cols; ++c) t.set_obstacle(row + r, col + c);
    }

    for (int color = 0; color < spec.colors; ++color) {
        for (int i = 0; i < spec.rects_per_color; ++i) {
            Shape shape;
            shape.cols = spec.rect_min_w +
                         static_cast<int>(uniform_index(rng, spec.rect_max_w - spec.rect_min_w + 1));
            shape.rows = spec.rect_min_h +
                         static_cast<int>(uniform_index(rng, spec.rect_max_h - spec.rect_min_h + 1));
            const auto [row, col] = place_shape(rng, shape, spec.length, spec.width, occupancy);
            occupancy.claim(row, col, shape);
            for (int r = 0; r < shape.rows; ++r)
                for (int c = 0; c < shape.cols; ++c)
                    t.add_color(row + r, col + c, static_cast<ColorId>(color));
        }
    }
    return t;
}

Tunnel tunnel_merge(std::span<const Tunnel> tunnels) {
    if (tunnels.empty()) throw std::invalid_argument("tunnel_merge: no inputs");
    if (tunnels.size() > 32) throw std::invalid_argument("tunnel_merge: too many inputs");
    const Tunnel& first = tunnels[0];
    Tunnel merged(first.length(), first.width(), first.sight(),
                  static_cast<int>(tunnels.size()), first.start_row());
    for (std::size_t i = 0; i < tunnels.size(); ++i) {
        const Tunnel& t = tunnels[i];
        if (t.length() != first.length() || t.width() != first.width() ||
            t.sight() != first.sight() || t.start_row() != first.start_row())
            throw std::invalid_argument("tunnel_merge: mismatched dimensions");
        for (int col = 0; col < t.length(); ++col) {
            for (int row = 0; row < t.width(); ++row) {
                if (t.obstacle_at(row, col) != first.obstacle_at(row, col))
                    throw std::invalid_argument("tunnel_merge: mismatched obstacle layouts");
                if (t.obstacle_at(row, col))
                    merged.set_obstacle(row, col);
                else if (t.colors_at(row, col) != 0)
                    merged.add_color(row, col, static_cast<ColorId>(i));
            }
        }
    }
    return merged;
}

Tunnel tunnel_select_color(const Tunnel& t, ColorId color) {
    Tunnel out(t.length(), t.width(), t.sight(), 1, t.start_row());
    for (int col = 0; col < t.length(); ++col) {
        for (int row = 0; row < t.width(); ++row) {
            if (t.obstacle_at(row, col))
                out.set_obstacle(row, col);
            else if (t.has_color(row, col, color))
                out.add_color(row, col, 0);
        }
    }
    return out;
}

std::string tunnel_to_json(const Tunnel& t) {
    json doc;
    doc["length"] = t.length();
    doc["width"] = t.width();
    doc["sight"] = t.sight();
    doc["colors"] = t.color_count();
    doc["start_row"] = t.start_row();
    json obstacles = json::array();
    json colored = json::array();
    for (int col = 0; col < t.length(); ++col) {
        for (int row = 0; row < t.width(); ++row) {
            if (t.obstacle_at(row, col)) obstacles.push_back({row, col});
            const std::uint32_t mask = t.colors_at(row, col);
            if (mask != 0) colored.push_back({row, col, mask});
        }
    }
    doc["obstacles"] = std::move(obstacles);
    doc["colored"] = std::move(colored);
    return doc.dump(1);
}

Tunnel tunnel_from_json(const std::string& text) {
    const json doc = json::parse(text);
    Tunnel t(doc.at("length").get<int>(), doc.at("width").get<int>(), doc.at("sight").get<int>(),
             doc.at("colors").get<int>(), doc.at("start_row").get<int>());
    for (const auto& cell : doc.at("obstacles"))
        t.set_obstacle(cell.at(0).get<int>(), cell.at(1).get<int>());
    for (const auto& cell : doc.at("colored")) {
        const int row = cell.at(0).get<int>();
        const int col = cell.at(1).get<int>();
        const auto mask = cell.at(2).get<std::uint32_t>();
        for (ColorId c = 0; c < 32; ++c)
            if ((mask >> c) & 1u) t.add_color(row, col, c);
    }
    return t;
}

std::string tunnel_spec_to_json(const TunnelSpec& spec) {
    json doc;
    doc["length"] = spec.length;
    doc["width"] = spec.width;
    doc["sight"] = spec.sight;
    doc["colors"] = spec.colors;
    doc["rects_per_color"] = spec.rects_per_color;
    doc["rect_min_w"] = spec.rect_min_w;
    doc["rect_max_w"] = spec.rect_max_w;
    doc["rect_min_h"] = spec.rect_min_h;
    doc["rect_max_h"] = spec.rect_max_h;
    doc["obstacle_count"] = spec.obstacle_count;
    doc["seed"] = spec.seed;
    return doc.dump(1);
}

TunnelSpec tunnel_spec_from_json(const std::string& text) {
    const json doc = json::parse(text);
    TunnelSpec spec;
    spec.length = doc.value("length", spec.length);
    spec.width = doc.value("width", spec.width);
    spec.sight = doc.value("sight", spec.sight);
    spec.colors = doc.value("colors", spec.colors);
    spec.rects_per_color = doc.value("rects_per_color", spec.rects_per_color);
    spec.rect_min_w = doc.value("rect_min_w", spec.rect_min_w);
    spec.rect_max_w = doc.value("rect_max_w", spec.rect_max_w);
    spec.rect_min_h = doc.value("rect_min_h", spec.rect_min_h);
    spec.rect_max_h = doc.value("rect_max_h", spec.rect_max_h);
    spec.obstacle_count = doc.value("obstacle_count", spec.obstacle_count);
    spec.seed = doc.value("seed", spec.seed);
    spec.validate();
    return spec;
}

namespace {

// Feature layout per channel: bucket b in {0,1,2} pairs with an exact row
// offset; bucket 3 ("nothing visible") is a single code.
int feature_code(int bucket, int drow, int width) {
    const int span = 2 * width - 1;
    if (bucket == 3) return 3 * span;
    return bucket * span + (drow + width - 1);
}

int column_bucket(int dcol) {
    if (dcol <= 2) return 0;
    if (dcol <= 5) return 1;
    return 2;
}

} // namespace

std::size_t observation_space_size(int width) {
    const std::size_t f = 3 * (2 * static_cast<std::size_t>(width) - 1) + 1;
    return static_cast<std::size_t>(width) * f * f;
}

StateId encode_observation(const ObservationFeatures& f, int width) {
    const std::size_t span = 3 * (2 * static_cast<std::size_t>(width) - 1) + 1;
    const std::size_t color = feature_code(f.color_bucket, f.color_drow, width);
    const std::size_t obstacle = feature_code(f.obstacle_bucket, f.obstacle_drow, width);
    return (static_cast<std::size_t>(f.agent_row) * span + color) * span + obstacle;
}

ObservationFeatures decode_observation(StateId s, int width) {
    const int span = 3 * (2 * width - 1) + 1;
    ObservationFeatures f;
    const int obstacle = static_cast<int>(s % span);
    const int color = static_cast<int>((s / span) % span);
    f.agent_row = static_cast<int>(s / span / span);
    auto split = [&](int code, int& bucket, int& drow) {
        if (code == 3 * (2 * width - 1)) {
            bucket = 3;
            drow = 0;
        } else {
            bucket = code / (2 * width - 1);
            drow = code % (2 * width - 1) - (width - 1);
        }
    };
    split(color, f.color_bucket, f.color_drow);
    split(obstacle, f.obstacle_bucket, f.obstacle_drow);
    return f;
}

StateId observe(const Tunnel& t, int agent_row, int agent_col, ColorId color) {
    if (agent_row < 0 || agent_row >= t.width() || agent_col < 0 || agent_col >= t.length())
        throw std::out_of_range("observe: agent out of bounds");
    ObservationFeatures f;
    f.agent_row = agent_row;

    // Nearest column ahead containing the feature; within it, the row
    // closest to the agent (ties toward the lower row index).
    auto scan = [&](auto&& predicate, int& bucket, int& drow) {
        const int max_dcol = std::min(t.sight(), t.length() - 1 - agent_col);
        for (int dcol = 1; dcol <= max_dcol; ++dcol) {
            int best_row = -1;
            for (int row = 0; row < t.width(); ++row) {
                if (!predicate(row, agent_col + dcol)) continue;
                if (best_row < 0 ||
                    std::abs(row - agent_row) < std::abs(best_row - agent_row))
                    best_row = row;
            }
            if (best_row >= 0) {
                bucket = column_bucket(dcol);
                drow = best_row - agent_row;
                return;
            }
        }
        bucket = 3;
        drow = 0;
    };

    scan([&](int r, int c) { return t.has_color(r, c, color); }, f.color_bucket, f.color_drow);
    scan([&](int r, int c) { return t.obstacle_at(r, c); }, f.obstacle_bucket, f.obstacle_drow);
    return encode_observation(f, t.width());
}

TunnelSim::TunnelSim(const Tunnel& tunnel, ColorId reward_color)
    : tunnel_(tunnel), reward_color_(reward_color) {
    if (reward_color >= static_cast<ColorId>(tunnel.color_count()))
        throw std::invalid_argument("TunnelSim: reward color out of range");
    reset();
}

void TunnelSim::reset() {
    row_ = tunnel_.start_row();
    col_ = 0;
    done_ = false;
    succeeded_ = false;
    hit_obstacle_ = false;
}

Transition TunnelSim::step(ActionId a) {
    if (done_) throw std::logic_error("TunnelSim: step after episode end");
    int dr = 0;
    switch (a) {
    case kTunnelUp: dr = -1; break;
    case kTunnelDown: dr = +1; break;
    case kTunnelStay: dr = 0; break;
    default: throw std::out_of_range("TunnelSim: action out of range");
    }
    row_ = std::clamp(row_ + dr, 0, tunnel_.width() - 1);
    col_ += 1;

    Transition t;
    if (tunnel_.obstacle_at(row_, col_)) {
        t.reward = -10.0;
        t.info.hit_obstacle = true;
        hit_obstacle_ = true;
        done_ = true;
    } else {
        const std::uint32_t mask = tunnel_.colors_at(row_, col_);
        t.info.collected_colors = mask;
        if ((mask >> reward_color_) & 1u) t.reward = 1.0;
        if (col_ == tunnel_.length() - 1) {
            done_ = true;
            succeeded_ = true;
        }
    }
    t.done = done_;
    t.next_state = observe_own();
    return t;
}

StateId TunnelSim::observe_color(ColorId color) const {
    return observe(tunnel_, row_, col_, color);
}

TunnelTrainEnv::TunnelTrainEnv(TunnelSpec spec)
    : spec_([&] {
          spec.colors = 1;
          spec.validate();
          return spec;
      }()),
      tunnel_(tunnel_generate(spec_)), sim_(tunnel_, 0) {}

std::size_t TunnelTrainEnv::state_count() const { return observation_space_size(spec_.width); }

StateId TunnelTrainEnv::reset(Rng& rng) {
    spec_.seed = rng();
    tunnel_ = tunnel_generate(spec_); // sim_ references tunnel_ in place
    sim_.reset();
    return sim_.observe_own();
}

Transition TunnelTrainEnv::step(ActionId a) { return sim_.step(a); }

bool TunnelTrainEnv::done() const { return sim_.done(); }

std::string TunnelTrainEnv::fingerprint() const {
    return "tunnel-obs:v1:W" + std::to_string(spec_.width) + ":S" + std::to_string(spec_.sight);
}

} // namespace legible
