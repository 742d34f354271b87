#include "legible/gridworld.hpp"

#include <algorithm>
#include <stdexcept>

namespace legible {

GridWorld::GridWorld(int size, std::vector<Cell> goals, std::size_t active_goal)
    : size_(size), goals_(std::move(goals)), active_goal_(active_goal) {
    if (size_ < 2) throw std::invalid_argument("GridWorld: size must be at least 2");
    if (goals_.empty()) throw std::invalid_argument("GridWorld: needs at least one goal");
    if (active_goal_ >= goals_.size())
        throw std::invalid_argument("GridWorld: active goal out of range");
    for (std::size_t i = 0; i < goals_.size(); ++i) {
        const auto [r, c] = goals_[i];
        if (r < 0 || r >= size_ || c < 0 || c >= size_)
            throw std::invalid_argument("GridWorld: goal out of bounds");
        for (std::size_t j = i + 1; j < goals_.size(); ++j)
            if (goals_[i] == goals_[j])
                throw std::invalid_argument("GridWorld: duplicate goal cells");
    }
}

GridWorld GridWorld::standard(std::size_t active_goal) {
    return GridWorld(7, {{0, 0}, {0, 6}, {6, 6}}, active_goal);
}

StateId GridWorld::state_of(Cell c) const {
    const auto [r, col] = c;
    if (r < 0 || r >= size_ || col < 0 || col >= size_)
        throw std::out_of_range("GridWorld: cell out of bounds");
    return static_cast<StateId>(r) * size_ + col;
}

GridWorld::Cell GridWorld::cell_of(StateId s) const {
    if (s >= state_count()) throw std::out_of_range("GridWorld: state out of range");
    return {static_cast<int>(s) / size_, static_cast<int>(s) % size_};
}

bool GridWorld::is_goal_cell(Cell c) const {
    return std::find(goals_.begin(), goals_.end(), c) != goals_.end();
}

std::string GridWorld::fingerprint() const {
    std::string fp = "gridworld:v1:" + std::to_string(size_) + "x" + std::to_string(size_);
    for (const auto& [r, c] : goals_)
        fp += ":g(" + std::to_string(r) + "," + std::to_string(c) + ")";
    fp += ":active=" + std::to_string(active_goal_);
    return fp;
}

std::size_t GridWorld::state_count() const {
    return static_cast<std::size_t>(size_) * static_cast<std::size_t>(size_);
}

StateId GridWorld::reset(Rng& rng) {
    std::vector<Cell> starts;
    starts.reserve(state_count());
    for (int r = 0; r < size_; ++r)
        for (int c = 0; c < size_; ++c)
            if (!is_goal_cell({r, c})) starts.push_back({r, c});
    return reset_at(starts[uniform_index(rng, starts.size())]);
}

StateId GridWorld::reset_at(Cell start) {
    const auto [r, c] = start;
    if (r < 0 || r >= size_ || c < 0 || c >= size_)
        throw std::out_of_range("GridWorld: start out of bounds");
    agent_ = start;
    done_ = false;
    return state_of(agent_);
}

GridWorld::Cell GridWorld::move(Cell from, ActionId a) const {
    auto [r, c] = from;
    switch (a) {
    case kUp: r -= 1; break;
    case kDown: r += 1; break;
    case kLeft: c -= 1; break;
    case kRight: c += 1; break;
    default: throw std::out_of_range("GridWorld: action out of range");
    }
    r = std::clamp(r, 0, size_ - 1);
    c = std::clamp(c, 0, size_ - 1);
    return {r, c};
}

Transition GridWorld::step(ActionId a) {
    if (done_) throw std::logic_error("GridWorld: step after episode end");
    agent_ = move(agent_, a);
    Transition t;
    t.next_state = state_of(agent_);
    if (agent_ == goal_cell()) {
        t.reward = 1.0;
        t.done = true;
        t.info.collected_colors = 1u << active_goal_;
        done_ = true;
    }
    return t;
}

bool GridWorld::terminal(StateId s) const { return cell_of(s) == goal_cell(); }

std::vector<MdpOutcome> GridWorld::outcomes(StateId s, ActionId a) const {
    if (terminal(s)) return {{s, 1.0, 0.0}};
    const Cell next = move(cell_of(s), a);
    MdpOutcome o;
    o.next = state_of(next);
    o.probability = 1.0;
    o.reward = (next == goal_cell()) ? 1.0 : 0.0;
    return {o};
}

} // namespace legible
