#pragma once

#include "legible/env.hpp"

#include <string>
#include <utility>
#include <vector>

namespace legible {

/// Square grid with goal cells at fixed positions. Actions are
/// up/down/left/right, clamped at the walls; entering the active goal
/// pays +1 and ends the episode. States enumerate cells row-major.
class GridWorld : public Env, public EnumerableMdp {
public:
    using Cell = std::pair<int, int>; // (row, col)

    static constexpr ActionId kUp = 0;
    static constexpr ActionId kDown = 1;
    static constexpr ActionId kLeft = 2;
    static constexpr ActionId kRight = 3;

    GridWorld(int size, std::vector<Cell> goals, std::size_t active_goal);

    /// 7x7 grid, goals at three corners.
    static GridWorld standard(std::size_t active_goal);

    int size() const { return size_; }
    const std::vector<Cell>& goals() const { return goals_; }
    std::size_t active_goal() const { return active_goal_; }
    Cell goal_cell() const { return goals_[active_goal_]; }

    StateId state_of(Cell c) const;
    Cell cell_of(StateId s) const;
    bool is_goal_cell(Cell c) const; // any goal, active or not

    std::string fingerprint() const;

    // Env
    std::size_t state_count() const override;
    std::size_t action_count() const override { return 4; }
    /// Uniform over non-goal cells.
    StateId reset(Rng& rng) override;
    Transition step(ActionId a) override;
    bool done() const override { return done_; }

    /// Starts an episode at a fixed cell (evaluation over all starts).
    StateId reset_at(Cell start);

    Cell agent() const { return agent_; }

    // EnumerableMdp; the active goal cell is absorbing.
    bool terminal(StateId s) const override;
    std::vector<MdpOutcome> outcomes(StateId s, ActionId a) const override;

private:
    Cell move(Cell from, ActionId a) const;

    int size_;
    std::vector<Cell> goals_;
    std::size_t active_goal_;
    Cell agent_{0, 0};
    bool done_ = true;
};

} // namespace legible
