#include "legible/gridworld.hpp"

#include <doctest.h>

#include <limits>
#include <stdexcept>

using namespace legible;

TEST_CASE("gridworld goal entry pays and terminates") {
    GridWorld g = GridWorld::standard(0); // goal (0,0)
    g.reset_at({0, 1});
    const Transition t = g.step(GridWorld::kLeft);
    CHECK(t.reward == 1.0);
    CHECK(t.done);
    CHECK(g.done());
    CHECK_THROWS_AS(g.step(GridWorld::kLeft), std::logic_error);
}

TEST_CASE("gridworld clamps at walls") {
    GridWorld g = GridWorld::standard(2); // goal (6,6)
    g.reset_at({0, 0});
    const Transition t = g.step(GridWorld::kUp);
    CHECK(t.reward == 0.0);
    CHECK_FALSE(t.done);
    CHECK(g.agent() == GridWorld::Cell{0, 0});
}

TEST_CASE("gridworld state enumeration round-trips") {
    const GridWorld g = GridWorld::standard(1);
    for (StateId s = 0; s < g.state_count(); ++s) CHECK(g.state_of(g.cell_of(s)) == s);
    CHECK_THROWS_AS(g.cell_of(49), std::out_of_range);
    CHECK_THROWS_AS(g.state_of({7, 0}), std::out_of_range);
}

TEST_CASE("gridworld construction rejects bad goals") {
    CHECK_THROWS_AS(GridWorld(7, {{0, 0}, {0, 0}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(GridWorld(7, {{0, 9}}, 0), std::invalid_argument);
    CHECK_THROWS_AS(GridWorld(7, {{0, 0}}, 1), std::invalid_argument);
}

TEST_CASE("gridworld resets are uniform over non-goal cells") {
    GridWorld g = GridWorld::standard(0);
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        g.reset(rng);
        CHECK_FALSE(g.is_goal_cell(g.agent()));
    }
}

TEST_CASE("gridworld enumerable transitions agree with stepping") {
    GridWorld g = GridWorld::standard(1);
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const StateId s = uniform_index(rng, g.state_count());
        if (g.terminal(s)) continue;
        const ActionId a = uniform_index(rng, 4);
        const auto outs = g.outcomes(s, a);
        REQUIRE(outs.size() == 1);
        g.reset_at(g.cell_of(s));
        const Transition t = g.step(a);
        CHECK(outs[0].next == t.next_state);
        CHECK(outs[0].reward == t.reward);
        CHECK(outs[0].probability == 1.0);
    }
}
