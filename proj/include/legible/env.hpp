#pragma once

#include "legible/mdp.hpp"
#include "legible/rng.hpp"

#include <cstdint>
#include <vector>

namespace legible {

using ColorId = std::uint32_t;

struct StepInfo {
    bool hit_obstacle = false;
    std::uint32_t collected_colors = 0; // bitmask of ColorIds entered this step
};

struct Transition {
    StateId next_state = 0;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Interactive episodic environment, the surface Q-learning trains against.
class Env {
public:
    virtual ~Env() = default;
    virtual std::size_t state_count() const = 0;
    virtual std::size_t action_count() const = 0;
    /// Starts a new episode and returns the initial state.
    virtual StateId reset(Rng& rng) = 0;
    virtual Transition step(ActionId a) = 0;
    virtual bool done() const = 0;
};

struct MdpOutcome {
    StateId next = 0;
    double probability = 1.0;
    double reward = 0.0;
};

/// Fully enumerable MDP, the surface value iteration solves.
class EnumerableMdp {
public:
    virtual ~EnumerableMdp() = default;
    virtual std::size_t state_count() const = 0;
    virtual std::size_t action_count() const = 0;
    virtual bool terminal(StateId s) const = 0;
    virtual std::vector<MdpOutcome> outcomes(StateId s, ActionId a) const = 0;
};

} // namespace legible
