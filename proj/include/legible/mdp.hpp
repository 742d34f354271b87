#pragma once

#include "legible/rng.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace legible {

using StateId = std::size_t;
using ActionId = std::size_t;

/// Dense (state, action) -> value table. Row-major, one row per state.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t state_count, std::size_t action_count, double init = 0.0);

    std::size_t state_count() const { return state_count_; }
    std::size_t action_count() const { return action_count_; }

    double at(StateId s, ActionId a) const;
    void set(StateId s, ActionId a, double value);
    std::span<const double> row(StateId s) const;

    /// Argmax over a row; ties go to the lowest action index.
    ActionId greedy_action(StateId s) const;

    bool all_finite() const;

    const std::string& fingerprint() const { return fingerprint_; }
    void set_fingerprint(std::string fp) { fingerprint_ = std::move(fp); }

    bool operator==(const QTable& other) const;

private:
    void check_state(StateId s) const;

    std::size_t state_count_ = 0;
    std::size_t action_count_ = 0;
    std::vector<double> values_;
    std::string fingerprint_;
};

/// Probability vector over the action set. Entries are non-negative and
/// sum to 1 within 1e-9; the constructor rejects anything else.
class ActionDistribution {
public:
    explicit ActionDistribution(std::vector<double> probabilities);

    std::size_t size() const { return probs_.size(); }
    double operator[](ActionId a) const { return probs_[a]; }
    double at(ActionId a) const;
    std::span<const double> probabilities() const { return probs_; }

    /// Most probable action, lowest index among ties.
    ActionId argmax() const;

private:
    std::vector<double> probs_;
};

struct Boltzmann {
    double temperature = 1.0;
};
struct EpsilonGreedy {
    double epsilon = 0.1;
};
struct Greedy {};

/// Tagged choice of Q-to-distribution transform.
using DistributionModel = std::variant<Boltzmann, EpsilonGreedy, Greedy>;

/// Throws std::invalid_argument when the model parameters are out of range.
void validate(const DistributionModel& model);

std::string to_string(const DistributionModel& model);

/// Parses "greedy", "epsilon-greedy" or "boltzmann"; epsilon/temperature
/// supply the parameter for the models that take one.
DistributionModel parse_distribution_model(const std::string& name, double epsilon,
                                           double temperature);

/// Numerically stabilized softmax of q_row / temperature.
ActionDistribution boltzmann(std::span<const double> q_row, double temperature);

/// (1 - eps) + eps/|A| on the tie-broken argmax, eps/|A| elsewhere.
ActionDistribution epsilon_greedy(std::span<const double> q_row, double epsilon);

ActionDistribution transform_row(const DistributionModel& model, std::span<const double> q_row);

/// Applies the transform to the Q-row of state s.
ActionDistribution action_distribution(const DistributionModel& model, const QTable& q, StateId s);

/// Inverse-CDF sample; deterministic given the generator state.
ActionId sample_action(const ActionDistribution& dist, Rng& rng);

/// Lowest-index argmax of an arbitrary row.
ActionId argmax_row(std::span<const double> row);

} // namespace legible
