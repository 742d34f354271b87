#include "legible/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace legible {

QTable::QTable(std::size_t state_count, std::size_t action_count, double init)
    : state_count_(state_count), action_count_(action_count),
      values_(state_count * action_count, init) {
    if (state_count == 0 || action_count == 0)
        throw std::invalid_argument("QTable: state and action counts must be positive");
}

void QTable::check_state(StateId s) const {
    if (s >= state_count_) throw std::out_of_range("QTable: state index out of range");
}

double QTable::at(StateId s, ActionId a) const {
    check_state(s);
    if (a >= action_count_) throw std::out_of_range("QTable: action index out of range");
    return values_[s * action_count_ + a];
}

void QTable::set(StateId s, ActionId a, double value) {
    check_state(s);
    if (a >= action_count_) throw std::out_of_range("QTable: action index out of range");
    values_[s * action_count_ + a] = value;
}

std::span<const double> QTable::row(StateId s) const {
    check_state(s);
    return {values_.data() + s * action_count_, action_count_};
}

ActionId QTable::greedy_action(StateId s) const { return argmax_row(row(s)); }

bool QTable::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool QTable::operator==(const QTable& other) const {
    return state_count_ == other.state_count_ && action_count_ == other.action_count_ &&
           values_ == other.values_;
}

ActionDistribution::ActionDistribution(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
    if (probs_.empty()) throw std::invalid_argument("ActionDistribution: empty");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0)) throw std::invalid_argument("ActionDistribution: negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("ActionDistribution: probabilities do not sum to 1");
}

double ActionDistribution::at(ActionId a) const {
    if (a >= probs_.size()) throw std::out_of_range("ActionDistribution: action out of range");
    return probs_[a];
}

ActionId ActionDistribution::argmax() const { return argmax_row(probs_); }

ActionId argmax_row(std::span<const double> row) {
    if (row.empty()) throw std::invalid_argument("argmax_row: empty row");
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

void validate(const DistributionModel& model) {
    if (const auto* b = std::get_if<Boltzmann>(&model)) {
        if (!(b->temperature > 0.0))
            throw std::invalid_argument("Boltzmann: temperature must be positive");
    } else if (const auto* e = std::get_if<EpsilonGreedy>(&model)) {
        if (!(e->epsilon >= 0.0 && e->epsilon <= 1.0))
            throw std::invalid_argument("EpsilonGreedy: epsilon must be in [0,1]");
    }
}

std::string to_string(const DistributionModel& model) {
    if (std::holds_alternative<Greedy>(model)) return "greedy";
    if (std::holds_alternative<Boltzmann>(model)) return "boltzmann";
    return "epsilon-greedy";
}

DistributionModel parse_distribution_model(const std::string& name, double epsilon,
                                           double temperature) {
    DistributionModel model;
    if (name == "greedy")
        model = Greedy{};
    else if (name == "boltzmann")
        model = Boltzmann{temperature};
    else if (name == "epsilon-greedy")
        model = EpsilonGreedy{epsilon};
    else
        throw std::invalid_argument("unknown distribution model: " + name);
    validate(model);
    return model;
}

namespace {

void check_row(std::span<const double> q_row) {
    if (q_row.empty()) throw std::invalid_argument("transform: empty Q-row");
    for (double v : q_row)
        if (!std::isfinite(v)) throw std::invalid_argument("transform: non-finite Q-value");
}

} // namespace

ActionDistribution boltzmann(std::span<const double> q_row, double temperature) {
    check_row(q_row);
    if (!(temperature > 0.0))
        throw std::invalid_argument("boltzmann: temperature must be positive");
    const double peak = *std::max_element(q_row.begin(), q_row.end());
    std::vector<double> probs(q_row.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < q_row.size(); ++i) {
        probs[i] = std::exp((q_row[i] - peak) / temperature);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return ActionDistribution(std::move(probs));
}

ActionDistribution epsilon_greedy(std::span<const double> q_row, double epsilon) {
    check_row(q_row);
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("epsilon_greedy: epsilon must be in [0,1]");
    const std::size_t n = q_row.size();
    const ActionId best = argmax_row(q_row);
    std::vector<double> probs(n, epsilon / static_cast<double>(n));
    probs[best] += 1.0 - epsilon;
    return ActionDistribution(std::move(probs));
}

ActionDistribution transform_row(const DistributionModel& model, std::span<const double> q_row) {
    if (const auto* b = std::get_if<Boltzmann>(&model)) return boltzmann(q_row, b->temperature);
    if (const auto* e = std::get_if<EpsilonGreedy>(&model)) return epsilon_greedy(q_row, e->epsilon);
    return epsilon_greedy(q_row, 0.0);
}

ActionDistribution action_distribution(const DistributionModel& model, const QTable& q, StateId s) {
    return transform_row(model, q.row(s));
}

ActionId sample_action(const ActionDistribution& dist, Rng& rng) {
    const double u = canonical(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        cumulative += dist[i];
        if (u < cumulative) return i;
    }
    return dist.size() - 1;
}

} // namespace legible
