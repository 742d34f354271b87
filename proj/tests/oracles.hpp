#pragma once

// Independent reference computations for the test suites. These never call
// the implementation paths they are used to check.

#include "legible/mdp.hpp"
#include "legible/tunnel.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace oracle {

/// Best gross reward for `color` over every action sequence, simulated
/// step by step. Exponential in tunnel length; keep lengths small.
inline double brute_force_tunnel_max(const legible::Tunnel& t, legible::ColorId color) {
    const int steps = t.length() - 1;
    long long sequences = 1;
    for (int i = 0; i < steps; ++i) sequences *= 3;

    double best = 0.0;
    for (long long code = 0; code < sequences; ++code) {
        long long rest = code;
        int row = t.start_row();
        double collected = 0.0;
        for (int col = 1; col <= steps; ++col) {
            const int action = static_cast<int>(rest % 3);
            rest /= 3;
            if (action == 0) row = std::max(0, row - 1);
            if (action == 1) row = std::min(t.width() - 1, row + 1);
            if (t.obstacle_at(row, col)) break;
            if (t.has_color(row, col, color)) collected += 1.0;
        }
        best = std::max(best, collected);
    }
    return best;
}

/// First-principles Bayes step: explicit likelihoods, explicit normalizer.
inline std::vector<double> bayes_posterior(std::span<const std::vector<double>> q_rows,
                                           std::span<const double> prior,
                                           legible::ActionId action, double epsilon) {
    std::vector<double> posterior(q_rows.size());
    double normalizer = 0.0;
    for (std::size_t i = 0; i < q_rows.size(); ++i) {
        const std::vector<double>& row = q_rows[i];
        std::size_t best = 0;
        for (std::size_t a = 1; a < row.size(); ++a)
            if (row[a] > row[best]) best = a;
        double likelihood = epsilon / static_cast<double>(row.size());
        if (action == best) likelihood += 1.0 - epsilon;
        posterior[i] = prior[i] * likelihood;
        normalizer += posterior[i];
    }
    for (double& p : posterior) p /= normalizer;
    return posterior;
}

/// Same, with numerically careful softmax likelihoods.
inline std::vector<double> bayes_posterior_boltzmann(std::span<const std::vector<double>> q_rows,
                                                     std::span<const double> prior,
                                                     legible::ActionId action, double temperature) {
    std::vector<double> posterior(q_rows.size());
    double normalizer = 0.0;
    for (std::size_t i = 0; i < q_rows.size(); ++i) {
        const std::vector<double>& row = q_rows[i];
        const double peak = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (double q : row) z += std::exp((q - peak) / temperature);
        const double likelihood = std::exp((row[action] - peak) / temperature) / z;
        posterior[i] = prior[i] * likelihood;
        normalizer += posterior[i];
    }
    for (double& p : posterior) p /= normalizer;
    return posterior;
}

} // namespace oracle
