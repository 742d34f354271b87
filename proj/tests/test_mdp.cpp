#include "legible/mdp.hpp"

#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>
#include <vector>

using namespace legible;

namespace {

std::vector<double> random_row(Rng& rng, std::size_t n, double scale = 10.0) {
    std::vector<double> row(n);
    for (double& v : row) v = (canonical(rng) - 0.5) * scale;
    return row;
}

} // namespace

TEST_CASE("boltzmann on a uniform row is uniform") {
    const std::vector<double> row{0.0, 0.0, 0.0};
    const ActionDistribution d = boltzmann(row, 1.0);
    for (std::size_t a = 0; a < 3; ++a) CHECK(d[a] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("boltzmann matches direct exponential ratios") {
    const std::vector<double> row{1.0, 2.0};
    const ActionDistribution d = boltzmann(row, 1.0);
    const double e = std::exp(1.0);
    CHECK(d[0] == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(e / (1.0 + e)).epsilon(1e-12));
}

TEST_CASE("boltzmann is shift invariant") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        const double tau = 0.1 + canonical(rng) * 5.0;
        const double shift = (canonical(rng) - 0.5) * 100.0;
        std::vector<double> row = random_row(rng, n);
        std::vector<double> shifted = row;
        for (double& v : shifted) v += shift;
        const ActionDistribution a = boltzmann(row, tau);
        const ActionDistribution b = boltzmann(shifted, tau);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    }
}

TEST_CASE("epsilon_greedy spec rows") {
    SUBCASE("greedy limit") {
        const ActionDistribution d = epsilon_greedy(std::vector<double>{5.0, 1.0, 1.0}, 0.0);
        CHECK(d[0] == 1.0);
        CHECK(d[1] == 0.0);
        CHECK(d[2] == 0.0);
    }
    SUBCASE("formula at epsilon 0.1") {
        const ActionDistribution d = epsilon_greedy(std::vector<double>{5.0, 1.0, 1.0}, 0.1);
        CHECK(d[0] == doctest::Approx(0.9 + 0.1 / 3.0).epsilon(1e-12));
        CHECK(d[1] == doctest::Approx(0.1 / 3.0).epsilon(1e-12));
        CHECK(d[2] == doctest::Approx(0.1 / 3.0).epsilon(1e-12));
    }
    SUBCASE("tie broken to the lowest index") {
        const ActionDistribution d = epsilon_greedy(std::vector<double>{2.0, 2.0}, 0.1);
        CHECK(d[0] == doctest::Approx(0.95).epsilon(1e-12));
        CHECK(d[1] == doctest::Approx(0.05).epsilon(1e-12));
    }
}

TEST_CASE("action_distribution dispatches on the model") {
    QTable q(1, 3);
    q.set(0, 0, 3.0);
    q.set(0, 1, 1.0);
    q.set(0, 2, 2.0);

    const ActionDistribution greedy = action_distribution(Greedy{}, q, 0);
    CHECK(greedy[0] == 1.0);
    CHECK(greedy[1] == 0.0);

    const ActionDistribution eps = action_distribution(EpsilonGreedy{0.1}, q, 0);
    CHECK(eps[0] == doctest::Approx(0.9 + 0.1 / 3.0).epsilon(1e-12));
    CHECK(eps[2] == doctest::Approx(0.1 / 3.0).epsilon(1e-12));

    QTable uniform(1, 4);
    const ActionDistribution b = action_distribution(Boltzmann{1.0}, uniform, 0);
    for (std::size_t a = 0; a < 4; ++a) CHECK(b[a] == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(action_distribution(Greedy{}, q, 5), std::out_of_range);
}

TEST_CASE("every transform yields a proper distribution") {
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 6);
        const std::vector<double> row = random_row(rng, n, 50.0);
        const DistributionModel models[] = {DistributionModel{Greedy{}},
                                            DistributionModel{EpsilonGreedy{canonical(rng)}},
                                            DistributionModel{Boltzmann{0.05 + canonical(rng) * 8}}};
        for (const DistributionModel& m : models) {
            const ActionDistribution d = transform_row(m, row);
            double sum = 0.0;
            for (std::size_t a = 0; a < d.size(); ++a) {
                CHECK(d[a] >= 0.0);
                sum += d[a];
            }
            CHECK(std::abs(sum - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("epsilon_greedy keeps every action reachable and the argmax in front") {
    Rng rng(37);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 5);
        const std::vector<double> row = random_row(rng, n);
        const double max_eps = static_cast<double>(n - 1) / static_cast<double>(n);
        const double eps = 0.01 + canonical(rng) * (max_eps - 0.02);
        const ActionDistribution d = epsilon_greedy(row, eps);
        for (std::size_t a = 0; a < n; ++a)
            CHECK(d[a] >= eps / static_cast<double>(n) - 1e-15);
        CHECK(d.argmax() == argmax_row(row));
    }
}

TEST_CASE("transform argument validation") {
    const std::vector<double> row{1.0, 2.0};
    CHECK_THROWS_AS(boltzmann(std::vector<double>{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(boltzmann(row, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(boltzmann(row, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(boltzmann(std::vector<double>{1.0, std::nan("")}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_greedy(row, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_greedy(row, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution_model("unknown", 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(validate(DistributionModel{Boltzmann{0.0}}), std::invalid_argument);
}

TEST_CASE("QTable storage and bounds") {
    QTable q(3, 2, 0.5);
    CHECK(q.state_count() == 3);
    CHECK(q.action_count() == 2);
    CHECK(q.at(2, 1) == 0.5);
    q.set(1, 0, -4.25);
    CHECK(q.at(1, 0) == -4.25);
    CHECK_THROWS_AS(q.at(3, 0), std::out_of_range);
    CHECK_THROWS_AS(q.at(0, 2), std::out_of_range);
    CHECK_THROWS_AS(q.set(0, 5, 1.0), std::out_of_range);
    CHECK_THROWS_AS(QTable(0, 2), std::invalid_argument);

    q.set(0, 0, 7.0);
    q.set(0, 1, 7.0);
    CHECK(q.greedy_action(0) == 0); // tie to the lowest index
    CHECK(q.all_finite());
    q.set(0, 0, std::numeric_limits<double>::infinity());
    CHECK_FALSE(q.all_finite());
}

TEST_CASE("sample_action is deterministic and follows the distribution") {
    const ActionDistribution d(std::vector<double>{0.2, 0.5, 0.3});
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(sample_action(d, a) == sample_action(d, b));

    Rng rng(5);
    int counts[3] = {0, 0, 0};
    const int n = 200000;
    for (int i = 0; i < n; ++i) counts[sample_action(d, rng)]++;
    CHECK(counts[0] / double(n) == doctest::Approx(0.2).epsilon(0.05));
    CHECK(counts[1] / double(n) == doctest::Approx(0.5).epsilon(0.05));
    CHECK(counts[2] / double(n) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("ActionDistribution validates its invariants") {
    CHECK_THROWS_AS(ActionDistribution(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(ActionDistribution(std::vector<double>{0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(ActionDistribution(std::vector<double>{-0.1, 1.1}), std::invalid_argument);
}
