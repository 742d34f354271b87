#include "legible/tunnel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>
#include <map>
#include <set>

using namespace legible;

namespace {

TunnelSpec small_spec(std::uint64_t seed) {
    TunnelSpec spec;
    spec.length = 60;
    spec.width = 8;
    spec.sight = 10;
    spec.colors = 3;
    spec.rects_per_color = 3;
    spec.obstacle_count = 6;
    spec.seed = seed;
    return spec;
}

int count_obstacle_cells(const Tunnel& t) {
    int n = 0;
    for (int col = 0; col < t.length(); ++col)
        for (int row = 0; row < t.width(); ++row)
            if (t.obstacle_at(row, col)) ++n;
    return n;
}

int count_color_cells(const Tunnel& t, ColorId color) {
    int n = 0;
    for (int col = 0; col < t.length(); ++col)
        for (int row = 0; row < t.width(); ++row)
            if (t.has_color(row, col, color)) ++n;
    return n;
}

// Upper 0.01 quantile of chi-square via the Wilson-Hilferty approximation.
double chi_square_crit_01(int df) {
    const double z = 2.3263478740408408;
    const double d = static_cast<double>(df);
    const double term = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * term * term * term;
}

} // namespace

TEST_CASE("empty spec yields an all-empty tunnel") {
    TunnelSpec spec = small_spec(1);
    spec.rects_per_color = 0;
    spec.obstacle_count = 0;
    const Tunnel t = tunnel_generate(spec);
    CHECK(count_obstacle_cells(t) == 0);
    for (int c = 0; c < spec.colors; ++c) CHECK(count_color_cells(t, c) == 0);
    CHECK(t.start_row() == spec.width / 2);
}

TEST_CASE("generation is deterministic in the seed") {
    const Tunnel a = tunnel_generate(small_spec(42));
    const Tunnel b = tunnel_generate(small_spec(42));
    const Tunnel c = tunnel_generate(small_spec(43));
    CHECK(a == b);
    CHECK_FALSE(a == c);
}

TEST_CASE("placed shapes keep their full cell counts") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const TunnelSpec spec = small_spec(seed);
        const Tunnel t = tunnel_generate(spec);

        // Obstacles are 2x2 squares or length-3 lines, never overlapping:
        // 6 shapes of 3 or 4 cells each.
        const int cells = count_obstacle_cells(t);
        CHECK(cells >= 3 * spec.obstacle_count);
        CHECK(cells <= 4 * spec.obstacle_count);

        for (int c = 0; c < spec.colors; ++c) {
            const int colored = count_color_cells(t, c);
            CHECK(colored >= spec.rects_per_color * spec.rect_min_w * spec.rect_min_h);
            CHECK(colored <= spec.rects_per_color * spec.rect_max_w * spec.rect_max_h);
        }

        // Column 0 stays clear and obstacle/color never coexist.
        for (int row = 0; row < t.width(); ++row) {
            CHECK_FALSE(t.obstacle_at(row, 0));
            CHECK(t.colors_at(row, 0) == 0);
        }
        for (int col = 0; col < t.length(); ++col)
            for (int row = 0; row < t.width(); ++row)
                if (t.obstacle_at(row, col)) CHECK(t.colors_at(row, col) == 0);
    }
}

TEST_CASE("first placement positions are uniform (chi-square at 0.01)") {
    // A single obstacle per tunnel is unconditionally uniform over its
    // placement domain; square placements are binned 6x7.
    TunnelSpec spec = small_spec(0);
    spec.rects_per_color = 0;
    spec.obstacle_count = 1;

    const int col_domain = spec.length - 2; // squares: cols 1..58
    const int row_domain = spec.width - 1;  // rows 0..6
    const int col_bins = 6;
    std::map<std::pair<int, int>, int> counts;
    int squares = 0;

    for (std::uint64_t seed = 0; seed < 6000; ++seed) {
        spec.seed = seed;
        const Tunnel t = tunnel_generate(spec);
        if (count_obstacle_cells(t) != 4) continue; // keep squares only
        int top_row = t.width(), left_col = t.length();
        for (int col = 0; col < t.length(); ++col)
            for (int row = 0; row < t.width(); ++row)
                if (t.obstacle_at(row, col)) {
                    top_row = std::min(top_row, row);
                    left_col = std::min(left_col, col);
                }
        const int col_bin = (left_col - 1) * col_bins / col_domain;
        counts[{col_bin, top_row}]++;
        ++squares;
    }
    REQUIRE(squares > 2000);

    std::vector<int> bin_width(col_bins, 0);
    for (int x = 0; x < col_domain; ++x) bin_width[x * col_bins / col_domain]++;

    double chi2 = 0.0;
    for (int cb = 0; cb < col_bins; ++cb) {
        for (int row = 0; row < row_domain; ++row) {
            const double expected = squares * double(bin_width[cb]) / col_domain / row_domain;
            const double observed = counts.count({cb, row}) ? counts[{cb, row}] : 0.0;
            chi2 += (observed - expected) * (observed - expected) / expected;
        }
    }
    const int df = col_bins * row_domain - 1;
    CHECK(chi2 < chi_square_crit_01(df));
}

TEST_CASE("tunnel stepping rewards, punishes and terminates") {
    Tunnel t(6, 4, 3, 2, 2); // start row 2
    t.add_color(2, 1, 0);    // own color ahead
    t.add_color(1, 2, 1);    // other color
    t.set_obstacle(3, 3);

    TunnelSim sim(t, 0);
    SUBCASE("entering an own-color cell pays +1") {
        const Transition tr = sim.step(kTunnelStay);
        CHECK(tr.reward == 1.0);
        CHECK(tr.info.collected_colors == 0b01u);
        CHECK_FALSE(tr.done);
    }
    SUBCASE("a cell of another color pays nothing but is recorded") {
        sim.step(kTunnelUp); // to (1,1)
        const Transition tr = sim.step(kTunnelStay); // to (1,2), color 1
        CHECK(tr.reward == 0.0);
        CHECK(tr.info.collected_colors == 0b10u);
    }
    SUBCASE("an obstacle punishes with -10 and ends the episode") {
        sim.step(kTunnelStay);                        // (2,1)
        sim.step(kTunnelStay);                        // (2,2)
        const Transition tr = sim.step(kTunnelDown);  // (3,3) obstacle
        CHECK(tr.reward == -10.0);
        CHECK(tr.done);
        CHECK(tr.info.hit_obstacle);
        CHECK(sim.hit_obstacle());
        CHECK_FALSE(sim.succeeded());
        CHECK_THROWS_AS(sim.step(kTunnelStay), std::logic_error);
    }
}

TEST_CASE("an empty corridor takes exactly length-1 steps and succeeds") {
    Tunnel t(10, 4, 3, 1, 2);
    TunnelSim sim(t, 0);
    int steps = 0;
    while (!sim.done()) {
        sim.step(kTunnelStay);
        ++steps;
    }
    CHECK(steps == 9);
    CHECK(sim.succeeded());
}

TEST_CASE("row movement clamps at the walls") {
    Tunnel t(8, 3, 3, 1, 0);
    TunnelSim sim(t, 0);
    sim.step(kTunnelUp);
    CHECK(sim.agent_row() == 0); // clamped at the top
    sim.step(kTunnelDown);
    CHECK(sim.agent_row() == 1);
}

TEST_CASE("merging reassembles a multi-color tunnel from its color views") {
    const Tunnel original = tunnel_generate(small_spec(7));
    std::vector<Tunnel> views;
    for (int c = 0; c < original.color_count(); ++c)
        views.push_back(tunnel_select_color(original, static_cast<ColorId>(c)));

    const Tunnel merged = tunnel_merge(views);
    CHECK(merged == original);

    SUBCASE("merging a single tunnel is the identity") {
        const Tunnel single = tunnel_select_color(original, 0);
        CHECK(tunnel_merge(std::vector<Tunnel>{single}) == single);
    }
    SUBCASE("obstacle layout is preserved exactly") {
        for (int col = 0; col < merged.length(); ++col)
            for (int row = 0; row < merged.width(); ++row)
                CHECK(merged.obstacle_at(row, col) == original.obstacle_at(row, col));
    }
    SUBCASE("mismatched inputs are rejected") {
        Tunnel other(original.length() + 1, original.width(), original.sight(), 1,
                     original.start_row());
        std::vector<Tunnel> bad{views[0], other};
        CHECK_THROWS_AS(tunnel_merge(bad), std::invalid_argument);

        Tunnel moved = tunnel_select_color(original, 1);
        bool flipped = false;
        for (int col = 1; col < moved.length() && !flipped; ++col)
            for (int row = 0; row < moved.width() && !flipped; ++row)
                if (!moved.obstacle_at(row, col) && moved.colors_at(row, col) == 0) {
                    moved.set_obstacle(row, col);
                    flipped = true;
                }
        std::vector<Tunnel> bad2{views[0], moved};
        CHECK_THROWS_AS(tunnel_merge(bad2), std::invalid_argument);
    }
}

TEST_CASE("a policy behaves identically on its color view and the merged tunnel") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Tunnel merged = tunnel_generate(small_spec(seed + 1000));
        const ColorId color = static_cast<ColorId>(seed % merged.color_count());
        const Tunnel view = tunnel_select_color(merged, color);

        TunnelSim on_merged(merged, color);
        TunnelSim on_view(view, 0);
        Rng rng(seed);
        while (!on_merged.done()) {
            CHECK(on_merged.observe_own() == on_view.observe_own());
            const ActionId a = uniform_index(rng, kTunnelActionCount);
            const Transition tm = on_merged.step(a);
            const Transition tv = on_view.step(a);
            CHECK(tm.reward == tv.reward);
            CHECK(tm.done == tv.done);
            CHECK(on_merged.agent_row() == on_view.agent_row());
        }
        CHECK(on_view.done());
        CHECK(on_merged.succeeded() == on_view.succeeded());
    }
}

TEST_CASE("observation encoding is injective and decodable") {
    const int width = 8;
    std::set<StateId> seen;
    std::size_t combos = 0;
    for (int row = 0; row < width; ++row) {
        for (int cb = 0; cb <= 3; ++cb) {
            for (int cd = -(width - 1); cd <= width - 1; ++cd) {
                if (cb == 3 && cd != 0) continue;
                for (int ob = 0; ob <= 3; ++ob) {
                    for (int od = -(width - 1); od <= width - 1; ++od) {
                        if (ob == 3 && od != 0) continue;
                        ObservationFeatures f;
                        f.agent_row = row;
                        f.color_bucket = cb;
                        f.color_drow = cd;
                        f.obstacle_bucket = ob;
                        f.obstacle_drow = od;
                        const StateId s = encode_observation(f, width);
                        CHECK(s < observation_space_size(width));
                        CHECK(seen.insert(s).second); // injective
                        const ObservationFeatures back = decode_observation(s, width);
                        CHECK(back.agent_row == f.agent_row);
                        CHECK(back.color_bucket == f.color_bucket);
                        CHECK(back.color_drow == f.color_drow);
                        CHECK(back.obstacle_bucket == f.obstacle_bucket);
                        CHECK(back.obstacle_drow == f.obstacle_drow);
                        ++combos;
                    }
                }
            }
        }
    }
    CHECK(combos == seen.size());
}

TEST_CASE("observation sees the nearest cells in the window") {
    Tunnel t(30, 8, 10, 1, 4);
    SUBCASE("empty window maps to the nothing-visible state") {
        const StateId s = observe(t, 4, 0, 0);
        const ObservationFeatures f = decode_observation(s, 8);
        CHECK(f.color_bucket == 3);
        CHECK(f.obstacle_bucket == 3);
        CHECK(f.agent_row == 4);
    }
    SUBCASE("nearest column and row offsets are encoded") {
        t.add_color(6, 4, 0);   // dcol 4, drow +2
        t.add_color(1, 12, 0);  // farther column, ignored
        t.set_obstacle(4, 2);   // dcol 2, drow 0
        const StateId s = observe(t, 4, 0, 0);
        const ObservationFeatures f = decode_observation(s, 8);
        CHECK(f.color_bucket == 1); // dcol 4 in bucket 3-5
        CHECK(f.color_drow == 2);
        CHECK(f.obstacle_bucket == 0); // dcol 2 in bucket 1-2
        CHECK(f.obstacle_drow == 0);
    }
    SUBCASE("cells beyond the sight distance are invisible") {
        t.add_color(4, 20, 0); // dcol 20 > sight 10
        const ObservationFeatures f = decode_observation(observe(t, 4, 0, 0), 8);
        CHECK(f.color_bucket == 3);
    }
}

TEST_CASE("identical windows produce identical observations") {
    // Two different tunnels sharing the local window around the agent.
    Tunnel a(40, 8, 10, 1, 4);
    Tunnel b(40, 8, 10, 1, 4);
    a.add_color(2, 6, 0);
    b.add_color(2, 6, 0);
    a.set_obstacle(5, 3);
    b.set_obstacle(5, 3);
    a.add_color(7, 30, 0); // outside the window at col 0
    b.set_obstacle(0, 25); // outside too, differs between tunnels
    CHECK(observe(a, 4, 0, 0) == observe(b, 4, 0, 0));
}

TEST_CASE("tunnel json round-trip is exact") {
    const Tunnel t = tunnel_generate(small_spec(17));
    CHECK(tunnel_from_json(tunnel_to_json(t)) == t);

    const TunnelSpec spec = small_spec(17);
    const TunnelSpec back = tunnel_spec_from_json(tunnel_spec_to_json(spec));
    CHECK(back.length == spec.length);
    CHECK(back.seed == spec.seed);
    CHECK(back.colors == spec.colors);
}

TEST_CASE("spec validation rejects impossible shapes") {
    TunnelSpec spec = small_spec(0);
    spec.rect_max_h = 20;
    CHECK_THROWS_AS(tunnel_generate(spec), std::invalid_argument);

    TunnelSpec tiny;
    tiny.length = 3;
    tiny.width = 1;
    tiny.colors = 1;
    tiny.rects_per_color = 0;
    tiny.obstacle_count = 2;
    CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}
