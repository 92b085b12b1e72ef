#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "amapf/potential.hpp"
#include "oracles.hpp"

using namespace amapf;

TEST(Potential, GoalIsZeroAndNeighborsOne) {
    const GridWorld g(5, 5);
    const auto m = build_potential_map(g, {2, 2});
    EXPECT_EQ(m.at({2, 2}), 0);
    EXPECT_EQ(m.at({1, 2}), 1);
    EXPECT_EQ(m.at({0, 0}), 4);
    EXPECT_EQ(m.at({-1, 0}), PotentialMap::kUnreachable);
}

TEST(Potential, UnreachableCellsAndBadGoal) {
    const auto g = GridWorld::from_ascii({".#.", ".#.", ".#."});
    const auto m = build_potential_map(g, {0, 0});
    EXPECT_FALSE(m.reachable({0, 2}));
    EXPECT_FALSE(m.reachable({0, 1}));
    EXPECT_EQ(m.at({2, 0}), 2);
    EXPECT_THROW(build_potential_map(g, {0, 1}), ScenarioError);
    EXPECT_THROW(build_potential_map(g, {9, 9}), ScenarioError);
}

TEST(Potential, MatchesRelaxationOracleOnRandomGrids) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = 3 + static_cast<int>(rng() % 10);
        const int h = 3 + static_cast<int>(rng() % 10);
        GridWorld g(w, h);
        for (int k = 0; k < w * h / 4; ++k) g.set_obstacle({static_cast<int>(rng() % h), static_cast<int>(rng() % w)});
        const auto free = g.free_cells();
        if (free.empty()) continue;
        const Cell goal = free[rng() % free.size()];
        const auto m = build_potential_map(g, goal);
        const auto expect = oracle::relaxed_distances(g, goal);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const int want = g.is_free({r, c}) ? expect[static_cast<std::size_t>(r * w + c)] : INT_MAX;
                ASSERT_EQ(m.at({r, c}), want) << "cell " << r << "," << c;
            }
        }
    }
}

TEST(Potential, NoLocalMinima) {
    const auto g = GridWorld::from_ascii({"......", ".####.", ".#..#.", ".#.##.", "......"});
    const auto m = build_potential_map(g, {2, 2});
    for (const auto& c : g.free_cells()) {
        if (!m.reachable(c) || m.at(c) == 0) continue;
        bool descends = false;
        for (const auto& n : g.free_neighbors(c)) descends |= m.at(n) == m.at(c) - 1;
        EXPECT_TRUE(descends);
    }
}

TEST(Potential, CsvUsesMinusOneForUnreachable) {
    const auto g = GridWorld::from_ascii({".#", ".."});
    std::ostringstream out;
    build_potential_map(g, {0, 0}).write_csv(out);
    EXPECT_EQ(out.str(), "0,-1\n1,2\n");
}

TEST(Potential, SharedGoalsShareMaps) {
    const GridWorld g(4, 4);
    std::vector<AgentState> agents{{0, {0, 0}, {3, 3}, 1}, {1, {1, 0}, {3, 3}, 1}, {2, {2, 0}, {0, 3}, 1}};
    const auto maps = build_potential_maps(g, agents);
    ASSERT_EQ(maps.size(), 3u);
    EXPECT_EQ(maps[0].values(), maps[1].values());
    EXPECT_EQ(maps[2].goal(), (Cell{0, 3}));
}
