#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "amapf/planner.hpp"
#include "amapf/potential.hpp"
#include "amapf/trace_io.hpp"
#include "oracles.hpp"

using namespace amapf;

namespace {

std::vector<PotentialMap> maps_for(const GridWorld& g, const std::vector<AgentState>& agents) {
    return build_potential_maps(g, agents);
}

Scenario fig1_scenario() {
    Scenario s;
    s.grid = GridWorld(5, 5);
    s.agents = {{0, {2, 0}, {2, 4}, 3}, {1, {0, 2}, {4, 2}, 3}};
    return s;
}

std::string trace_text(const SimulationTrace& t) {
    std::ostringstream out;
    write_trace_log(out, t);
    write_auction_log(out, t);
    return out.str();
}

}  // namespace

TEST(ProposeMoves, StraightDescentUsesFullIncentive) {
    const GridWorld g(10, 10);
    std::vector<AgentState> a{{0, {5, 0}, {5, 9}, 3}};
    const auto m = propose_moves(g, maps_for(g, a), a);
    EXPECT_EQ(m[0], (MoveAction{Direction::right, 3}));
}

TEST(ProposeMoves, NeverOvershootsTheGoal) {
    const GridWorld g(10, 10);
    std::vector<AgentState> a{{0, {5, 8}, {5, 9}, 3}};
    EXPECT_EQ(propose_moves(g, maps_for(g, a), a)[0], (MoveAction{Direction::right, 1}));
}

TEST(ProposeMoves, BlockedByAgentWaits) {
    const auto g = GridWorld::from_ascii({"#####", ".....", "#####"});
    std::vector<AgentState> a{{0, {1, 0}, {1, 4}, 2}, {1, {1, 1}, {1, 3}, 1}};
    a[1].incentive = 1;
    auto maps = maps_for(g, a);
    // Agent 1 is still travelling, so agent 0 has nowhere to go.
    std::vector<AgentState> only_first{a[0], a[1]};
    const auto m = propose_moves(g, maps, only_first);
    EXPECT_EQ(m[0], MoveAction::wait());
}

TEST(ProposeMoves, ArrivedAgentsAreIgnored) {
    const auto g = GridWorld::from_ascii({"#####", ".....", "#####"});
    std::vector<AgentState> a{{0, {1, 0}, {1, 4}, 3}, {1, {1, 2}, {1, 2}, 1}};
    a[1].arrived = true;
    const auto m = propose_moves(g, maps_for(g, a), a);
    EXPECT_EQ(m[0], (MoveAction{Direction::right, 3}));
    EXPECT_EQ(m[1], MoveAction::wait());
}

TEST(ProposeMoves, StopsShortOfOccupiedCells) {
    const GridWorld g(10, 3);
    std::vector<AgentState> a{{0, {1, 0}, {1, 9}, 3}, {1, {1, 3}, {0, 3}, 1}};
    EXPECT_EQ(propose_moves(g, maps_for(g, a), a)[0], (MoveAction{Direction::right, 2}));
}

TEST(ProposeMoves, AxisTieBreaking) {
    const GridWorld g(8, 8);
    std::vector<AgentState> wide{{0, {0, 0}, {2, 5}, 1}};
    EXPECT_EQ(propose_moves(g, maps_for(g, wide), wide)[0], (MoveAction{Direction::right, 1}));
    std::vector<AgentState> square{{0, {0, 0}, {5, 5}, 2}};
    EXPECT_EQ(propose_moves(g, maps_for(g, square), square)[0], (MoveAction{Direction::down, 2}));
    // A longer run wins over the axis rule.
    std::vector<AgentState> run{{0, {6, 0}, {7, 5}, 3}};
    EXPECT_EQ(propose_moves(g, maps_for(g, run), run)[0], (MoveAction{Direction::right, 3}));
}

TEST(DetectConflicts, SharedTarget) {
    std::vector<AgentState> a{{0, {2, 1}, {2, 4}, 1}, {1, {1, 2}, {4, 2}, 1}};
    std::vector<MoveAction> m{{Direction::right, 1}, {Direction::down, 1}};
    const auto c = detect_conflicts(a, m, 7);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].cell, (Cell{2, 2}));
    EXPECT_EQ(c[0].time, 7);
    EXPECT_EQ(c[0].contenders, (std::vector<AgentId>{0, 1}));
}

TEST(DetectConflicts, HeadOnSweepOverlap) {
    std::vector<AgentState> a{{0, {2, 1}, {2, 9}, 3}, {1, {2, 5}, {2, 0}, 2}};
    std::vector<MoveAction> m{{Direction::right, 3}, {Direction::left, 2}};
    const auto c = detect_conflicts(a, m);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].cells, (std::vector<Cell>{{2, 3}, {2, 4}}));
}

TEST(DetectConflicts, DisjointSweeps) {
    std::vector<AgentState> a{{0, {0, 0}, {0, 9}, 3}, {1, {2, 0}, {2, 9}, 3}};
    std::vector<MoveAction> m{{Direction::right, 3}, {Direction::right, 3}};
    EXPECT_TRUE(detect_conflicts(a, m).empty());
}

TEST(DetectConflicts, MatchesSegmentOracleWithTransitiveGroups) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 6);
        std::vector<AgentState> agents;
        std::vector<MoveAction> moves;
        std::set<Cell> used;
        while (static_cast<int>(agents.size()) < n) {
            const Cell p{static_cast<int>(rng() % 8), static_cast<int>(rng() % 8)};
            if (!used.insert(p).second) continue;
            const auto d = static_cast<Direction>(rng() % 5);
            const int step = d == Direction::wait ? 0 : 1 + static_cast<int>(rng() % 3);
            agents.push_back({static_cast<AgentId>(agents.size()), p, {0, 0}, 3});
            moves.push_back({d, step});
        }
        // Oracle: overlap graph among movers, then connected components.
        std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (moves[i].direction == Direction::wait || moves[j].direction == Direction::wait) continue;
                const oracle::Segment si{agents[i].pos, offset(agents[i].pos, moves[i].direction, moves[i].step)};
                const oracle::Segment sj{agents[j].pos, offset(agents[j].pos, moves[j].direction, moves[j].step)};
                if (!oracle::segment_overlap(si, sj).empty()) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        std::set<std::vector<AgentId>> expected;
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (int i = 0; i < n; ++i) {
            if (seen[i] || adj[i].empty()) continue;
            std::vector<AgentId> comp;
            std::vector<int> stack{i};
            seen[i] = true;
            while (!stack.empty()) {
                const int x = stack.back();
                stack.pop_back();
                comp.push_back(x);
                for (int y : adj[x]) {
                    if (!seen[y]) {
                        seen[y] = true;
                        stack.push_back(y);
                    }
                }
            }
            std::sort(comp.begin(), comp.end());
            expected.insert(comp);
        }
        std::set<std::vector<AgentId>> got;
        for (const auto& c : detect_conflicts(agents, moves)) got.insert(c.contenders);
        ASSERT_EQ(got, expected) << "trial " << trial;
    }
}

TEST(TryReassign, EqualDescentAlternativeResolves) {
    const GridWorld g(5, 5);
    std::vector<AgentState> a{{0, {0, 0}, {2, 2}, 1}, {1, {0, 2}, {0, 0}, 1}};
    const auto maps = maps_for(g, a);
    std::vector<MoveAction> m{{Direction::right, 1}, {Direction::left, 1}};
    const auto c = detect_conflicts(a, m);
    ASSERT_EQ(c.size(), 1u);
    const auto r = try_reassign(c[0], g, maps, a, m);
    EXPECT_EQ(r.contenders, std::vector<AgentId>{1});
    EXPECT_EQ(m[0], (MoveAction{Direction::down, 1}));
    EXPECT_TRUE(detect_conflicts(a, m).empty());
}

TEST(TryReassign, NarrowGapLeavesConflict) {
    const auto g = GridWorld::from_ascii({"#.#", "...", "#.#"});
    std::vector<AgentState> a{{0, {1, 0}, {1, 2}, 1}, {1, {0, 1}, {2, 1}, 1}};
    const auto maps = maps_for(g, a);
    std::vector<MoveAction> m{{Direction::right, 1}, {Direction::down, 1}};
    const auto c = detect_conflicts(a, m);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(try_reassign(c[0], g, maps, a, m).contenders, (std::vector<AgentId>{0, 1}));
}

TEST(TryReassign, ThreeContendersOneMoves) {
    const GridWorld g(5, 5);
    // All three aim at (0,1). Agent 0 can drop to (1,0); agent 2 could too,
    // but by then agent 0 has taken it.
    std::vector<AgentState> a{{0, {0, 0}, {2, 2}, 1}, {1, {0, 2}, {0, 0}, 1}, {2, {1, 1}, {0, 0}, 1}};
    const auto maps = maps_for(g, a);
    std::vector<MoveAction> m{{Direction::right, 1}, {Direction::left, 1}, {Direction::up, 1}};
    const auto c = detect_conflicts(a, m);
    ASSERT_EQ(c.size(), 1u);
    ASSERT_EQ(c[0].contenders.size(), 3u);
    EXPECT_EQ(try_reassign(c[0], g, maps, a, m).contenders, (std::vector<AgentId>{1, 2}));
}

TEST(FindCollisions, PairsWithFirstSharedCell) {
    const auto c = find_collisions(4, {{0, {{1, 1}, {1, 2}, {1, 3}}}, {1, {{0, 2}, {1, 2}}}, {2, {{5, 5}}}});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].tick, 4);
    EXPECT_EQ(c[0].cell, (Cell{1, 2}));
    EXPECT_EQ(c[0].a, 0);
    EXPECT_EQ(c[0].b, 1);
}

TEST(RunTrial, CrossingPairIsCollisionFree) {
    const auto run = run_trial(fig1_scenario(), ResolverKind::auction);
    const auto& t = run.trace;
    EXPECT_TRUE(t.complete);
    EXPECT_TRUE(t.collisions.empty());
    EXPECT_EQ(t.arrival, (std::vector<std::optional<Tick>>{2, 3}));
    ASSERT_EQ(t.conflicts.size(), 1u);
    EXPECT_EQ(t.conflicts[0].cell, (Cell{2, 2}));
    int waits = 0;
    for (const auto& s : t.steps) waits += s.agent == 1 && s.waiting;
    EXPECT_EQ(waits, 1);
    EXPECT_EQ(t.configurations.front(), (std::vector<Cell>{{2, 0}, {0, 2}}));
}

TEST(RunTrial, SingleAgentStraightLine) {
    for (int d = 1; d <= 9; ++d) {
        for (int v = 1; v <= 4; ++v) {
            Scenario s;
            s.grid = GridWorld(10, 3);
            s.agents = {{0, {1, 0}, {1, d}, v}};
            const auto run = run_trial(s, ResolverKind::auction);
            EXPECT_EQ(run.trace.arrival[0], (d + v - 1) / v);
            EXPECT_TRUE(run.trace.conflicts.empty());
        }
    }
}

TEST(RunTrial, TickLimitMarksIncomplete) {
    TrialOptions o;
    o.tick_limit = 1;
    const auto run = run_trial(fig1_scenario(), ResolverKind::auction, o);
    EXPECT_FALSE(run.trace.complete);
    EXPECT_EQ(run.trace.ticks, 1);
    EXPECT_FALSE(run.trace.timed_out);
    o.tick_limit = -1;
    EXPECT_THROW(run_trial(fig1_scenario(), ResolverKind::auction, o), std::invalid_argument);
}

TEST(RunTrial, DefaultTickLimit) {
    Scenario s = fig1_scenario();
    EXPECT_EQ(default_tick_limit(s), 4 * 10 * 2);
}

namespace {

void check_invariants(const Scenario& s, const SimulationTrace& t) {
    ASSERT_FALSE(t.configurations.empty());
    std::vector<Cell> starts;
    for (const auto& a : s.agents) starts.push_back(a.pos);
    EXPECT_EQ(t.configurations.front(), starts);
    EXPECT_TRUE(t.collisions.empty());
    const auto maps = build_potential_maps(s.grid, s.agents);
    for (std::size_t k = 0; k < t.configurations.size(); ++k) {
        std::set<Cell> cells;
        for (std::size_t i = 0; i < s.agents.size(); ++i) {
            const bool gone = t.arrival[i] && static_cast<std::size_t>(*t.arrival[i]) <= k;
            if (gone) {
                EXPECT_EQ(t.configurations[k][i], s.agents[i].goal);
                continue;
            }
            EXPECT_TRUE(cells.insert(t.configurations[k][i]).second) << "two agents share a cell at tick " << k;
        }
    }
    for (const auto& st : t.steps) {
        if (st.waiting || st.yielded) continue;
        const auto& m = maps[static_cast<std::size_t>(st.agent)];
        EXPECT_LT(m.at(st.to), m.at(st.from));
        EXPECT_EQ(m.at(st.from) - m.at(st.to), st.action.step);
    }
}

}  // namespace

TEST(RunTrial, InvariantsAcrossScenarioKinds) {
    for (auto kind : {ScenarioKind::doorway, ScenarioKind::hallway, ScenarioKind::intersection,
                      ScenarioKind::random_obstacles}) {
        for (auto resolver : {ResolverKind::auction, ResolverKind::random_ordering, ResolverKind::fifo}) {
            for (std::uint64_t seed = 0; seed < 15; ++seed) {
                const auto s = make_scenario({kind, 10, 10, 8, 2, 12, {1, 3}, seed});
                TrialOptions o;
                o.seed = seed;
                const auto run = run_trial(s, resolver, o);
                SCOPED_TRACE(std::string(to_string(kind)) + " " + std::string(to_string(resolver)) + " seed " +
                             std::to_string(seed));
                check_invariants(s, run.trace);
                EXPECT_TRUE(run.trace.complete);
            }
        }
    }
}

TEST(RunTrial, Deterministic) {
    const auto s = make_scenario({ScenarioKind::intersection, 12, 12, 12, 2, 0, {1, 3}, 8});
    for (auto r : {ResolverKind::auction, ResolverKind::random_ordering}) {
        TrialOptions o;
        o.seed = 3;
        EXPECT_EQ(trace_text(run_trial(s, r, o).trace), trace_text(run_trial(s, r, o).trace));
    }
}

TEST(TraceIo, Formats) {
    const auto run = run_trial(fig1_scenario(), ResolverKind::auction);
    std::ostringstream log;
    write_trace_log(log, run.trace);
    std::istringstream in(log.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "tick,agent,row,col,action,waiting");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,2,3,right:3,0");
    std::getline(in, line);
    EXPECT_EQ(line, "0,1,0,2,wait,1");

    std::ostringstream auction;
    write_auction_log(auction, run.trace);
    EXPECT_EQ(auction.str(), "tick,cell,contenders,bids,sigma,payments,utilities\n0,2 2,0 1,3 3,1 2,1.5 0,1.5 1.5\n");
}
