#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "amapf/potential.hpp"
#include "amapf/resolver.hpp"
#include "amapf/world.hpp"

namespace amapf {

/// Per-agent forbidden cells (used for the cell an agent just yielded).
using CellFilter = std::function<bool(AgentId, Cell)>;

/// Cells an action covers this tick, start and end included. A wait covers its own cell.
std::vector<Cell> action_sweep(const AgentState& agent, const MoveAction& action);

/// Best single-axis descent for one agent. `occupied` reports cells held by other agents.
MoveAction propose_move(const AgentState& agent, const GridWorld& grid, const PotentialMap& potential,
                        const std::function<bool(Cell)>& occupied, const CellFilter& forbidden = {});

/// One-step lookahead for every unarrived agent; arrived agents (and the
/// cells they vacated) are ignored. Result is indexed by agent id.
std::vector<MoveAction> propose_moves(const GridWorld& grid, std::span<const PotentialMap> potentials,
                                      std::span<const AgentState> agents, const CellFilter& forbidden = {});

struct Conflict {
    Cell cell;                       // first shared cell in row-major order
    std::vector<Cell> cells;         // every cell swept by two or more contenders
    Tick time = 0;
    std::vector<AgentId> contenders;  // ascending
};

/// Groups moving agents whose swept cells intersect; groups are merged
/// transitively so each agent appears in at most one conflict.
std::vector<Conflict> detect_conflicts(std::span<const AgentState> agents, std::span<const MoveAction> actions,
                                       Tick time = 0);

/// Moves contenders (in id order) onto an alternative descent with the same
/// potential decrease that touches no other agent's sweep. Updates `actions`
/// and returns the contenders left in conflict.
Conflict try_reassign(const Conflict& conflict, const GridWorld& grid, std::span<const PotentialMap> potentials,
                      std::span<const AgentState> agents, std::span<MoveAction> actions,
                      const CellFilter& forbidden = {});

enum class ConflictKind { crossing, deadlock };

struct ConflictRecord {
    Tick tick = 0;
    Cell cell;
    ConflictKind kind = ConflictKind::crossing;
    TurnOrdering ordering;
};

struct StepRecord {
    Tick tick = 0;
    AgentId agent = 0;
    Cell from;
    Cell to;
    MoveAction action;
    bool waiting = false;
    bool yielded = false;  // sidestep away from the goal to break a deadlock
};

struct Collision {
    Tick tick = 0;
    Cell cell;
    AgentId a = 0;
    AgentId b = 0;
};

struct SimulationTrace {
    std::vector<std::vector<Cell>> configurations;  // [tick][agent]; arrived agents stay on their goal
    std::vector<StepRecord> steps;
    std::vector<ConflictRecord> conflicts;
    std::vector<Collision> collisions;
    std::vector<std::optional<Tick>> arrival;  // per agent
    Tick ticks = 0;
    bool complete = false;
    bool timed_out = false;
};

/// Pairwise collisions among agents' same-tick sweeps.
std::vector<Collision> find_collisions(Tick tick, const std::vector<std::pair<AgentId, std::vector<Cell>>>& sweeps);

struct TrialOptions {
    Tick tick_limit = 0;           // 0: 4 * (width + height) * n_agents
    double timeout_s = 20.0;
    std::uint64_t seed = 0;        // drives random tie-breaking resolvers
    ScheduleKind schedule = ScheduleKind::harmonic;
    int yield_tabu_ticks = 4;      // how long a yielding agent avoids the cell it left
};

Tick default_tick_limit(const Scenario& scenario);

struct TrialRun {
    SimulationTrace trace;
    double runtime_s = 0.0;
};

/// Runs the propose / detect / reassign / resolve / execute loop until every
/// agent arrives or a limit is hit.
TrialRun run_trial(const Scenario& scenario, ResolverKind resolver, const TrialOptions& options = {});

}  // namespace amapf
