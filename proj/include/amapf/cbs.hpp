#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "amapf/planner.hpp"
#include "amapf/world.hpp"

namespace amapf {

// Conflict-based search over unit-step paths. An agent's path ends on its
// goal and the agent leaves the grid afterwards, the same as in the simulator.

enum class CbsVariant { cbs, cbs_random };

std::string_view to_string(CbsVariant v);
std::optional<CbsVariant> parse_cbs_variant(std::string_view s);

/// Undirected edge weights, one per pair of adjacent free cells.
class EdgeCosts {
public:
    EdgeCosts() = default;
    /// All weights 1.
    explicit EdgeCosts(const GridWorld& grid);
    /// max(0.01, 1 + N(0, sigma^2)) per edge, drawn in row-major order (right edge, then down edge).
    static EdgeCosts sample(const GridWorld& grid, double sigma, std::uint64_t seed);

    /// Weight of the move a -> b (adjacent cells). Waiting costs 1.
    double cost(Cell a, Cell b) const;
    double min_weight() const noexcept { return min_; }

private:
    int width_ = 0;
    std::vector<double> right_;
    std::vector<double> down_;
    double min_ = 1.0;
};

struct VertexConstraint {
    AgentId agent = 0;
    Cell cell;
    Tick time = 0;  // agent may not be at `cell` at `time`
};

struct EdgeConstraint {
    AgentId agent = 0;
    Cell from;
    Cell to;
    Tick time = 0;  // agent may not move from -> to between time and time + 1
};

using Path = std::vector<Cell>;  // path[t] is the cell at tick t; back() is the goal

struct ConstraintSet {
    std::vector<VertexConstraint> vertex;
    std::vector<EdgeConstraint> edge;
};

/// Space-time A* for one agent. nullopt when no path satisfies the constraints.
std::optional<Path> plan_single(const GridWorld& grid, const EdgeCosts& costs, AgentId agent, Cell start, Cell goal,
                                const ConstraintSet& constraints);

double path_cost(const Path& path, const EdgeCosts& costs);

/// First tick (and pair) at which two paths' sweeps share a cell.
struct PathConflict {
    Tick time = 0;  // transition time -> time + 1
    AgentId a = 0;
    AgentId b = 0;
    enum Kind { vertex, swap, a_follows_b, b_follows_a } kind = vertex;
    Cell cell;  // shared cell (the destination for vertex, a's destination for swap)
};

std::optional<PathConflict> first_conflict(const std::vector<Path>& paths);

struct CbsOptions {
    double noise_sigma = 0.0;
    CbsVariant variant = CbsVariant::cbs;
    std::uint64_t seed = 0;
    double timeout_s = 20.0;
};

struct CbsResult {
    std::optional<std::vector<Path>> paths;  // never partial
    double cost = 0.0;                       // under the sampled edge weights
    bool timed_out = false;
    double elapsed_s = 0.0;
    std::size_t expanded = 0;                // constraint-tree nodes
};

CbsResult plan_cbs(const Scenario& scenario, const CbsOptions& options = {});

/// Walks each agent min(incentive, remaining) waypoints per tick along its
/// own path. Sweeps are the waypoints covered that tick; collisions are
/// recorded and agents keep going.
SimulationTrace execute_multihop(const std::vector<Path>& paths, const std::vector<int>& incentives);

/// plan_cbs followed by execute_multihop; a timeout yields an incomplete, empty trace.
TrialRun run_cbs_trial(const Scenario& scenario, const CbsOptions& options);

}  // namespace amapf
