#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace amapf {

using AgentId = int;
using Tick = int;

// (row, col) with row 0 at the top.
struct Cell {
    int row = 0;
    int col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept {
        return std::hash<std::int64_t>{}((static_cast<std::int64_t>(c.row) << 32) ^ static_cast<std::uint32_t>(c.col));
    }
};

enum class Direction { up, down, left, right, wait };

std::string_view to_string(Direction d);
Direction opposite(Direction d);
Cell offset(Cell c, Direction d, int steps = 1);

/// Raised when a scenario or grid cannot be constructed as requested.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an action would leave the grid or exceed the agent's incentive.
class IllegalAction : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Rectangular 4-connected grid with static obstacle cells.
class GridWorld {
public:
    GridWorld() = default;
    GridWorld(int width, int height);
    GridWorld(int width, int height, const std::vector<Cell>& obstacles);

    /// Parses '.' (free) and '#' (obstacle) rows. All rows must have equal length.
    static GridWorld from_ascii(const std::vector<std::string>& rows);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t cell_count() const noexcept { return blocked_.size(); }

    bool in_bounds(Cell c) const noexcept {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }
    bool is_free(Cell c) const noexcept { return in_bounds(c) && !blocked_[index(c)]; }
    bool is_obstacle(Cell c) const noexcept { return in_bounds(c) && blocked_[index(c)]; }

    std::size_t index(Cell c) const noexcept {
        return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.col);
    }
    Cell cell_at(std::size_t idx) const noexcept {
        return {static_cast<int>(idx / static_cast<std::size_t>(width_)), static_cast<int>(idx % static_cast<std::size_t>(width_))};
    }

    void set_obstacle(Cell c, bool blocked = true);

    /// Obstacles in row-major order.
    std::vector<Cell> obstacles() const;
    std::vector<Cell> free_cells() const;

    /// Free 4-neighbours in the fixed order up, down, left, right.
    std::vector<Cell> free_neighbors(Cell c) const;

    std::vector<std::string> to_ascii() const;

    friend bool operator==(const GridWorld&, const GridWorld&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> blocked_;
};

struct AgentState {
    AgentId id = 0;
    Cell pos;
    Cell goal;
    int incentive = 1;  // max cells per move; also the truthful bid
    bool arrived = false;
    std::optional<Tick> arrival_time;

    friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct MoveAction {
    Direction direction = Direction::wait;
    int step = 0;

    static MoveAction wait() { return {}; }
    friend bool operator==(const MoveAction&, const MoveAction&) = default;
};

enum class ScenarioKind { doorway, hallway, intersection, random_obstacles, custom };

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);

struct IncentiveRange {
    int min = 1;
    int max = 3;
};

struct Scenario {
    GridWorld grid;
    std::vector<AgentState> agents;
    ScenarioKind kind = ScenarioKind::custom;
    int gap_size = 0;
    std::uint64_t rng_seed = 0;

    std::size_t n_obstacles() const { return grid.obstacles().size(); }
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScenarioParams {
    ScenarioKind kind = ScenarioKind::doorway;
    int width = 10;
    int height = 10;
    int n_agents = 4;
    int gap_size = 1;
    int n_obstacles = 0;  // random_obstacles only
    IncentiveRange incentives;
    std::uint64_t seed = 0;
    int max_retries = 1000;
};

Scenario make_scenario(const ScenarioParams& params);

/// Checks every Scenario invariant; throws ScenarioError naming the first violation.
void validate_scenario(const Scenario& scenario);

/// Destination of `action` from `agent.pos`. Occupancy and obstacles are not checked.
Cell apply_action(const AgentState& agent, const MoveAction& action, const GridWorld& grid);

/// Cells covered by moving `step` cells from `from` in direction `d`, endpoints included.
std::vector<Cell> swept_cells(Cell from, Direction d, int step);

/// Unit-cost BFS distance between two free cells; nullopt when unreachable.
std::optional<int> bfs_distance(const GridWorld& grid, Cell from, Cell to);

}  // namespace amapf
