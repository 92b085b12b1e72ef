#include "amapf/world.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <random>
#include <unordered_set>

namespace amapf {

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::up: return "up";
        case Direction::down: return "down";
        case Direction::left: return "left";
        case Direction::right: return "right";
        case Direction::wait: return "wait";
    }
    return "?";
}

Direction opposite(Direction d) {
    switch (d) {
        case Direction::up: return Direction::down;
        case Direction::down: return Direction::up;
        case Direction::left: return Direction::right;
        case Direction::right: return Direction::left;
        case Direction::wait: return Direction::wait;
    }
    return Direction::wait;
}

Cell offset(Cell c, Direction d, int steps) {
    switch (d) {
        case Direction::up: return {c.row - steps, c.col};
        case Direction::down: return {c.row + steps, c.col};
        case Direction::left: return {c.row, c.col - steps};
        case Direction::right: return {c.row, c.col + steps};
        case Direction::wait: return c;
    }
    return c;
}

GridWorld::GridWorld(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) {
        throw ScenarioError("grid dimensions must be positive");
    }
    blocked_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

GridWorld::GridWorld(int width, int height, const std::vector<Cell>& obstacles) : GridWorld(width, height) {
    for (const auto& c : obstacles) {
        if (!in_bounds(c)) {
            throw ScenarioError("obstacle (" + std::to_string(c.row) + "," + std::to_string(c.col) + ") outside grid");
        }
        blocked_[index(c)] = 1;
    }
}

GridWorld GridWorld::from_ascii(const std::vector<std::string>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw ScenarioError("empty ASCII map");
    }
    const int w = static_cast<int>(rows.front().size());
    GridWorld grid(w, static_cast<int>(rows.size()));
    for (int r = 0; r < grid.height(); ++r) {
        const auto& line = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(line.size()) != w) {
            throw ScenarioError("ragged ASCII map at row " + std::to_string(r));
        }
        for (int c = 0; c < w; ++c) {
            const char ch = line[static_cast<std::size_t>(c)];
            if (ch == '#') {
                grid.set_obstacle({r, c});
            } else if (ch != '.') {
                throw ScenarioError(std::string("unexpected map character '") + ch + "'");
            }
        }
    }
    return grid;
}

void GridWorld::set_obstacle(Cell c, bool blocked) {
    if (!in_bounds(c)) {
        throw ScenarioError("obstacle outside grid");
    }
    blocked_[index(c)] = blocked ? 1 : 0;
}

std::vector<Cell> GridWorld::obstacles() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < blocked_.size(); ++i) {
        if (blocked_[i]) out.push_back(cell_at(i));
    }
    return out;
}

std::vector<Cell> GridWorld::free_cells() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < blocked_.size(); ++i) {
        if (!blocked_[i]) out.push_back(cell_at(i));
    }
    return out;
}

std::vector<Cell> GridWorld::free_neighbors(Cell c) const {
    std::vector<Cell> out;
    for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right}) {
        const Cell n = offset(c, d);
        if (is_free(n)) out.push_back(n);
    }
    return out;
}

std::vector<std::string> GridWorld::to_ascii() const {
    std::vector<std::string> rows(static_cast<std::size_t>(height_), std::string(static_cast<std::size_t>(width_), '.'));
    for (const auto& c : obstacles()) {
        rows[static_cast<std::size_t>(c.row)][static_cast<std::size_t>(c.col)] = '#';
    }
    return rows;
}

std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::doorway: return "doorway";
        case ScenarioKind::hallway: return "hallway";
        case ScenarioKind::intersection: return "intersection";
        case ScenarioKind::random_obstacles: return "random-obstacles";
        case ScenarioKind::custom: return "custom";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
    for (auto k : {ScenarioKind::doorway, ScenarioKind::hallway, ScenarioKind::intersection,
                   ScenarioKind::random_obstacles, ScenarioKind::custom}) {
        if (s == to_string(k)) return k;
    }
    if (s == "obstacles" || s == "random_obstacles") return ScenarioKind::random_obstacles;
    return std::nullopt;
}

std::optional<int> bfs_distance(const GridWorld& grid, Cell from, Cell to) {
    if (!grid.is_free(from) || !grid.is_free(to)) return std::nullopt;
    std::vector<int> dist(grid.cell_count(), -1);
    std::queue<Cell> open;
    dist[grid.index(from)] = 0;
    open.push(from);
    while (!open.empty()) {
        const Cell c = open.front();
        open.pop();
        if (c == to) return dist[grid.index(c)];
        for (const auto& n : grid.free_neighbors(c)) {
            auto& d = dist[grid.index(n)];
            if (d < 0) {
                d = dist[grid.index(c)] + 1;
                open.push(n);
            }
        }
    }
    return std::nullopt;
}

std::vector<Cell> swept_cells(Cell from, Direction d, int step) {
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(step) + 1);
    for (int k = 0; k <= step; ++k) out.push_back(offset(from, d, k));
    return out;
}

Cell apply_action(const AgentState& agent, const MoveAction& action, const GridWorld& grid) {
    if (action.direction == Direction::wait) {
        if (action.step != 0) throw IllegalAction("wait must have step 0");
        return agent.pos;
    }
    if (action.step < 1 || action.step > agent.incentive) {
        throw IllegalAction("step " + std::to_string(action.step) + " outside [1, " + std::to_string(agent.incentive) + "]");
    }
    for (int k = 1; k <= action.step; ++k) {
        if (!grid.in_bounds(offset(agent.pos, action.direction, k))) {
            throw IllegalAction("move " + std::string(to_string(action.direction)) + " leaves the grid");
        }
    }
    return offset(agent.pos, action.direction, action.step);
}

namespace {

using Rng = std::mt19937_64;
using Region = std::vector<Cell>;

struct Layout {
    GridWorld grid;
    // Per-agent (start region, goal region) chooser.
    std::vector<Region> regions;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ScenarioError(what);
}

Region collect(const GridWorld& g, const std::function<bool(Cell)>& pred) {
    Region out;
    for (const auto& c : g.free_cells()) {
        if (pred(c)) out.push_back(c);
    }
    return out;
}

GridWorld doorway_grid(const ScenarioParams& p) {
    require(p.width >= 3, "doorway needs width >= 3");
    require(p.gap_size >= 1 && p.gap_size < p.height, "doorway gap must be in [1, height)");
    GridWorld g(p.width, p.height);
    const int wall = p.width / 2;
    const int g0 = (p.height - p.gap_size) / 2;
    for (int r = 0; r < p.height; ++r) {
        if (r < g0 || r >= g0 + p.gap_size) g.set_obstacle({r, wall});
    }
    return g;
}

struct HallwaySpan {
    int c0, c1, r0;
};

HallwaySpan hallway_span(const ScenarioParams& p) {
    return {p.width / 4, p.width - 1 - p.width / 4, (p.height - p.gap_size) / 2};
}

GridWorld hallway_grid(const ScenarioParams& p) {
    require(p.width >= 4, "hallway needs width >= 4");
    require(p.gap_size >= 1 && p.gap_size < p.height, "hallway gap must be in [1, height)");
    GridWorld g(p.width, p.height);
    const auto s = hallway_span(p);
    for (int r = 0; r < p.height; ++r) {
        if (r >= s.r0 && r < s.r0 + p.gap_size) continue;
        for (int c = s.c0; c <= s.c1; ++c) g.set_obstacle({r, c});
    }
    return g;
}

GridWorld intersection_grid(const ScenarioParams& p) {
    require(p.gap_size >= 1 && p.gap_size <= std::min(p.width, p.height) - 2,
            "intersection gap must be in [1, min(width, height) - 2]");
    GridWorld g(p.width, p.height);
    const int r0 = (p.height - p.gap_size) / 2;
    const int k0 = (p.width - p.gap_size) / 2;
    for (int r = 0; r < p.height; ++r) {
        for (int c = 0; c < p.width; ++c) {
            const bool in_h = r >= r0 && r < r0 + p.gap_size;
            const bool in_v = c >= k0 && c < k0 + p.gap_size;
            if (!in_h && !in_v) g.set_obstacle({r, c});
        }
    }
    return g;
}

Cell draw(const Region& region, const std::unordered_set<Cell, CellHash>& used, Rng& rng, const Cell* exclude) {
    Region avail;
    for (const auto& c : region) {
        if (!used.contains(c) && (exclude == nullptr || c != *exclude)) avail.push_back(c);
    }
    if (avail.empty()) throw ScenarioError("placement infeasible: region exhausted");
    std::uniform_int_distribution<std::size_t> pick(0, avail.size() - 1);
    return avail[pick(rng)];
}

// Returns (start region, goal region) per agent for the structured layouts.
std::vector<std::pair<Region, Region>> agent_regions(const ScenarioParams& p, const GridWorld& g, Rng& rng) {
    std::vector<std::pair<Region, Region>> out;
    switch (p.kind) {
        case ScenarioKind::doorway: {
            const int wall = p.width / 2;
            Region left = collect(g, [&](Cell c) { return c.col < wall; });
            Region right = collect(g, [&](Cell c) { return c.col > wall; });
            for (int i = 0; i < p.n_agents; ++i) out.emplace_back(left, right);
            break;
        }
        case ScenarioKind::hallway: {
            const auto s = hallway_span(p);
            Region left = collect(g, [&](Cell c) { return c.col < s.c0; });
            Region right = collect(g, [&](Cell c) { return c.col > s.c1; });
            for (int i = 0; i < p.n_agents; ++i) {
                if (i % 2 == 0) {
                    out.emplace_back(left, right);
                } else {
                    out.emplace_back(right, left);
                }
            }
            break;
        }
        case ScenarioKind::intersection: {
            const int r0 = (p.height - p.gap_size) / 2;
            const int k0 = (p.width - p.gap_size) / 2;
            const int g1 = p.gap_size;
            std::array<Region, 4> arms{
                collect(g, [&](Cell c) { return c.row < r0; }),            // north
                collect(g, [&](Cell c) { return c.col >= k0 + g1; }),      // east
                collect(g, [&](Cell c) { return c.row >= r0 + g1; }),      // south
                collect(g, [&](Cell c) { return c.col < k0; }),            // west
            };
            std::uniform_int_distribution<int> other(1, 3);
            for (int i = 0; i < p.n_agents; ++i) {
                const int from = i % 4;
                const int to = (from + other(rng)) % 4;
                out.emplace_back(arms[static_cast<std::size_t>(from)], arms[static_cast<std::size_t>(to)]);
            }
            break;
        }
        default: {
            Region all = g.free_cells();
            for (int i = 0; i < p.n_agents; ++i) out.emplace_back(all, all);
            break;
        }
    }
    return out;
}

GridWorld random_obstacle_grid(const ScenarioParams& p, Rng& rng) {
    const int cells = p.width * p.height;
    require(p.n_obstacles >= 0, "n_obstacles must be nonnegative");
    require(p.n_obstacles + 2 * p.n_agents <= cells, "placement infeasible: too many obstacles for the grid");
    std::vector<int> idx(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    GridWorld g(p.width, p.height);
    for (int i = 0; i < p.n_obstacles; ++i) {
        g.set_obstacle(g.cell_at(static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])));
    }
    return g;
}

}  // namespace

void validate_scenario(const Scenario& s) {
    require(!s.agents.empty(), "scenario has no agents");
    std::unordered_set<Cell, CellHash> starts, goals;
    for (const auto& a : s.agents) {
        require(s.grid.is_free(a.pos), "agent " + std::to_string(a.id) + " starts on a blocked cell");
        require(s.grid.is_free(a.goal), "agent " + std::to_string(a.id) + " has a blocked goal");
        require(a.pos != a.goal, "agent " + std::to_string(a.id) + " starts on its goal");
        require(a.incentive >= 1, "agent " + std::to_string(a.id) + " has incentive < 1");
        require(starts.insert(a.pos).second, "two agents share a start cell");
        require(goals.insert(a.goal).second, "two agents share a goal cell");
        require(bfs_distance(s.grid, a.pos, a.goal).has_value(),
                "agent " + std::to_string(a.id) + " cannot reach its goal");
    }
}

Scenario make_scenario(const ScenarioParams& p) {
    require(p.n_agents >= 1, "n_agents must be >= 1");
    require(p.incentives.min >= 1 && p.incentives.min <= p.incentives.max, "incentive range must be nonempty with min >= 1");
    require(p.max_retries >= 1, "max_retries must be >= 1");

    Rng rng(p.seed);
    GridWorld grid;
    switch (p.kind) {
        case ScenarioKind::doorway: grid = doorway_grid(p); break;
        case ScenarioKind::hallway: grid = hallway_grid(p); break;
        case ScenarioKind::intersection: grid = intersection_grid(p); break;
        case ScenarioKind::random_obstacles: grid = GridWorld(p.width, p.height); break;
        case ScenarioKind::custom: throw ScenarioError("custom scenarios are loaded, not generated");
    }

    std::uniform_int_distribution<int> incentive(p.incentives.min, p.incentives.max);
    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt < p.max_retries; ++attempt) {
        if (p.kind == ScenarioKind::random_obstacles) {
            grid = random_obstacle_grid(p, rng);
        }
        try {
            const auto regions = agent_regions(p, grid, rng);
            std::unordered_set<Cell, CellHash> used_starts, used_goals;
            Scenario s{grid, {}, p.kind, p.kind == ScenarioKind::random_obstacles ? 0 : p.gap_size, p.seed};
            for (int i = 0; i < p.n_agents; ++i) {
                const auto& [from, to] = regions[static_cast<std::size_t>(i)];
                AgentState a;
                a.id = i;
                a.pos = draw(from, used_starts, rng, nullptr);
                a.goal = draw(to, used_goals, rng, &a.pos);
                a.incentive = incentive(rng);
                used_starts.insert(a.pos);
                used_goals.insert(a.goal);
                s.agents.push_back(a);
            }
            validate_scenario(s);
            return s;
        } catch (const ScenarioError& e) {
            last_failure = e.what();
            // Exhausted structured regions never recover by resampling.
            if (p.kind != ScenarioKind::random_obstacles && p.kind != ScenarioKind::intersection &&
                last_failure.starts_with("placement infeasible")) {
                break;
            }
        }
    }
    throw ScenarioError("could not construct " + std::string(to_string(p.kind)) + " scenario: " + last_failure);
}

}  // namespace amapf
