#pragma once

#include <limits>
#include <ostream>
#include <vector>

#include "amapf/world.hpp"

namespace amapf {

/// Exact shortest-path distance from every free cell to a single goal.
/// Unit-cost 4-connected BFS flooded outward from the goal, which coincides
/// with A* distances on this grid and has no local minima.
class PotentialMap {
public:
    static constexpr int kUnreachable = std::numeric_limits<int>::max();

    PotentialMap() = default;

    Cell goal() const noexcept { return goal_; }
    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    int at(Cell c) const noexcept {
        if (c.row < 0 || c.row >= height_ || c.col < 0 || c.col >= width_) return kUnreachable;
        return values_[static_cast<std::size_t>(c.row * width_ + c.col)];
    }
    bool reachable(Cell c) const noexcept { return at(c) != kUnreachable; }

    const std::vector<int>& values() const noexcept { return values_; }

    /// Integer grid, one CSV row per grid row; unreachable cells are written as -1.
    void write_csv(std::ostream& out) const;

    friend PotentialMap build_potential_map(const GridWorld& grid, Cell goal);

private:
    Cell goal_;
    int width_ = 0;
    int height_ = 0;
    std::vector<int> values_;
};

PotentialMap build_potential_map(const GridWorld& grid, Cell goal);

/// One map per agent, indexed by agent position in `agents`; agents sharing a
/// goal share the computation.
std::vector<PotentialMap> build_potential_maps(const GridWorld& grid, const std::vector<AgentState>& agents);

}  // namespace amapf
