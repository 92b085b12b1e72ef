#include "amapf/potential.hpp"

#include <deque>
#include <map>

namespace amapf {

PotentialMap build_potential_map(const GridWorld& grid, Cell goal) {
    if (!grid.is_free(goal)) {
        throw ScenarioError("potential map goal (" + std::to_string(goal.row) + "," + std::to_string(goal.col) +
                            ") is not a free cell");
    }
    PotentialMap m;
    m.goal_ = goal;
    m.width_ = grid.width();
    m.height_ = grid.height();
    m.values_.assign(grid.cell_count(), PotentialMap::kUnreachable);

    std::deque<Cell> open{goal};
    m.values_[grid.index(goal)] = 0;
    while (!open.empty()) {
        const Cell c = open.front();
        open.pop_front();
        const int next = m.values_[grid.index(c)] + 1;
        for (const auto& n : grid.free_neighbors(c)) {
            auto& v = m.values_[grid.index(n)];
            if (v == PotentialMap::kUnreachable) {
                v = next;
                open.push_back(n);
            }
        }
    }
    return m;
}

std::vector<PotentialMap> build_potential_maps(const GridWorld& grid, const std::vector<AgentState>& agents) {
    std::map<Cell, PotentialMap> cache;
    std::vector<PotentialMap> out;
    out.reserve(agents.size());
    for (const auto& a : agents) {
        auto it = cache.find(a.goal);
        if (it == cache.end()) it = cache.emplace(a.goal, build_potential_map(grid, a.goal)).first;
        out.push_back(it->second);
    }
    return out;
}

void PotentialMap::write_csv(std::ostream& out) const {
    for (int r = 0; r < height_; ++r) {
        for (int c = 0; c < width_; ++c) {
            const int v = at({r, c});
            if (c) out << ',';
            out << (v == kUnreachable ? -1 : v);
        }
        out << '\n';
    }
}

}  // namespace amapf
