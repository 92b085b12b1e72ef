#include "amapf/planner.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace amapf {

namespace {

constexpr Direction kMoves[] = {Direction::up, Direction::down, Direction::left, Direction::right};

bool vertical(Direction d) { return d == Direction::up || d == Direction::down; }

int axis_remaining(const AgentState& a, Direction d) {
    return vertical(d) ? std::abs(a.goal.row - a.pos.row) : std::abs(a.goal.col - a.pos.col);
}

// Longest strictly descending run along `d`, capped by the incentive.
int descent_run(const AgentState& a, Direction d, const GridWorld& grid, const PotentialMap& pot,
                const std::function<bool(Cell)>& occupied, const CellFilter& forbidden) {
    int step = 0;
    Cell cur = a.pos;
    while (step < a.incentive) {
        const Cell next = offset(cur, d);
        if (!grid.is_free(next)) break;
        if (pot.at(next) != pot.at(cur) - 1) break;
        if (occupied && occupied(next)) break;
        if (forbidden && forbidden(a.id, next)) break;
        cur = next;
        ++step;
    }
    return step;
}

bool better(const AgentState& a, Direction d, int step, Direction best, int best_step) {
    if (step != best_step) return step > best_step;
    const int rd = axis_remaining(a, d);
    const int rb = axis_remaining(a, best);
    if (rd != rb) return rd > rb;
    return vertical(d) && !vertical(best);
}

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

std::vector<Cell> action_sweep(const AgentState& agent, const MoveAction& action) {
    return swept_cells(agent.pos, action.direction, action.direction == Direction::wait ? 0 : action.step);
}

MoveAction propose_move(const AgentState& agent, const GridWorld& grid, const PotentialMap& potential,
                        const std::function<bool(Cell)>& occupied, const CellFilter& forbidden) {
    if (agent.arrived) return MoveAction::wait();
    const int here = potential.at(agent.pos);
    if (here == 0 || here == PotentialMap::kUnreachable) return MoveAction::wait();

    MoveAction best = MoveAction::wait();
    for (auto d : kMoves) {
        const int step = descent_run(agent, d, grid, potential, occupied, forbidden);
        if (step == 0) continue;
        if (best.step == 0 || better(agent, d, step, best.direction, best.step)) best = {d, step};
    }
    return best;
}

namespace {

std::unordered_map<Cell, AgentId, CellHash> occupancy(std::span<const AgentState> agents) {
    std::unordered_map<Cell, AgentId, CellHash> occ;
    for (const auto& a : agents) {
        if (!a.arrived) occ.emplace(a.pos, a.id);
    }
    return occ;
}

}  // namespace

std::vector<MoveAction> propose_moves(const GridWorld& grid, std::span<const PotentialMap> potentials,
                                      std::span<const AgentState> agents, const CellFilter& forbidden) {
    const auto occ = occupancy(agents);
    std::vector<MoveAction> out(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        auto occupied = [&](Cell c) {
            const auto it = occ.find(c);
            return it != occ.end() && it->second != a.id;
        };
        out[i] = propose_move(a, grid, potentials[i], occupied, forbidden);
    }
    return out;
}

std::vector<Conflict> detect_conflicts(std::span<const AgentState> agents, std::span<const MoveAction> actions,
                                       Tick time) {
    std::map<Cell, std::vector<std::size_t>> by_cell;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].arrived || actions[i].direction == Direction::wait) continue;
        for (const auto& c : action_sweep(agents[i], actions[i])) by_cell[c].push_back(i);
    }
    Dsu dsu(agents.size());
    std::vector<Cell> shared;
    for (const auto& [cell, who] : by_cell) {
        if (who.size() < 2) continue;
        shared.push_back(cell);
        for (std::size_t k = 1; k < who.size(); ++k) dsu.unite(who[0], who[k]);
    }
    std::map<std::size_t, Conflict> groups;
    for (const auto& cell : shared) {
        const auto root = dsu.find(by_cell[cell].front());
        auto& g = groups[root];
        g.cells.push_back(cell);
        for (auto i : by_cell[cell]) g.contenders.push_back(agents[i].id);
    }
    std::vector<Conflict> out;
    for (auto& [root, g] : groups) {
        std::sort(g.contenders.begin(), g.contenders.end());
        g.contenders.erase(std::unique(g.contenders.begin(), g.contenders.end()), g.contenders.end());
        g.cell = g.cells.front();
        g.time = time;
        out.push_back(std::move(g));
    }
    return out;
}

Conflict try_reassign(const Conflict& conflict, const GridWorld& grid, std::span<const PotentialMap> potentials,
                      std::span<const AgentState> agents, std::span<MoveAction> actions, const CellFilter& forbidden) {
    Conflict residual = conflict;
    const auto occ = occupancy(agents);
    auto index_of = [&](AgentId id) {
        for (std::size_t i = 0; i < agents.size(); ++i) {
            if (agents[i].id == id) return i;
        }
        throw std::out_of_range("unknown contender");
    };

    for (const AgentId id : conflict.contenders) {
        if (residual.contenders.size() < 2) break;
        const auto i = index_of(id);
        const auto& a = agents[i];
        const auto current = actions[i];
        if (current.direction == Direction::wait) continue;

        // Everyone else's swept cells this tick.
        std::unordered_map<Cell, int, CellHash> claimed;
        for (std::size_t j = 0; j < agents.size(); ++j) {
            if (j == i || agents[j].arrived || actions[j].direction == Direction::wait) continue;
            for (const auto& c : action_sweep(agents[j], actions[j])) ++claimed[c];
        }
        auto occupied = [&](Cell c) {
            const auto it = occ.find(c);
            return it != occ.end() && it->second != a.id;
        };
        for (auto d : kMoves) {
            if (d == current.direction) continue;
            if (descent_run(a, d, grid, potentials[i], occupied, forbidden) < current.step) continue;
            const MoveAction alt{d, current.step};
            const auto sweep = action_sweep(a, alt);
            const bool clear = std::none_of(sweep.begin(), sweep.end(), [&](Cell c) { return claimed.contains(c); });
            if (!clear) continue;
            actions[i] = alt;
            residual.contenders.erase(std::find(residual.contenders.begin(), residual.contenders.end(), id));
            break;
        }
    }
    return residual;
}

std::vector<Collision> find_collisions(Tick tick, const std::vector<std::pair<AgentId, std::vector<Cell>>>& sweeps) {
    std::unordered_map<Cell, std::vector<AgentId>, CellHash> by_cell;
    for (const auto& [id, cells] : sweeps) {
        for (const auto& c : cells) {
            auto& v = by_cell[c];
            if (v.empty() || v.back() != id) v.push_back(id);
        }
    }
    std::map<std::pair<AgentId, AgentId>, Cell> pairs;
    for (const auto& [cell, ids] : by_cell) {
        for (std::size_t x = 0; x < ids.size(); ++x) {
            for (std::size_t y = x + 1; y < ids.size(); ++y) {
                const auto key = std::minmax(ids[x], ids[y]);
                auto [it, fresh] = pairs.emplace(key, cell);
                if (!fresh && cell < it->second) it->second = cell;
            }
        }
    }
    std::vector<Collision> out;
    for (const auto& [key, cell] : pairs) out.push_back({tick, cell, key.first, key.second});
    return out;
}

Tick default_tick_limit(const Scenario& s) {
    return 4 * (s.grid.width() + s.grid.height()) * static_cast<Tick>(s.agents.size());
}

namespace {

struct ActiveOrdering {
    Cell cell;
    std::vector<AgentId> members;
    std::vector<int> turns;

    int turn_of(AgentId a) const {
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (members[i] == a) return turns[i];
        }
        return 0;
    }
    bool has(AgentId a) const { return turn_of(a) != 0; }
};

struct Tabu {
    Cell cell;
    Tick until;  // exclusive
};

// One scheduled step of a push chain.
struct Push {
    AgentId agent;
    Cell from;
    Cell target;
    Tick at;
    int chain;
};

class Simulation {
public:
    Simulation(const Scenario& s, const ConflictResolver& resolver, const TrialOptions& opt)
        : grid_(s.grid), agents_(s.agents), resolver_(resolver), opt_(opt), rng_(opt.seed) {
        for (std::size_t i = 0; i < agents_.size(); ++i) {
            if (agents_[i].id != static_cast<AgentId>(i)) throw ScenarioError("agent ids must be 0..n-1 in order");
        }
        potentials_ = build_potential_maps(grid_, agents_);
        const auto n = agents_.size();
        hold_until_.assign(n, 0);
        pinned_until_.assign(n, 0);
        priority_.assign(n, 0);
        arrival_.assign(n, 0);
        in_conflict_.assign(n, false);
        tabu_.resize(n);
        trace_.arrival.assign(n, std::nullopt);
        record_configuration();
    }

    SimulationTrace run() {
        const Tick limit = opt_.tick_limit > 0 ? opt_.tick_limit : default_tick_limit(Scenario{grid_, agents_});
        const auto start = std::chrono::steady_clock::now();
        Tick t = 0;
        while (!all_arrived() && t < limit) {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() > opt_.timeout_s) {
                trace_.timed_out = true;
                break;
            }
            step(t);
            ++t;
        }
        trace_.ticks = t;
        trace_.complete = all_arrived();
        return std::move(trace_);
    }

private:
    bool all_arrived() const {
        return std::all_of(agents_.begin(), agents_.end(), [](const AgentState& a) { return a.arrived; });
    }

    bool is_tabu(AgentId a, Cell c, Tick t) const {
        const auto& v = tabu_[static_cast<std::size_t>(a)];
        return std::any_of(v.begin(), v.end(), [&](const Tabu& x) { return x.cell == c && x.until > t; });
    }

    void record_configuration() {
        std::vector<Cell> cfg;
        for (const auto& a : agents_) cfg.push_back(a.arrived ? a.goal : a.pos);
        trace_.configurations.push_back(std::move(cfg));
    }

    ActiveOrdering* ordering_of(AgentId a) {
        for (auto& o : orderings_) {
            if (o.has(a)) return &o;
        }
        return nullptr;
    }

    Contender contender(AgentId id, Tick t) {
        const auto i = static_cast<std::size_t>(id);
        if (!in_conflict_[i]) {
            in_conflict_[i] = true;
            arrival_[i] = t;
        }
        return {id, agents_[i].incentive, arrival_[i], potentials_[i].at(agents_[i].pos)};
    }

    // Runs the resolver and installs the ordering; turn q is released `delay + q - 1` ticks from now.
    TurnOrdering order(std::vector<AgentId> ids, Tick t, Cell cell, ConflictKind kind, Tick delay) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::vector<Contender> c;
        for (auto id : ids) c.push_back(contender(id, t));
        auto ordering = resolver_.resolve(c, rng_);

        // Superseded orderings are dropped.
        std::erase_if(orderings_, [&](const ActiveOrdering& o) {
            return std::any_of(ids.begin(), ids.end(), [&](AgentId id) { return o.has(id); });
        });
        ActiveOrdering active{cell, ordering.contenders, ordering.turns};
        for (std::size_t k = 0; k < ids.size(); ++k) {
            const auto a = static_cast<std::size_t>(ordering.contenders[k]);
            hold_until_[a] = std::max(t + delay + ordering.turns[k] - 1, pinned_until_[a]);
        }
        orderings_.push_back(std::move(active));
        trace_.conflicts.push_back({t, cell, kind, ordering});
        return ordering;
    }

    static Direction toward(Cell a, Cell b) {
        if (b.row < a.row) return Direction::up;
        if (b.row > a.row) return Direction::down;
        return b.col < a.col ? Direction::left : Direction::right;
    }

    void step(Tick t) {
        const auto n = agents_.size();
        CellFilter forbidden = [&](AgentId a, Cell c) { return is_tabu(a, c, t); };

        auto actions = propose_moves(grid_, potentials_, agents_, forbidden);
        std::vector<bool> forced(n, false);
        apply_pushes(t, actions, forced);
        auto has_forced = [&](const Conflict& c) {
            return std::any_of(c.contenders.begin(), c.contenders.end(),
                               [&](AgentId id) { return forced[static_cast<std::size_t>(id)]; });
        };

        for (const auto& c : detect_conflicts(agents_, actions, t)) {
            if (!has_forced(c)) try_reassign(c, grid_, potentials_, agents_, actions, forbidden);
        }
        const auto conflicts = detect_conflicts(agents_, actions, t);

        std::vector<bool> moving(n, false);
        std::vector<bool> contended(n, false);
        auto free_to_move = [&](std::size_t i) {
            return forced[i] ||
                   (!agents_[i].arrived && actions[i].direction != Direction::wait && hold_until_[i] <= t);
        };
        for (std::size_t i = 0; i < n; ++i) moving[i] = free_to_move(i);

        for (const auto& c : conflicts) {
            for (auto id : c.contenders) contended[static_cast<std::size_t>(id)] = true;
            // Scheduled pushes go first; everyone they touch waits.
            if (has_forced(c)) {
                for (auto id : c.contenders) moving[static_cast<std::size_t>(id)] = forced[static_cast<std::size_t>(id)];
                continue;
            }
            ActiveOrdering* shared = ordering_of(c.contenders.front());
            const bool reuse = shared != nullptr && std::all_of(c.contenders.begin(), c.contenders.end(),
                                                                [&](AgentId id) { return shared->has(id); });
            if (!reuse) {
                // Fresh auction over the new contenders plus anyone still queued on the same cells.
                std::vector<AgentId> ids = c.contenders;
                for (const auto& o : orderings_) {
                    const bool linked =
                        std::any_of(c.contenders.begin(), c.contenders.end(), [&](AgentId id) { return o.has(id); }) ||
                        std::find(c.cells.begin(), c.cells.end(), o.cell) != c.cells.end();
                    if (!linked) continue;
                    for (auto m : o.members) {
                        if (hold_until_[static_cast<std::size_t>(m)] > t) ids.push_back(m);
                    }
                }
                order(ids, t, c.cell, ConflictKind::crossing, 0);
                shared = ordering_of(c.contenders.front());
            }
            // Only the earliest released turn among the contenders passes this tick.
            AgentId winner = -1;
            int best = 0;
            for (auto id : c.contenders) {
                const auto i = static_cast<std::size_t>(id);
                if (hold_until_[i] > t) continue;
                const int q = shared->turn_of(id);
                if (winner < 0 || q < best) {
                    winner = id;
                    best = q;
                }
            }
            for (auto id : c.contenders) moving[static_cast<std::size_t>(id)] = (id == winner);
        }
        // A fresh ordering may have released a held agent whose own move is unopposed.
        for (std::size_t i = 0; i < n; ++i) {
            if (!contended[i]) moving[i] = free_to_move(i);
        }

        std::vector<bool> yielded(forced);
        resolve_deadlocks(t, actions, moving, yielded);

        execute(t, actions, moving, yielded);
    }

    // Turns this tick's scheduled pushes into forced unit moves. A push whose
    // target has been taken cancels the rest of its chain.
    void apply_pushes(Tick t, std::vector<MoveAction>& actions, std::vector<bool>& forced) {
        std::unordered_set<Cell, CellHash> occ;
        for (const auto& a : agents_) {
            if (!a.arrived) occ.insert(a.pos);
        }
        std::set<int> cancelled;
        for (const auto& p : pushes_) {
            if (p.at != t || cancelled.contains(p.chain)) continue;
            const auto i = static_cast<std::size_t>(p.agent);
            if (agents_[i].arrived || agents_[i].pos != p.from || occ.contains(p.target)) {
                cancelled.insert(p.chain);
                continue;
            }
            actions[i] = {toward(agents_[i].pos, p.target), 1};
            forced[i] = true;
        }
        std::erase_if(pushes_, [&](const Push& p) { return p.at <= t || cancelled.contains(p.chain); });
    }

    // Agents with no free descending cell whose blockers (transitively) cannot
    // move either are deadlocked. An ordering is run over each such group and
    // the winner's blocker is pushed toward the nearest free cell, one agent
    // per tick along the chain of occupied cells in between.
    void resolve_deadlocks(Tick t, std::vector<MoveAction>& actions, std::vector<bool>& moving,
                           std::vector<bool>& yielded) {
        const auto n = agents_.size();
        std::unordered_map<Cell, AgentId, CellHash> occ;
        for (const auto& a : agents_) {
            if (!a.arrived) occ.emplace(a.pos, a.id);
        }

        std::vector<std::vector<AgentId>> waits_for(n);
        std::vector<bool> blocked(n, false);
        std::vector<bool> live(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = agents_[i];
            if (a.arrived) continue;
            if (moving[i] || actions[i].direction != Direction::wait || hold_until_[i] > t) {
                live[i] = true;
                continue;
            }
            const int here = potentials_[i].at(a.pos);
            bool tabu_only = false;
            for (auto d : kMoves) {
                const Cell c = offset(a.pos, d);
                if (!grid_.is_free(c) || potentials_[i].at(c) != here - 1) continue;
                if (const auto it = occ.find(c); it != occ.end()) {
                    waits_for[i].push_back(it->second);
                } else {
                    tabu_only = true;
                }
            }
            if (tabu_only || waits_for[i].empty()) {
                live[i] = true;
            } else {
                blocked[i] = true;
            }
        }
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (!blocked[i] || live[i]) continue;
                for (auto b : waits_for[i]) {
                    if (live[static_cast<std::size_t>(b)]) {
                        live[i] = true;
                        changed = true;
                        break;
                    }
                }
            }
        }

        Dsu dsu(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!blocked[i] || live[i]) continue;
            any = true;
            for (auto b : waits_for[i]) dsu.unite(i, static_cast<std::size_t>(b));
        }
        if (!any) return;

        std::map<std::size_t, std::vector<AgentId>> groups;
        for (std::size_t i = 0; i < n; ++i) {
            if (blocked[i] && !live[i]) groups[dsu.find(i)].push_back(static_cast<AgentId>(i));
        }

        std::unordered_set<Cell, CellHash> claimed;
        for (std::size_t i = 0; i < n; ++i) {
            if (!moving[i]) continue;
            for (const auto& c : action_sweep(agents_[i], actions[i])) claimed.insert(c);
        }
        std::vector<bool> locked(moving);  // agents that may not join a new chain
        for (const auto& p : pushes_) locked[static_cast<std::size_t>(p.agent)] = true;

        for (const auto& [root, members] : groups) {
            const Cell at = agents_[static_cast<std::size_t>(members.front())].pos;
            const auto ordering = order(members, t, at, ConflictKind::deadlock, 1);
            // Earlier deadlock winners keep precedence until they arrive, so
            // neighbouring groups cannot undo each other's pushes.
            std::vector<AgentId> candidates;
            for (int q = 1; q <= static_cast<int>(members.size()); ++q) candidates.push_back(ordering.agent_in_turn(q));
            std::stable_sort(candidates.begin(), candidates.end(), [&](AgentId x, AgentId y) {
                return precedes(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
            });
            // Chains that clear the way (the blocker ends up beside the
            // beneficiary, not further along its route) are tried first. Later
            // passes ignore precedence: an earlier winner that is stuck itself
            // (say, it pushed someone into a dead end) must give way.
            for (const auto [strict, aside] : {std::pair{true, true}, std::pair{false, true}, std::pair{true, false},
                                               std::pair{false, false}}) {
                bool done = false;
                for (const AgentId who : candidates) {
                    const auto w = static_cast<std::size_t>(who);
                    for (auto blocker : waits_for[w]) {
                        const Cell start = agents_[static_cast<std::size_t>(blocker)].pos;
                        auto chain = push_chain(start, who, t, occ, claimed, locked, strict, aside);
                        if (chain.empty()) continue;
                        trace_.conflicts.back().cell = start;
                        if (!strict) {
                            for (const auto& c : chain) {
                                if (const auto it = occ.find(c); it != occ.end()) priority_[static_cast<std::size_t>(it->second)] = 0;
                            }
                            priority_[w] = 0;
                        }
                        schedule_chain(chain, who, members, t, occ, claimed, locked, actions, moving, yielded);
                        if (priority_[w] == 0) priority_[w] = next_priority_++;
                        done = true;
                        break;
                    }
                    if (done) break;
                }
                if (done) break;
            }
        }
    }

    // True when x won a deadlock before y did (or y never has).
    bool precedes(std::size_t x, std::size_t y) const {
        return priority_[x] != 0 && (priority_[y] == 0 || priority_[x] < priority_[y]);
    }

    // Shortest run of pushable occupied cells from `start` ending in a free,
    // unclaimed cell; with `aside`, only cells no closer to the beneficiary's
    // goal than the beneficiary itself count. Empty when there is none.
    std::vector<Cell> push_chain(Cell start, AgentId beneficiary, Tick t,
                                 const std::unordered_map<Cell, AgentId, CellHash>& occ,
                                 const std::unordered_set<Cell, CellHash>& claimed,
                                 const std::vector<bool>& locked, bool strict, bool aside) const {
        const auto& pot = potentials_[static_cast<std::size_t>(beneficiary)];
        const int level = pot.at(agents_[static_cast<std::size_t>(beneficiary)].pos);
        auto pushable = [&](Cell c) {
            const auto it = occ.find(c);
            if (it == occ.end() || it->second == beneficiary) return false;
            const auto x = static_cast<std::size_t>(it->second);
            if (strict && precedes(x, static_cast<std::size_t>(beneficiary))) return false;
            return !locked[x] && !claimed.contains(c);
        };
        if (!pushable(start)) return {};
        std::unordered_map<Cell, Cell, CellHash> parent;
        std::queue<Cell> frontier;
        parent.emplace(start, start);
        frontier.push(start);
        while (!frontier.empty()) {
            const Cell c = frontier.front();
            frontier.pop();
            const AgentId here = occ.at(c);
            for (const auto& nb : grid_.free_neighbors(c)) {
                if (parent.contains(nb)) continue;
                if (!occ.contains(nb)) {
                    if (claimed.contains(nb) || is_tabu(here, nb, t)) continue;
                    if (aside && pot.at(nb) < level) continue;
                    std::vector<Cell> path{nb};
                    for (Cell k = c;; k = parent.at(k)) {
                        path.push_back(k);
                        if (k == start) break;
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (!pushable(nb)) continue;
                parent.emplace(nb, c);
                frontier.push(nb);
            }
        }
        return {};
    }

    // The agent next to the free end moves now; each one behind it follows a tick later.
    void schedule_chain(const std::vector<Cell>& chain, AgentId beneficiary, const std::vector<AgentId>& group, Tick t,
                        const std::unordered_map<Cell, AgentId, CellHash>& occ,
                        std::unordered_set<Cell, CellHash>& claimed, std::vector<bool>& locked,
                        std::vector<MoveAction>& actions, std::vector<bool>& moving, std::vector<bool>& yielded) {
        const int m = static_cast<int>(chain.size()) - 1;
        const int id = next_chain_++;
        for (int j = 0; j < m; ++j) {
            const Cell from = chain[static_cast<std::size_t>(m - 1 - j)];
            const Cell to = chain[static_cast<std::size_t>(m - j)];
            const auto x = static_cast<std::size_t>(occ.at(from));
            locked[x] = true;
            claimed.insert(from);
            claimed.insert(to);
            tabu_[x].push_back({from, t + j + 1 + opt_.yield_tabu_ticks});
            hold_until_[x] = std::max(hold_until_[x], t + j);
            if (j == 0) {
                actions[x] = {toward(from, to), 1};
                moving[x] = true;
                yielded[x] = true;
            } else {
                pushes_.push_back({static_cast<AgentId>(x), from, to, t + j, id});
                pinned_until_[x] = t + j;
            }
        }
        for (auto g : group) {
            const auto k = static_cast<std::size_t>(g);
            if (!locked[k]) hold_until_[k] = std::max(hold_until_[k], t + m);
        }
        hold_until_[static_cast<std::size_t>(beneficiary)] = t + m;
    }

    void execute(Tick t, const std::vector<MoveAction>& actions, const std::vector<bool>& moving,
                 const std::vector<bool>& yielded) {
        const auto n = agents_.size();
        std::vector<std::pair<AgentId, std::vector<Cell>>> sweeps;
        for (std::size_t i = 0; i < n; ++i) {
            if (agents_[i].arrived) continue;
            const MoveAction act = moving[i] ? actions[i] : MoveAction::wait();
            sweeps.emplace_back(agents_[i].id, action_sweep(agents_[i], act));
        }
        for (const auto& c : find_collisions(t, sweeps)) trace_.collisions.push_back(c);

        for (std::size_t i = 0; i < n; ++i) {
            auto& a = agents_[i];
            if (a.arrived) continue;
            const MoveAction act = moving[i] ? actions[i] : MoveAction::wait();
            const Cell from = a.pos;
            a.pos = apply_action(a, act, grid_);
            trace_.steps.push_back({t, a.id, from, a.pos, act, act.direction == Direction::wait, yielded[i]});
            if (a.pos == a.goal) {
                a.arrived = true;
                a.arrival_time = t + 1;
                priority_[i] = 0;
                trace_.arrival[i] = t + 1;
            }
        }

        // Orderings retire once every member has been released or has arrived.
        std::erase_if(orderings_, [&](const ActiveOrdering& o) {
            return std::all_of(o.members.begin(), o.members.end(), [&](AgentId m) {
                const auto k = static_cast<std::size_t>(m);
                return agents_[k].arrived || hold_until_[k] <= t + 1;
            });
        });
        for (std::size_t i = 0; i < n; ++i) {
            if (!ordering_of(static_cast<AgentId>(i))) in_conflict_[i] = false;
            std::erase_if(tabu_[i], [&](const Tabu& x) { return x.until <= t + 1; });
        }
        record_configuration();
    }

    GridWorld grid_;
    std::vector<AgentState> agents_;
    std::vector<PotentialMap> potentials_;
    const ConflictResolver& resolver_;
    TrialOptions opt_;
    std::mt19937_64 rng_;

    std::vector<Tick> hold_until_;
    std::vector<Tick> pinned_until_;  // chain members wait for their scheduled push
    std::vector<Tick> arrival_;
    std::vector<bool> in_conflict_;
    std::vector<std::vector<Tabu>> tabu_;
    std::vector<ActiveOrdering> orderings_;
    std::vector<Push> pushes_;
    int next_chain_ = 0;
    std::vector<long> priority_;  // 0, or the order in which the agent first won a deadlock
    long next_priority_ = 1;
    SimulationTrace trace_;
};

}  // namespace

TrialRun run_trial(const Scenario& scenario, ResolverKind resolver, const TrialOptions& options) {
    if (options.tick_limit < 0) throw std::invalid_argument("tick_limit must be >= 1");
    const auto r = make_resolver(resolver, options.schedule);
    const auto start = std::chrono::steady_clock::now();
    Simulation sim(scenario, *r, options);
    TrialRun run;
    run.trace = sim.run();
    run.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return run;
}

}  // namespace amapf
