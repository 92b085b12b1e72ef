#include "amapf/cbs.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace amapf {

std::string_view to_string(CbsVariant v) { return v == CbsVariant::cbs ? "cbs" : "cbs-random"; }

std::optional<CbsVariant> parse_cbs_variant(std::string_view s) {
    if (s == "cbs") return CbsVariant::cbs;
    if (s == "cbs-random") return CbsVariant::cbs_random;
    return std::nullopt;
}

constexpr double kMinEdgeWeight = 0.01;

EdgeCosts::EdgeCosts(const GridWorld& grid)
    : width_(grid.width()), right_(grid.cell_count(), 1.0), down_(grid.cell_count(), 1.0), min_(1.0) {}

EdgeCosts EdgeCosts::sample(const GridWorld& grid, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
    EdgeCosts out(grid);
    if (sigma == 0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    out.min_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
        const Cell c = grid.cell_at(i);
        if (!grid.is_free(c)) continue;
        if (grid.is_free(offset(c, Direction::right))) {
            out.right_[i] = std::max(kMinEdgeWeight, 1.0 + noise(rng));
            out.min_ = std::min(out.min_, out.right_[i]);
        }
        if (grid.is_free(offset(c, Direction::down))) {
            out.down_[i] = std::max(kMinEdgeWeight, 1.0 + noise(rng));
            out.min_ = std::min(out.min_, out.down_[i]);
        }
    }
    if (!std::isfinite(out.min_)) out.min_ = 1.0;
    return out;
}

double EdgeCosts::cost(Cell a, Cell b) const {
    if (a == b) return 1.0;
    const Cell lo = std::min(a, b);
    const Cell hi = std::max(a, b);
    const auto i = static_cast<std::size_t>(lo.row * width_ + lo.col);
    if (hi.row == lo.row && hi.col == lo.col + 1) return right_[i];
    if (hi.col == lo.col && hi.row == lo.row + 1) return down_[i];
    throw std::invalid_argument("cells are not adjacent");
}

double path_cost(const Path& path, const EdgeCosts& costs) {
    double c = 0.0;
    for (std::size_t t = 1; t < path.size(); ++t) c += costs.cost(path[t - 1], path[t]);
    return c;
}

namespace {

struct SearchTimeout {};

using Clock = std::chrono::steady_clock;

struct Deadline {
    Clock::time_point end;
    bool passed() const { return Clock::now() >= end; }
};

std::uint64_t vkey(std::size_t cell, Tick t) { return (static_cast<std::uint64_t>(t) << 32) | cell; }
std::uint64_t ekey(std::size_t from, std::size_t to, Tick t) {
    return (static_cast<std::uint64_t>(t) << 40) ^ (static_cast<std::uint64_t>(from) << 20) ^ to;
}

std::optional<Path> search(const GridWorld& grid, const EdgeCosts& costs, AgentId agent, Cell start, Cell goal,
                           const ConstraintSet& cs, const Deadline* deadline) {
    if (!grid.is_free(start) || !grid.is_free(goal)) return std::nullopt;
    std::unordered_set<std::uint64_t> vbanned;
    std::unordered_set<std::uint64_t> ebanned;
    Tick last = 0;
    for (const auto& v : cs.vertex) {
        if (v.agent != agent) continue;
        vbanned.insert(vkey(grid.index(v.cell), v.time));
        last = std::max(last, v.time);
    }
    for (const auto& e : cs.edge) {
        if (e.agent != agent) continue;
        ebanned.insert(ekey(grid.index(e.from), grid.index(e.to), e.time));
        last = std::max(last, e.time + 1);
    }
    if (vbanned.contains(vkey(grid.index(start), 0))) return std::nullopt;

    // Heuristic: unit BFS distance scaled by the lightest edge.
    std::vector<int> dist(grid.cell_count(), -1);
    {
        std::queue<Cell> q;
        dist[grid.index(goal)] = 0;
        q.push(goal);
        while (!q.empty()) {
            const Cell c = q.front();
            q.pop();
            for (const auto& n : grid.free_neighbors(c)) {
                if (dist[grid.index(n)] < 0) {
                    dist[grid.index(n)] = dist[grid.index(c)] + 1;
                    q.push(n);
                }
            }
        }
    }
    if (dist[grid.index(start)] < 0) return std::nullopt;
    const double scale = std::min(1.0, costs.min_weight());
    const Tick horizon = last + static_cast<Tick>(grid.cell_count()) + 1;

    struct Entry {
        double f;
        double g;
        std::uint64_t seq;
        std::size_t cell;
        Tick t;
    };
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        return a.seq > b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
    std::unordered_map<std::uint64_t, double> best;
    std::unordered_map<std::uint64_t, std::uint64_t> parent;
    std::uint64_t seq = 0;

    const auto s = grid.index(start);
    best[vkey(s, 0)] = 0.0;
    open.push({dist[s] * scale, 0.0, seq++, s, 0});
    std::size_t popped = 0;
    while (!open.empty()) {
        const Entry e = open.top();
        open.pop();
        if (deadline && (++popped & 1023) == 0 && deadline->passed()) throw SearchTimeout{};
        const auto key = vkey(e.cell, e.t);
        if (e.g > best[key]) continue;
        const Cell c = grid.cell_at(e.cell);
        if (c == goal) {
            Path path;
            for (auto k = key;; k = parent.at(k)) {
                path.push_back(grid.cell_at(static_cast<std::size_t>(k & 0xffffffffu)));
                if ((k >> 32) == 0) break;
            }
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (e.t >= horizon) continue;
        std::vector<Cell> next = grid.free_neighbors(c);
        next.push_back(c);
        for (const auto& n : next) {
            const auto ni = grid.index(n);
            const Tick nt = e.t + 1;
            if (vbanned.contains(vkey(ni, nt)) || ebanned.contains(ekey(e.cell, ni, e.t))) continue;
            const double g = e.g + costs.cost(c, n);
            const auto nk = vkey(ni, nt);
            const auto it = best.find(nk);
            if (it != best.end() && it->second <= g) continue;
            best[nk] = g;
            parent[nk] = key;
            open.push({g + dist[ni] * scale, g, seq++, ni, nt});
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Path> plan_single(const GridWorld& grid, const EdgeCosts& costs, AgentId agent, Cell start, Cell goal,
                                const ConstraintSet& constraints) {
    return search(grid, costs, agent, start, goal, constraints, nullptr);
}

std::optional<PathConflict> first_conflict(const std::vector<Path>& paths) {
    std::size_t horizon = 0;
    for (const auto& p : paths) horizon = std::max(horizon, p.size());
    for (std::size_t t = 0; t + 1 < horizon; ++t) {
        for (std::size_t a = 0; a < paths.size(); ++a) {
            if (t + 1 >= paths[a].size()) continue;
            const Cell a0 = paths[a][t];
            const Cell a1 = paths[a][t + 1];
            for (std::size_t b = a + 1; b < paths.size(); ++b) {
                if (t + 1 >= paths[b].size()) continue;
                const Cell b0 = paths[b][t];
                const Cell b1 = paths[b][t + 1];
                PathConflict c{static_cast<Tick>(t), static_cast<AgentId>(a), static_cast<AgentId>(b)};
                if (a1 == b1) {
                    c.kind = PathConflict::vertex;
                    c.cell = a1;
                } else if (a0 == b1 && b0 == a1) {
                    c.kind = PathConflict::swap;
                    c.cell = a1;
                } else if (a1 == b0) {
                    c.kind = PathConflict::a_follows_b;
                    c.cell = b0;
                } else if (b1 == a0) {
                    c.kind = PathConflict::b_follows_a;
                    c.cell = a0;
                } else {
                    continue;
                }
                return c;
            }
        }
    }
    return std::nullopt;
}

namespace {

struct ConstraintLink {
    bool is_edge = false;
    VertexConstraint v;
    EdgeConstraint e;
    std::shared_ptr<const ConstraintLink> parent;
};

struct CtNode {
    std::shared_ptr<const ConstraintLink> constraints;
    std::vector<std::shared_ptr<const Path>> paths;
    std::vector<double> costs;
    double cost = 0.0;
};

ConstraintSet collect(const std::shared_ptr<const ConstraintLink>& head, AgentId agent) {
    ConstraintSet cs;
    for (auto* l = head.get(); l; l = l->parent.get()) {
        if (l->is_edge && l->e.agent == agent) cs.edge.push_back(l->e);
        if (!l->is_edge && l->v.agent == agent) cs.vertex.push_back(l->v);
    }
    return cs;
}

// The two branches that resolve `c`, one per agent.
std::pair<ConstraintLink, ConstraintLink> branches(const PathConflict& c, const std::vector<Path>& paths) {
    ConstraintLink ca;
    ConstraintLink cb;
    const auto a = static_cast<std::size_t>(c.a);
    const auto b = static_cast<std::size_t>(c.b);
    const auto t = static_cast<std::size_t>(c.time);
    switch (c.kind) {
        case PathConflict::vertex:
            ca.v = {c.a, c.cell, c.time + 1};
            cb.v = {c.b, c.cell, c.time + 1};
            break;
        case PathConflict::swap:
            ca.is_edge = cb.is_edge = true;
            ca.e = {c.a, paths[a][t], paths[a][t + 1], c.time};
            cb.e = {c.b, paths[b][t], paths[b][t + 1], c.time};
            break;
        case PathConflict::a_follows_b:
            ca.v = {c.a, c.cell, c.time + 1};
            cb.v = {c.b, c.cell, c.time};
            break;
        case PathConflict::b_follows_a:
            cb.v = {c.b, c.cell, c.time + 1};
            ca.v = {c.a, c.cell, c.time};
            break;
    }
    return {ca, cb};
}

std::vector<Path> materialize(const CtNode& n) {
    std::vector<Path> out;
    for (const auto& p : n.paths) out.push_back(*p);
    return out;
}

}  // namespace

CbsResult plan_cbs(const Scenario& scenario, const CbsOptions& options) {
    if (options.noise_sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (options.timeout_s <= 0) throw std::invalid_argument("timeout must be > 0");
    const auto start = Clock::now();
    const Deadline deadline{start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(options.timeout_s))};
    const auto& grid = scenario.grid;
    const auto costs = EdgeCosts::sample(grid, options.noise_sigma, options.seed);
    std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

    CbsResult result;
    auto finish = [&]() {
        result.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
        return result;
    };

    struct Queued {
        double cost;
        std::uint64_t tie;
        std::uint64_t seq;
        std::size_t node;
    };
    auto worse = [](const Queued& x, const Queued& y) {
        if (x.cost != y.cost) return x.cost > y.cost;
        if (x.tie != y.tie) return x.tie > y.tie;
        return x.seq > y.seq;
    };
    std::priority_queue<Queued, std::vector<Queued>, decltype(worse)> open(worse);
    std::vector<CtNode> nodes;
    std::uint64_t seq = 0;
    auto push = [&](CtNode n) {
        const auto tie = options.variant == CbsVariant::cbs_random ? rng() : 0;
        open.push({n.cost, tie, seq++, nodes.size()});
        nodes.push_back(std::move(n));
    };

    try {
        CtNode root;
        for (const auto& a : scenario.agents) {
            auto p = search(grid, costs, a.id, a.pos, a.goal, {}, &deadline);
            if (!p) return finish();
            root.costs.push_back(path_cost(*p, costs));
            root.cost += root.costs.back();
            root.paths.push_back(std::make_shared<const Path>(std::move(*p)));
        }
        push(std::move(root));

        while (!open.empty()) {
            if (deadline.passed()) throw SearchTimeout{};
            const auto q = open.top();
            open.pop();
            ++result.expanded;
            const CtNode node = nodes[q.node];
            const auto paths = materialize(node);
            const auto conflict = first_conflict(paths);
            if (!conflict) {
                result.paths = paths;
                result.cost = node.cost;
                return finish();
            }
            const auto [ca, cb] = branches(*conflict, paths);
            for (const auto& link : {ca, cb}) {
                const AgentId who = link.is_edge ? link.e.agent : link.v.agent;
                auto l = std::make_shared<ConstraintLink>(link);
                l->parent = node.constraints;
                CtNode child = node;
                child.constraints = l;
                const auto& agent = scenario.agents[static_cast<std::size_t>(who)];
                auto p = search(grid, costs, who, agent.pos, agent.goal, collect(child.constraints, who), &deadline);
                if (!p) continue;
                const auto i = static_cast<std::size_t>(who);
                child.cost -= child.costs[i];
                child.costs[i] = path_cost(*p, costs);
                child.cost += child.costs[i];
                child.paths[i] = std::make_shared<const Path>(std::move(*p));
                push(std::move(child));
            }
        }
    } catch (const SearchTimeout&) {
        result.timed_out = true;
        result.paths.reset();
    }
    return finish();
}

SimulationTrace execute_multihop(const std::vector<Path>& paths, const std::vector<int>& incentives) {
    if (paths.size() != incentives.size()) throw std::invalid_argument("one incentive per path");
    const auto n = paths.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (paths[i].empty()) throw std::invalid_argument("empty path");
        if (incentives[i] < 1) throw std::invalid_argument("incentive must be >= 1");
    }
    SimulationTrace trace;
    trace.arrival.assign(n, std::nullopt);
    std::vector<std::size_t> at(n, 0);
    auto arrived = [&](std::size_t i) { return at[i] + 1 >= paths[i].size(); };
    auto snapshot = [&]() {
        std::vector<Cell> cfg;
        for (std::size_t i = 0; i < n; ++i) cfg.push_back(paths[i][at[i]]);
        trace.configurations.push_back(std::move(cfg));
    };
    snapshot();
    for (std::size_t i = 0; i < n; ++i) {
        if (arrived(i)) trace.arrival[i] = 0;
    }

    Tick t = 0;
    for (;; ++t) {
        std::vector<std::pair<AgentId, std::vector<Cell>>> sweeps;
        std::vector<std::size_t> next(at);
        for (std::size_t i = 0; i < n; ++i) {
            if (arrived(i)) continue;
            next[i] = std::min(paths[i].size() - 1, at[i] + static_cast<std::size_t>(incentives[i]));
            std::vector<Cell> sweep(paths[i].begin() + static_cast<std::ptrdiff_t>(at[i]),
                                    paths[i].begin() + static_cast<std::ptrdiff_t>(next[i]) + 1);
            sweeps.emplace_back(static_cast<AgentId>(i), std::move(sweep));
        }
        if (sweeps.empty()) break;
        for (const auto& c : find_collisions(t, sweeps)) trace.collisions.push_back(c);
        for (const auto& [id, sweep] : sweeps) {
            const auto i = static_cast<std::size_t>(id);
            MoveAction act = MoveAction::wait();
            for (std::size_t k = 1; k < sweep.size(); ++k) {
                if (sweep[k] == sweep[k - 1]) continue;
                const Cell d{sweep[k].row - sweep[k - 1].row, sweep[k].col - sweep[k - 1].col};
                act.direction = d.row < 0 ? Direction::up : d.row > 0 ? Direction::down
                                : d.col < 0 ? Direction::left : Direction::right;
                act.step = static_cast<int>(next[i] - at[i]);
                break;
            }
            trace.steps.push_back({t, id, sweep.front(), sweep.back(), act, act.direction == Direction::wait, false});
            at[i] = next[i];
            if (arrived(i)) trace.arrival[i] = t + 1;
        }
        snapshot();
    }
    trace.ticks = t;
    trace.complete = true;
    return trace;
}

TrialRun run_cbs_trial(const Scenario& scenario, const CbsOptions& options) {
    const auto start = Clock::now();
    const auto plan = plan_cbs(scenario, options);
    TrialRun run;
    if (plan.paths) {
        std::vector<int> incentives;
        for (const auto& a : scenario.agents) incentives.push_back(a.incentive);
        run.trace = execute_multihop(*plan.paths, incentives);
    } else {
        std::vector<Cell> cfg;
        for (const auto& a : scenario.agents) cfg.push_back(a.pos);
        run.trace.configurations.push_back(std::move(cfg));
        run.trace.arrival.assign(scenario.agents.size(), std::nullopt);
        run.trace.timed_out = plan.timed_out;
    }
    run.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
    return run;
}

}  // namespace amapf
