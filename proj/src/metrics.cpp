#include "amapf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <tuple>

namespace amapf {

TrialRecord score_trial(const SimulationTrace& trace, const Scenario& scenario, double runtime_s,
                        const std::string& solver) {
    TrialRecord r;
    r.solver = solver;
    r.kind = scenario.kind;
    r.n_agents = static_cast<int>(scenario.agents.size());
    r.gap_size = scenario.gap_size;
    r.n_obstacles = static_cast<int>(scenario.n_obstacles());
    r.seed = scenario.rng_seed;
    r.runtime_s = runtime_s;
    r.collisions = static_cast<int>(trace.collisions.size());
    r.timed_out = trace.timed_out;
    r.time_to_goal = trace.arrival;
    r.time_to_goal.resize(scenario.agents.size());
    r.completed = trace.complete;
    r.utilities.assign(scenario.agents.size(), 0.0);

    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
        const auto& tg = r.time_to_goal[i];
        if (!tg) {
            r.completed = false;
            continue;
        }
        const int v = scenario.agents[i].incentive;
        r.soc += *tg;
        r.weighted_soc += static_cast<long>(v) * *tg;
        if (*tg > 0) r.welfare += static_cast<double>(v) / *tg;
    }
    for (const auto& c : trace.conflicts) {
        const auto& o = c.ordering;
        for (std::size_t k = 0; k < o.contenders.size(); ++k) {
            const auto a = static_cast<std::size_t>(o.contenders[k]);
            if (a < r.utilities.size()) r.utilities[a] += o.utilities[k];
            r.total_payments += o.payments[k];
        }
    }
    return r;
}

std::string_view to_string(GroupBy g) {
    switch (g) {
        case GroupBy::n_agents: return "n_agents";
        case GroupBy::gap_size: return "gap_size";
        case GroupBy::n_obstacles: return "n_obstacles";
    }
    return "?";
}

std::optional<GroupBy> parse_group_by(std::string_view s) {
    for (auto g : {GroupBy::n_agents, GroupBy::gap_size, GroupBy::n_obstacles}) {
        if (s == to_string(g)) return g;
    }
    return std::nullopt;
}

Stat summarize(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("summarize: no values");
    Stat s;
    const auto n = static_cast<double>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (n - 1));
        s.ci95 = 1.96 * s.std / std::sqrt(n);
    }
    return s;
}

namespace {

int key_of(const TrialRecord& r, GroupBy g) {
    switch (g) {
        case GroupBy::n_agents: return r.n_agents;
        case GroupBy::gap_size: return r.gap_size;
        case GroupBy::n_obstacles: return r.n_obstacles;
    }
    return 0;
}

double metric(const TrialRecord& r, const std::string& name) {
    if (name == "runtime_s") return r.runtime_s;
    if (name == "completed") return r.completed ? 1.0 : 0.0;
    if (name == "collisions") return r.collisions;
    if (name == "soc") return static_cast<double>(r.soc);
    if (name == "weighted_soc") return static_cast<double>(r.weighted_soc);
    if (name == "welfare") return r.welfare;
    throw std::invalid_argument("unknown metric " + name);
}

}  // namespace

std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& records, GroupBy group_by) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        groups[{r.solver, std::string(to_string(r.kind)), key_of(r, group_by)}].push_back(&r);
    }
    std::vector<AggregateRecord> out;
    for (const auto& [key, members] : groups) {
        AggregateRecord a;
        a.solver = std::get<0>(key);
        a.kind = members.front()->kind;
        a.group_by = group_by;
        a.key = std::get<2>(key);
        a.trials = members.size();
        for (const auto& name : metric_names()) {
            std::vector<double> xs;
            for (const auto* r : members) xs.push_back(metric(*r, name));
            a.stats[name] = summarize(xs);
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records, bool with_runtime) {
    out << "solver,kind,n_agents,gap_size,n_obstacles,seed," << (with_runtime ? "runtime_s," : "")
        << "completed,collisions,soc,weighted_soc,welfare\n";
    for (const auto& r : records) {
        out << r.solver << ',' << to_string(r.kind) << ',' << r.n_agents << ',' << r.gap_size << ',' << r.n_obstacles
            << ',' << r.seed << ',';
        if (with_runtime) out << format_number(r.runtime_s) << ',';
        out << (r.completed ? 1 : 0) << ',' << r.collisions << ',' << r.soc << ',' << r.weighted_soc << ','
            << format_number(r.welfare) << '\n';
    }
}

void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRecord>& rows) {
    const std::string group = rows.empty() ? "n_agents" : std::string(to_string(rows.front().group_by));
    out << "solver,kind," << group << ",trials";
    for (const auto& m : metric_names()) out << ',' << m << "_mean," << m << "_std," << m << "_ci95";
    out << '\n';
    for (const auto& r : rows) {
        out << r.solver << ',' << to_string(r.kind) << ',' << r.key << ',' << r.trials;
        for (const auto& m : metric_names()) {
            const auto& s = r.stats.at(m);
            out << ',' << format_number(s.mean) << ',' << format_number(s.std) << ',' << format_number(s.ci95);
        }
        out << '\n';
    }
}

}  // namespace amapf
