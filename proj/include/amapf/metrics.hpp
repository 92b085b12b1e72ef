#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "amapf/planner.hpp"
#include "amapf/world.hpp"

namespace amapf {

struct TrialRecord {
    std::string solver;
    ScenarioKind kind = ScenarioKind::custom;
    int n_agents = 0;
    int gap_size = 0;
    int n_obstacles = 0;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    bool completed = false;
    bool timed_out = false;
    int collisions = 0;
    std::vector<std::optional<Tick>> time_to_goal;
    long soc = 0;            // sum of t_g over arrived agents
    long weighted_soc = 0;   // sum of v * t_g over arrived agents
    double welfare = 0.0;    // sum of v / t_g over arrived agents
    std::vector<double> utilities;  // per agent, summed over the conflicts it took part in
    double total_payments = 0.0;
};

TrialRecord score_trial(const SimulationTrace& trace, const Scenario& scenario, double runtime_s,
                        const std::string& solver = {});

enum class GroupBy { n_agents, gap_size, n_obstacles };

std::string_view to_string(GroupBy g);
std::optional<GroupBy> parse_group_by(std::string_view s);

struct Stat {
    double mean = 0.0;
    double std = 0.0;   // sample (n - 1); 0 for a single record
    double ci95 = 0.0;  // 1.96 * std / sqrt(n)
};

/// Metric columns in output order.
inline const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names{"runtime_s", "completed", "collisions",
                                                "soc",       "weighted_soc", "welfare"};
    return names;
}

struct AggregateRecord {
    std::string solver;
    ScenarioKind kind = ScenarioKind::custom;
    GroupBy group_by = GroupBy::n_agents;
    int key = 0;
    std::size_t trials = 0;
    std::map<std::string, Stat> stats;
};

Stat summarize(const std::vector<double>& xs);

/// One row per (solver, kind, key), sorted in that order. Throws on empty input.
std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& records, GroupBy group_by);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records, bool with_runtime = true);
void write_aggregates_csv(std::ostream& out, const std::vector<AggregateRecord>& rows);

/// Ten significant digits, as used in every CSV.
std::string format_number(double x);

}  // namespace amapf
