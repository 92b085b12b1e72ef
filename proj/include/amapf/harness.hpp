#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "amapf/auction.hpp"
#include "amapf/metrics.hpp"
#include "amapf/resolver.hpp"
#include "amapf/world.hpp"

namespace amapf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// "auction", "random-ordering", "fifo", "cbs" or "cbs-random".
struct Solver {
    std::string name;
    bool is_cbs() const { return name == "cbs" || name == "cbs-random"; }
};

std::optional<Solver> parse_solver(std::string_view s);

// Flat "key = value" text, one key per line, '#' starts a comment:
//
//   kinds        = intersection, doorway
//   width        = 10
//   height       = 10
//   sweep        = n_agents          # or gap_size, n_obstacles
//   range        = 4..50:2           # or a list: 4, 10, 20, 50
//   trials       = 100
//   solvers      = auction, random-ordering, cbs
//   ...
struct ExperimentConfig {
    std::vector<ScenarioKind> kinds{ScenarioKind::intersection};
    int width = 10;
    int height = 10;
    GroupBy sweep = GroupBy::n_agents;
    std::vector<int> range{4};
    int n_agents = 4;
    int gap_size = 1;
    int n_obstacles = 10;
    IncentiveRange incentives;
    int trials = 100;
    std::vector<Solver> solvers{{"auction"}};
    double noise_sigma = 0.3;
    double timeout_s = 20.0;
    std::uint64_t seed = 0;
    std::filesystem::path output = "results";
    int tick_limit = 0;  // 0: default per scenario
    int jobs = 1;
    ScheduleKind schedule = ScheduleKind::harmonic;
};

/// Applies one "key = value" assignment; throws ConfigError.
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Throws ConfigError on a bad key, value or invariant.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);

/// Default output directory: $AMAPF_OUTPUT_DIR, else "results".
std::filesystem::path default_output_dir();

/// Stable 64-bit seed mixing (splitmix64 over FNV-1a of string parts).
std::uint64_t mix_seed(std::uint64_t base, std::string_view label, int point, int index);

ScenarioParams scenario_params(const ExperimentConfig& config, ScenarioKind kind, int point, int index);

/// One trial of one solver; nullopt when the scenario cannot be built.
std::optional<TrialRecord> run_one(const ExperimentConfig& config, const Solver& solver, ScenarioKind kind, int point,
                                   int index);

struct ExperimentResult {
    std::vector<TrialRecord> records;  // ordered by (kind, point, solver, index)
    std::vector<AggregateRecord> aggregates;
    int construction_failures = 0;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes trials.csv and aggregates.csv; throws IoError.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir);

struct UtilityRow {
    AgentId agent_id = 0;
    double true_value = 0;
    double bid = 0;
    double utility = 0;
};

/// Utility-vs-bid curves for every agent of one generated scenario (first
/// kind, first sweep point, trial `index`), treated as one conflict; bids run
/// over [0, 2 * incentive_max] in steps of 0.5.
std::vector<UtilityRow> sweep_utility(const ExperimentConfig& config, int index = 0);
void write_utility_curves(std::ostream& out, const std::vector<UtilityRow>& rows);

}  // namespace amapf
