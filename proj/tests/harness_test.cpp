#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "amapf/harness.hpp"

using namespace amapf;

namespace {

// Reference mixing built from the published splitmix64 and FNV-1a constants.
std::uint64_t ref_splitmix(std::uint64_t state) {
    std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t ref_fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

std::string trials_without_runtime(const ExperimentResult& r) {
    std::ostringstream out;
    write_trials_csv(out, r.records, false);
    return out.str();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("amapf_harness_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, ParsesEveryKey) {
    const auto c = parse_config(R"(
# sample
kinds = doorway, hallway   # two kinds
width = 12
height = 8
sweep = gap_size
range = 1..9:2
n_agents = 6
n_obstacles = 3
incentive_min = 2
incentive_max = 5
trials = 7
solvers = auction, fifo, cbs-random
noise_sigma = 0.5
timeout = 2.5
seed = 42
output = out/dir
tick_limit = 99
jobs = 3
schedule = offset
)");
    EXPECT_EQ(c.kinds, (std::vector<ScenarioKind>{ScenarioKind::doorway, ScenarioKind::hallway}));
    EXPECT_EQ(c.width, 12);
    EXPECT_EQ(c.height, 8);
    EXPECT_EQ(c.sweep, GroupBy::gap_size);
    EXPECT_EQ(c.range, (std::vector<int>{1, 3, 5, 7, 9}));
    EXPECT_EQ(c.n_agents, 6);
    EXPECT_EQ(c.n_obstacles, 3);
    EXPECT_EQ(c.incentives.min, 2);
    EXPECT_EQ(c.incentives.max, 5);
    EXPECT_EQ(c.trials, 7);
    ASSERT_EQ(c.solvers.size(), 3u);
    EXPECT_EQ(c.solvers[2].name, "cbs-random");
    EXPECT_TRUE(c.solvers[2].is_cbs());
    EXPECT_FALSE(c.solvers[1].is_cbs());
    EXPECT_DOUBLE_EQ(c.noise_sigma, 0.5);
    EXPECT_DOUBLE_EQ(c.timeout_s, 2.5);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.output, std::filesystem::path("out/dir"));
    EXPECT_EQ(c.tick_limit, 99);
    EXPECT_EQ(c.jobs, 3);
    EXPECT_EQ(c.schedule, ScheduleKind::offset);
}

TEST(Config, Defaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.trials, 100);
    EXPECT_DOUBLE_EQ(c.timeout_s, 20.0);
    EXPECT_EQ(c.solvers.size(), 1u);
}

TEST(Config, RangeForms) {
    ExperimentConfig c;
    set_config_value(c, "range", "4, 10, 20, 50");
    EXPECT_EQ(c.range, (std::vector<int>{4, 10, 20, 50}));
    set_config_value(c, "range", "4..8");
    EXPECT_EQ(c.range, (std::vector<int>{4, 5, 6, 7, 8}));
    set_config_value(c, "range", "10..25:5");
    EXPECT_EQ(c.range, (std::vector<int>{10, 15, 20, 25}));
    EXPECT_THROW(set_config_value(c, "range", "4..8:0"), ConfigError);
    EXPECT_THROW(set_config_value(c, "range", "8..4"), ConfigError);
    EXPECT_THROW(set_config_value(c, "range", "a..b"), ConfigError);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config("colour = blue"), ConfigError);
    EXPECT_THROW(parse_config("width 10"), ConfigError);
    EXPECT_THROW(parse_config("width = ten"), ConfigError);
    EXPECT_THROW(parse_config("trials = 0"), ConfigError);
    EXPECT_THROW(parse_config("timeout = 0"), ConfigError);
    EXPECT_THROW(parse_config("solvers = astar"), ConfigError);
    EXPECT_THROW(parse_config("kinds = maze"), ConfigError);
    EXPECT_THROW(parse_config("sweep = width"), ConfigError);
    EXPECT_THROW(parse_config("incentive_min = 4\nincentive_max = 2"), ConfigError);
    EXPECT_THROW(parse_config("seed = -1"), ConfigError);
    EXPECT_THROW(parse_config("jobs = 0"), ConfigError);
}

TEST(Config, MissingFile) {
    try {
        load_config("definitely/not/here.cfg");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("file not found"), std::string::npos);
    }
}

TEST(Config, OutputDirFromEnvironment) {
    ::setenv("AMAPF_OUTPUT_DIR", "/tmp/elsewhere", 1);
    EXPECT_EQ(default_output_dir(), std::filesystem::path("/tmp/elsewhere"));
    ::unsetenv("AMAPF_OUTPUT_DIR");
    EXPECT_EQ(default_output_dir(), std::filesystem::path("results"));
}

TEST(MixSeed, MatchesReferenceAndSeparates) {
    // Published first outputs of the reference generators.
    EXPECT_EQ(ref_splitmix(0), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(ref_fnv1a("a"), 0xaf63dc4c8601ec8cULL);

    for (std::uint64_t base : {0ULL, 1ULL, 123456789ULL}) {
        for (const std::string label : {"intersection", "auction/doorway"}) {
            for (int point : {1, 50}) {
                for (int index : {0, 99}) {
                    std::uint64_t h = ref_splitmix(base);
                    h = ref_splitmix(h ^ ref_fnv1a(label));
                    h = ref_splitmix(h ^ static_cast<std::uint32_t>(point));
                    h = ref_splitmix(h ^ static_cast<std::uint32_t>(index));
                    EXPECT_EQ(mix_seed(base, label, point, index), h);
                }
            }
        }
    }
    EXPECT_NE(mix_seed(0, "doorway", 4, 0), mix_seed(0, "doorway", 4, 1));
    EXPECT_NE(mix_seed(0, "doorway", 4, 0), mix_seed(0, "hallway", 4, 0));
    EXPECT_NE(mix_seed(0, "doorway", 4, 0), mix_seed(1, "doorway", 4, 0));
}

TEST(ScenarioParams, SweepVariableAndSharedScenario) {
    ExperimentConfig c;
    c.sweep = GroupBy::n_obstacles;
    c.n_agents = 7;
    const auto p = scenario_params(c, ScenarioKind::random_obstacles, 15, 3);
    EXPECT_EQ(p.n_obstacles, 15);
    EXPECT_EQ(p.n_agents, 7);
    EXPECT_EQ(p.seed, scenario_params(c, ScenarioKind::random_obstacles, 15, 3).seed);
    EXPECT_NE(p.seed, scenario_params(c, ScenarioKind::random_obstacles, 15, 4).seed);
}

TEST(RunExperiment, DeterministicAcrossRunsAndJobs) {
    // Kept small enough that no trial gets near the timeout: a timed-out
    // trial depends on wall-clock time and would break the comparison.
    auto c = parse_config(R"(
kinds = doorway, intersection
sweep = n_agents
range = 3, 6
gap_size = 2
trials = 5
solvers = auction, random-ordering, fifo
seed = 3
)");
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    c.jobs = 3;
    const auto d = run_experiment(c);
    EXPECT_EQ(a.records.size(), 2u * 2u * 3u * 5u);
    EXPECT_EQ(trials_without_runtime(a), trials_without_runtime(b));
    EXPECT_EQ(trials_without_runtime(a), trials_without_runtime(d));
    for (const auto& r : a.records) EXPECT_EQ(r.collisions, 0);
    EXPECT_EQ(a.aggregates.size(), 2u * 2u * 3u);

    auto cbs = parse_config("kinds = intersection\nrange = 3\ngap_size = 2\ntrials = 4\nsolvers = cbs, cbs-random\n");
    const auto x = run_experiment(cbs);
    cbs.jobs = 2;
    const auto y = run_experiment(cbs);
    for (const auto& r : x.records) EXPECT_FALSE(r.timed_out);
    EXPECT_EQ(trials_without_runtime(x), trials_without_runtime(y));
}

TEST(RunExperiment, TrialsCsvByteIdentical) {
    auto c = parse_config("kinds = hallway\nrange = 6\ntrials = 1\nseed = 11\n");
    const auto d1 = scratch("one");
    const auto d2 = scratch("two");
    write_experiment(run_experiment(c), d1);
    write_experiment(run_experiment(c), d2);
    // Drop the runtime column before comparing.
    auto strip = [](const std::string& text) {
        std::istringstream in(text);
        std::string line;
        std::string out;
        while (std::getline(in, line)) {
            std::vector<std::string> cols;
            std::stringstream ls(line);
            for (std::string f; std::getline(ls, f, ',');) cols.push_back(f);
            cols.erase(cols.begin() + 6);
            for (const auto& f : cols) out += f + ",";
            out += "\n";
        }
        return out;
    };
    const auto t1 = slurp(d1 / "trials.csv");
    EXPECT_FALSE(t1.empty());
    EXPECT_EQ(strip(t1), strip(slurp(d2 / "trials.csv")));
    EXPECT_TRUE(std::filesystem::exists(d1 / "aggregates.csv"));
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
}

TEST(RunExperiment, ConstructionFailuresAreCounted) {
    // 200 agents do not fit in a 10x10 doorway map.
    const auto c = parse_config("kinds = doorway\nrange = 4, 200\ntrials = 3\n");
    const auto r = run_experiment(c);
    EXPECT_EQ(r.construction_failures, 3);
    EXPECT_EQ(r.records.size(), 3u);
    ASSERT_EQ(r.aggregates.size(), 1u);
    EXPECT_EQ(r.aggregates[0].trials, 3u);
}

TEST(RunExperiment, UnwritableOutput) {
    const auto file = scratch("blocker");
    std::ofstream(file) << "x";
    const auto c = parse_config("range = 4\ntrials = 1\n");
    EXPECT_THROW(write_experiment(run_experiment(c), file / "sub"), IoError);
    std::filesystem::remove_all(file);
}

TEST(SweepUtility, PeaksAtTrueValue) {
    const auto c = parse_config("kinds = hallway\ngap_size = 1\nrange = 4\nincentive_max = 3\n");
    for (int index = 0; index < 5; ++index) {
        const auto rows = sweep_utility(c, index);
        std::map<AgentId, std::vector<UtilityRow>> by_agent;
        for (const auto& r : rows) by_agent[r.agent_id].push_back(r);
        ASSERT_EQ(by_agent.size(), 4u);
        for (const auto& [agent, curve] : by_agent) {
            EXPECT_EQ(curve.size(), 13u);  // bids 0, 0.5, ..., 6
            double truthful = -1e9;
            double best = -1e9;
            for (const auto& r : curve) {
                best = std::max(best, r.utility);
                if (r.bid == r.true_value) truthful = r.utility;
            }
            EXPECT_NEAR(truthful, best, 1e-12) << "agent " << agent;
        }
    }
    std::ostringstream out;
    write_utility_curves(out, sweep_utility(c));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "agent_id,true_value,bid,utility");
}
