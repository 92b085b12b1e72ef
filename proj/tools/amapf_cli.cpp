// amapf: command-line front end for the simulator, the auction and the
// experiment harness.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "amapf/auction.hpp"
#include "amapf/cbs.hpp"
#include "amapf/harness.hpp"
#include "amapf/metrics.hpp"
#include "amapf/planner.hpp"
#include "amapf/scenario_io.hpp"
#include "amapf/trace_io.hpp"

using namespace amapf;

namespace {

constexpr int kConfigExit = 2;
constexpr int kIoExit = 3;

struct ScenarioArgs {
    std::string source = "doorway";  // kind name or a .json file
    int width = 10;
    int height = 10;
    int agents = 4;
    int gap = 1;
    int obstacles = 10;
    int incentive_min = 1;
    int incentive_max = 3;
    std::uint64_t seed = 0;
};

void add_scenario_flags(CLI::App* app, ScenarioArgs& a) {
    app->add_option("source", a.source, "Scenario kind (doorway, hallway, intersection, random-obstacles) or JSON file");
    app->add_option("--width", a.width);
    app->add_option("--height", a.height);
    app->add_option("--agents", a.agents);
    app->add_option("--gap", a.gap);
    app->add_option("--obstacles", a.obstacles);
    app->add_option("--incentive-min", a.incentive_min);
    app->add_option("--incentive-max", a.incentive_max);
    app->add_option("--seed", a.seed);
}

Scenario build_scenario(const ScenarioArgs& a) {
    if (const auto kind = parse_scenario_kind(a.source); kind && *kind != ScenarioKind::custom) {
        ScenarioParams p;
        p.kind = *kind;
        p.width = a.width;
        p.height = a.height;
        p.n_agents = a.agents;
        p.gap_size = a.gap;
        p.n_obstacles = a.obstacles;
        p.incentives = {a.incentive_min, a.incentive_max};
        p.seed = a.seed;
        return make_scenario(p);
    }
    return load_scenario(a.source);
}

std::vector<auction::Rational> parse_list(const std::string& csv) {
    std::vector<auction::Rational> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(auction::parse_rational(item));
    return out;
}

template <class T, class F>
std::string bracket(const std::vector<T>& xs, F fmt) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
    return s + "]";
}

int auction_demo(const std::string& bids_text, const std::string& values_text, const std::string& schedule_text,
                 int offset) {
    using auction::Rational;
    const auto bids_in = parse_list(bids_text);
    const auto values = values_text.empty() ? bids_in : parse_list(values_text);
    if (values.size() != bids_in.size()) throw ConfigError("--values needs one entry per bid");
    std::vector<auction::Bid<Rational>> bids;
    for (std::size_t i = 0; i < bids_in.size(); ++i) bids.push_back({static_cast<AgentId>(i), bids_in[i], 0});

    const auto kind = parse_schedule_kind(schedule_text);
    if (!kind) throw ConfigError("--schedule: expected harmonic or offset");
    const auto schedule = *kind == ScheduleKind::harmonic
                              ? auction::RewardSchedule<Rational>::harmonic(bids.size())
                              : auction::RewardSchedule<Rational>::offset_harmonic(bids.size(), offset);
    const auto out = auction::run_auction<Rational>(bids, values, schedule);
    auto rs = [](const Rational& r) { return auction::to_string(r); };
    std::cout << "sigma=" << bracket(out.turns, [](int q) { return std::to_string(q); }) << '\n';
    std::cout << "payments=" << bracket(out.payments, rs) << '\n';
    std::cout << "utilities=" << bracket(out.utilities, rs) << '\n';
    std::cout << "welfare=" << rs(out.welfare) << '\n';
    return 0;
}

int simulate(const ScenarioArgs& a, const std::string& solver_name, const std::string& trace_path,
             const std::string& auction_path, double sigma, double timeout) {
    const auto scenario = build_scenario(a);
    const auto solver = parse_solver(solver_name);
    if (!solver) throw ConfigError("unknown solver '" + solver_name + "'");
    TrialRun run;
    if (solver->is_cbs()) {
        run = run_cbs_trial(scenario, {sigma, *parse_cbs_variant(solver->name), a.seed, timeout});
    } else {
        TrialOptions o;
        o.seed = a.seed;
        o.timeout_s = timeout;
        run = run_trial(scenario, *parse_resolver_kind(solver->name), o);
    }
    const auto rec = score_trial(run.trace, scenario, run.runtime_s, solver->name);
    std::cout << render_ascii(scenario);
    std::cout << "ticks=" << run.trace.ticks << " completed=" << rec.completed << " collisions=" << rec.collisions
              << " conflicts=" << run.trace.conflicts.size() << " soc=" << rec.soc
              << " weighted_soc=" << rec.weighted_soc << " welfare=" << format_number(rec.welfare)
              << " runtime_s=" << format_number(run.runtime_s) << '\n';
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw IoError("cannot write " + trace_path);
        write_trace_log(out, run.trace);
    }
    if (!auction_path.empty()) {
        std::ofstream out(auction_path);
        if (!out) throw IoError("cannot write " + auction_path);
        write_auction_log(out, run.trace);
    }
    return 0;
}

struct Overrides {
    std::vector<std::string> sets;
    std::optional<int> trials;
    std::optional<int> jobs;
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
};

void add_override_flags(CLI::App* app, Overrides& o) {
    app->add_option("--set", o.sets, "Override a config key, e.g. --set trials=5");
    app->add_option("--trials", o.trials);
    app->add_option("--jobs", o.jobs);
    app->add_option("--output", o.output);
    app->add_option("--seed", o.seed);
}

ExperimentConfig load_with_overrides(const std::string& path, const Overrides& o) {
    auto c = load_config(path);
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        set_config_value(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.trials) c.trials = *o.trials;
    if (o.jobs) c.jobs = *o.jobs;
    if (o.output) c.output = *o.output;
    if (o.seed) c.seed = *o.seed;
    validate_config(c);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid multi-agent path finding with auction-based conflict resolution"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    auto* run = app.add_subcommand("run", "Run an experiment config and write trials.csv / aggregates.csv");
    run->add_option("config", config_path)->required();
    add_override_flags(run, overrides);

    auto* scenario = app.add_subcommand("scenario", "Generate or display scenarios");
    scenario->require_subcommand(1);
    ScenarioArgs sargs;
    std::string json_out;
    auto* gen = scenario->add_subcommand("gen", "Write a generated scenario as JSON");
    add_scenario_flags(gen, sargs);
    gen->add_option("-o,--out", json_out, "Output file (stdout when omitted)");
    auto* show = scenario->add_subcommand("show", "Print a scenario as ASCII");
    add_scenario_flags(show, sargs);
    bool map_only = false;
    show->add_flag("--map-only", map_only, "Print obstacles only, without agents");

    auto* auction_cmd = app.add_subcommand("auction", "Auction utilities");
    auction_cmd->require_subcommand(1);
    std::string bids;
    std::string values;
    std::string schedule = "harmonic";
    int offset = 1;
    auto* demo = auction_cmd->add_subcommand("demo", "Resolve one conflict and print sigma, payments, utilities");
    demo->add_option("--bids", bids, "Comma separated bids, e.g. 7,4,2 or 7/2,3")->required();
    demo->add_option("--values", values, "True values (default: the bids)");
    demo->add_option("--schedule", schedule, "harmonic or offset");
    demo->add_option("--offset", offset, "Offset d for the offset schedule");

    std::string sweep_config;
    Overrides sweep_overrides;
    auto* sweep = app.add_subcommand("sweep-utility", "Write utility_curves.csv for one conflict");
    sweep->add_option("config", sweep_config)->required();
    add_override_flags(sweep, sweep_overrides);

    ScenarioArgs sim_args;
    std::string solver = "auction";
    std::string trace_path;
    std::string auction_path;
    double sigma = 0.3;
    double timeout = 20.0;
    auto* sim = app.add_subcommand("simulate", "Run one trial and optionally export its logs");
    add_scenario_flags(sim, sim_args);
    sim->add_option("--solver", solver);
    sim->add_option("--trace", trace_path, "Per-tick agent log (CSV)");
    sim->add_option("--auction-log", auction_path, "Per-conflict auction log (CSV)");
    sim->add_option("--sigma", sigma, "Edge-cost noise for CBS solvers");
    sim->add_option("--timeout", timeout);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigExit;
    }

    try {
        if (*run) {
            const auto c = load_with_overrides(config_path, overrides);
            const auto result = run_experiment(c);
            write_experiment(result, c.output);
            std::cout << "wrote " << result.records.size() << " trials to " << c.output.string();
            if (result.construction_failures) std::cout << " (" << result.construction_failures << " skipped)";
            std::cout << '\n';
        } else if (*gen) {
            const auto s = build_scenario(sargs);
            if (json_out.empty()) {
                std::cout << scenario_to_json(s) << '\n';
            } else {
                save_scenario(s, json_out);
            }
        } else if (*show) {
            const auto s = build_scenario(sargs);
            if (map_only) {
                for (const auto& row : s.grid.to_ascii()) std::cout << row << '\n';
            } else {
                std::cout << render_ascii(s);
            }
        } else if (*demo) {
            return auction_demo(bids, values, schedule, offset);
        } else if (*sweep) {
            const auto c = load_with_overrides(sweep_config, sweep_overrides);
            const auto rows = sweep_utility(c);
            std::filesystem::create_directories(c.output);
            const auto path = c.output / "utility_curves.csv";
            std::ofstream out(path);
            if (!out) throw IoError("cannot write " + path.string());
            write_utility_curves(out, rows);
            std::cout << "wrote " << path.string() << '\n';
        } else if (*sim) {
            return simulate(sim_args, solver, trace_path, auction_path, sigma, timeout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kConfigExit;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfigExit;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoExit;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoExit;
    }
    return 0;
}
