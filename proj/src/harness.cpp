#include "amapf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "amapf/cbs.hpp"
#include "amapf/planner.hpp"

namespace amapf {

std::optional<Solver> parse_solver(std::string_view s) {
    if (parse_resolver_kind(s) || parse_cbs_variant(s)) return Solver{std::string(s)};
    return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) { return static_cast<int>(to_long(key, v)); }

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::vector<int> parse_range(const std::string& v) {
    const auto dots = v.find("..");
    if (dots == std::string::npos) {
        std::vector<int> out;
        for (const auto& x : split_list(v)) out.push_back(to_int("range", x));
        return out;
    }
    const int lo = to_int("range", trim(v.substr(0, dots)));
    std::string rest = v.substr(dots + 2);
    int step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
        step = to_int("range", trim(rest.substr(colon + 1)));
        rest = rest.substr(0, colon);
    }
    const int hi = to_int("range", trim(rest));
    if (step < 1) throw ConfigError("range: step must be >= 1");
    if (hi < lo) throw ConfigError("range: upper bound below lower bound");
    std::vector<int> out;
    for (int x = lo; x <= hi; x += step) out.push_back(x);
    return out;
}

}  // namespace

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "kinds" || key == "kind") {
        c.kinds.clear();
        for (const auto& k : split_list(v)) {
            const auto kind = parse_scenario_kind(k);
            if (!kind || *kind == ScenarioKind::custom) throw ConfigError("kinds: unknown scenario kind '" + k + "'");
            c.kinds.push_back(*kind);
        }
    } else if (key == "width") {
        c.width = to_int(key, v);
    } else if (key == "height") {
        c.height = to_int(key, v);
    } else if (key == "sweep") {
        const auto g = parse_group_by(v);
        if (!g) throw ConfigError("sweep: expected n_agents, gap_size or n_obstacles");
        c.sweep = *g;
    } else if (key == "range") {
        c.range = parse_range(v);
    } else if (key == "n_agents") {
        c.n_agents = to_int(key, v);
    } else if (key == "gap_size") {
        c.gap_size = to_int(key, v);
    } else if (key == "n_obstacles") {
        c.n_obstacles = to_int(key, v);
    } else if (key == "incentive_min") {
        c.incentives.min = to_int(key, v);
    } else if (key == "incentive_max") {
        c.incentives.max = to_int(key, v);
    } else if (key == "trials") {
        c.trials = to_int(key, v);
    } else if (key == "solvers") {
        c.solvers.clear();
        for (const auto& s : split_list(v)) {
            const auto solver = parse_solver(s);
            if (!solver) throw ConfigError("solvers: unknown solver '" + s + "'");
            c.solvers.push_back(*solver);
        }
    } else if (key == "noise_sigma") {
        c.noise_sigma = to_double(key, v);
    } else if (key == "timeout") {
        c.timeout_s = to_double(key, v);
    } else if (key == "seed") {
        const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), c.seed);
        if (ec != std::errc{} || end != v.data() + v.size() || v.empty()) {
            throw ConfigError("seed: expected a non-negative integer, got '" + v + "'");
        }
    } else if (key == "output") {
        c.output = v;
    } else if (key == "tick_limit") {
        c.tick_limit = to_int(key, v);
    } else if (key == "jobs") {
        c.jobs = to_int(key, v);
    } else if (key == "schedule") {
        const auto s = parse_schedule_kind(v);
        if (!s) throw ConfigError("schedule: expected harmonic or offset");
        c.schedule = *s;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void validate_config(const ExperimentConfig& c) {
    if (c.kinds.empty()) throw ConfigError("kinds: at least one scenario kind required");
    if (c.range.empty()) throw ConfigError("range: sweep range is empty");
    if (c.trials < 1) throw ConfigError("trials must be >= 1");
    if (c.solvers.empty()) throw ConfigError("solvers: at least one solver required");
    if (!(c.timeout_s > 0)) throw ConfigError("timeout must be > 0");
    if (c.noise_sigma < 0) throw ConfigError("noise_sigma must be >= 0");
    if (c.width < 1 || c.height < 1) throw ConfigError("width and height must be >= 1");
    if (c.incentives.min < 1 || c.incentives.max < c.incentives.min) {
        throw ConfigError("incentive range must satisfy 1 <= incentive_min <= incentive_max");
    }
    if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (c.tick_limit < 0) throw ConfigError("tick_limit must be >= 0");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    c.output = default_output_dir();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string() + ": file not found");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("AMAPF_OUTPUT_DIR"); env && *env) return env;
    return "results";
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::string_view label, int point, int index) {
    std::uint64_t h = splitmix(base);
    h = splitmix(h ^ fnv1a(label));
    h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(point)));
    return splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(index)));
}

ScenarioParams scenario_params(const ExperimentConfig& c, ScenarioKind kind, int point, int index) {
    ScenarioParams p;
    p.kind = kind;
    p.width = c.width;
    p.height = c.height;
    p.n_agents = c.n_agents;
    p.gap_size = c.gap_size;
    p.n_obstacles = c.n_obstacles;
    switch (c.sweep) {
        case GroupBy::n_agents: p.n_agents = point; break;
        case GroupBy::gap_size: p.gap_size = point; break;
        case GroupBy::n_obstacles: p.n_obstacles = point; break;
    }
    p.incentives = c.incentives;
    // Every solver sees the same scenario for a given (kind, point, index).
    p.seed = mix_seed(c.seed, to_string(kind), point, index);
    return p;
}

std::optional<TrialRecord> run_one(const ExperimentConfig& c, const Solver& solver, ScenarioKind kind, int point,
                                   int index) {
    Scenario scenario;
    try {
        scenario = make_scenario(scenario_params(c, kind, point, index));
    } catch (const ScenarioError&) {
        return std::nullopt;
    }
    const auto seed = mix_seed(c.seed, solver.name + "/" + std::string(to_string(kind)), point, index);
    TrialRun run;
    if (solver.is_cbs()) {
        CbsOptions o;
        o.noise_sigma = c.noise_sigma;
        o.variant = *parse_cbs_variant(solver.name);
        o.seed = seed;
        o.timeout_s = c.timeout_s;
        run = run_cbs_trial(scenario, o);
    } else {
        TrialOptions o;
        o.tick_limit = c.tick_limit;
        o.timeout_s = c.timeout_s;
        o.seed = seed;
        o.schedule = c.schedule;
        run = run_trial(scenario, *parse_resolver_kind(solver.name), o);
    }
    return score_trial(run.trace, scenario, run.runtime_s, solver.name);
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
    validate_config(c);
    struct Task {
        const Solver* solver;
        ScenarioKind kind;
        int point;
        int index;
    };
    std::vector<Task> tasks;
    for (auto kind : c.kinds) {
        for (int point : c.range) {
            for (const auto& s : c.solvers) {
                for (int i = 0; i < c.trials; ++i) tasks.push_back({&s, kind, point, i});
            }
        }
    }
    std::vector<std::optional<TrialRecord>> slots(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            const auto& t = tasks[i];
            slots[i] = run_one(c, *t.solver, t.kind, t.point, t.index);
        }
    };
    const auto jobs = static_cast<std::size_t>(std::max(1, c.jobs));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < std::min(jobs, tasks.size()); ++j) pool.emplace_back(worker);
    }

    ExperimentResult r;
    for (auto& s : slots) {
        if (s) {
            r.records.push_back(std::move(*s));
        } else {
            ++r.construction_failures;
        }
    }
    if (!r.records.empty()) r.aggregates = aggregate(r.records, c.sweep);
    return r;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
}

}  // namespace

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    {
        auto out = open_for_write(dir / "trials.csv");
        write_trials_csv(out, result.records);
        if (!out) throw IoError("failed writing trials.csv");
    }
    {
        auto out = open_for_write(dir / "aggregates.csv");
        write_aggregates_csv(out, result.aggregates);
        if (!out) throw IoError("failed writing aggregates.csv");
    }
}

std::vector<UtilityRow> sweep_utility(const ExperimentConfig& c, int index) {
    validate_config(c);
    const auto scenario = make_scenario(scenario_params(c, c.kinds.front(), c.range.front(), index));
    if (scenario.agents.size() < 2) throw ConfigError("sweep-utility needs at least two agents");

    std::vector<auction::Bid<double>> truthful;
    for (const auto& a : scenario.agents) truthful.push_back({a.id, static_cast<double>(a.incentive), 0});
    const auto k = truthful.size();
    const auto schedule = auction::RewardSchedule<double>::harmonic(k);
    std::vector<double> grid;
    for (int h = 0; h <= 4 * c.incentives.max; ++h) grid.push_back(0.5 * h);

    std::vector<UtilityRow> rows;
    for (std::size_t i = 0; i < k; ++i) {
        const auto curve = auction::sweep_utilities<double>(truthful, i, grid, schedule);
        for (const auto& p : curve) rows.push_back({truthful[i].agent, truthful[i].amount, p.bid, p.utility});
    }
    return rows;
}

void write_utility_curves(std::ostream& out, const std::vector<UtilityRow>& rows) {
    out << "agent_id,true_value,bid,utility\n";
    for (const auto& r : rows) {
        out << r.agent_id << ',' << format_number(r.true_value) << ',' << format_number(r.bid) << ','
            << format_number(r.utility) << '\n';
    }
}

}  // namespace amapf
