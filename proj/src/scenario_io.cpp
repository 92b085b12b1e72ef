#include "amapf/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace amapf {

using nlohmann::json;

namespace {

json cell_json(Cell c) { return json::array({c.row, c.col}); }

Cell cell_from(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw ScenarioError(std::string(what) + " must be a [row, col] pair");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string scenario_to_json(const Scenario& s, int indent) {
    json j;
    j["kind"] = std::string(to_string(s.kind));
    j["width"] = s.grid.width();
    j["height"] = s.grid.height();
    j["gap_size"] = s.gap_size;
    j["seed"] = s.rng_seed;
    json obstacles = json::array();
    for (const auto& c : s.grid.obstacles()) obstacles.push_back(cell_json(c));
    j["obstacles"] = std::move(obstacles);
    json agents = json::array();
    for (const auto& a : s.agents) {
        agents.push_back({{"start", cell_json(a.pos)}, {"goal", cell_json(a.goal)}, {"incentive", a.incentive}});
    }
    j["agents"] = std::move(agents);
    return j.dump(indent);
}

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("malformed scenario: ") + e.what());
    }
    try {
        Scenario s;
        const auto kind_name = j.value("kind", std::string("custom"));
        const auto kind = parse_scenario_kind(kind_name);
        if (!kind) throw ScenarioError("unknown scenario kind '" + kind_name + "'");
        s.kind = *kind;
        s.gap_size = j.value("gap_size", 0);
        s.rng_seed = j.value("seed", std::uint64_t{0});
        if (j.contains("map")) {
            s.grid = GridWorld::from_ascii(j.at("map").get<std::vector<std::string>>());
        } else {
            std::vector<Cell> obstacles;
            for (const auto& o : j.value("obstacles", json::array())) obstacles.push_back(cell_from(o, "obstacle"));
            s.grid = GridWorld(j.at("width").get<int>(), j.at("height").get<int>(), obstacles);
        }
        AgentId id = 0;
        for (const auto& a : j.at("agents")) {
            AgentState st;
            st.id = id++;
            st.pos = cell_from(a.at("start"), "start");
            st.goal = cell_from(a.at("goal"), "goal");
            st.incentive = a.value("incentive", 1);
            s.agents.push_back(st);
        }
        validate_scenario(s);
        return s;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("invalid scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file " + path.string());
    out << scenario_to_json(scenario) << '\n';
}

std::string render_ascii(const Scenario& s) {
    auto rows = s.grid.to_ascii();
    for (const auto& a : s.agents) {
        const bool lettered = a.id < 26;
        rows[static_cast<std::size_t>(a.goal.row)][static_cast<std::size_t>(a.goal.col)] =
            lettered ? static_cast<char>('a' + a.id) : '*';
    }
    for (const auto& a : s.agents) {
        const bool lettered = a.id < 26;
        rows[static_cast<std::size_t>(a.pos.row)][static_cast<std::size_t>(a.pos.col)] =
            lettered ? static_cast<char>('A' + a.id) : '@';
    }
    std::string out;
    for (const auto& r : rows) {
        out += r;
        out += '\n';
    }
    return out;
}

}  // namespace amapf
