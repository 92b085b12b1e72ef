#pragma once

#include <filesystem>
#include <string>

#include "amapf/world.hpp"

namespace amapf {

// JSON layout:
//   {"kind": "doorway", "width": 10, "height": 10, "gap_size": 1, "seed": 7,
//    "obstacles": [[r, c], ...]   or   "map": ["..#..", ...],
//    "agents": [{"start": [r, c], "goal": [r, c], "incentive": 3}, ...]}
std::string scenario_to_json(const Scenario& scenario, int indent = 2);
Scenario scenario_from_json(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// ASCII rendering: '#' obstacle, '.' free, agent starts as A..Z and goals as a..z
/// (agents past the alphabet render as '@' and '*').
std::string render_ascii(const Scenario& scenario);

}  // namespace amapf
