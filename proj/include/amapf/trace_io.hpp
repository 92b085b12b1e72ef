#pragma once

#include <ostream>

#include "amapf/planner.hpp"

namespace amapf {

// Per-agent step log: tick,agent,row,col,action,waiting
// row/col is the agent's cell after the tick; action is "wait" or "<dir>:<cells>".
void write_trace_log(std::ostream& out, const SimulationTrace& trace);

// One row per resolved conflict: tick,cell,contenders,bids,sigma,payments,utilities
// Lists are space separated and parallel to the contender list.
void write_auction_log(std::ostream& out, const SimulationTrace& trace);

std::string format_action(const MoveAction& action);

}  // namespace amapf
