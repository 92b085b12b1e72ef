#include "amapf/trace_io.hpp"

#include <cstdio>
#include <string>

namespace amapf {

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ' ';
        s += fmt(xs[i]);
    }
    return s;
}

}  // namespace

std::string format_action(const MoveAction& action) {
    if (action.direction == Direction::wait) return "wait";
    return std::string(to_string(action.direction)) + ":" + std::to_string(action.step);
}

void write_trace_log(std::ostream& out, const SimulationTrace& trace) {
    out << "tick,agent,row,col,action,waiting\n";
    for (const auto& s : trace.steps) {
        out << s.tick << ',' << s.agent << ',' << s.to.row << ',' << s.to.col << ',' << format_action(s.action) << ','
            << (s.waiting ? 1 : 0) << '\n';
    }
}

void write_auction_log(std::ostream& out, const SimulationTrace& trace) {
    out << "tick,cell,contenders,bids,sigma,payments,utilities\n";
    auto itos = [](int v) { return std::to_string(v); };
    for (const auto& c : trace.conflicts) {
        const auto& o = c.ordering;
        out << c.tick << ',' << c.cell.row << ' ' << c.cell.col << ',' << join(o.contenders, itos) << ','
            << join(o.bids, num) << ',' << join(o.turns, itos) << ',' << join(o.payments, num) << ','
            << join(o.utilities, num) << '\n';
    }
}

}  // namespace amapf
