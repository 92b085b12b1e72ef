#include "amapf/resolver.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "amapf/auction.hpp"

namespace amapf {

std::string_view to_string(ResolverKind k) {
    switch (k) {
        case ResolverKind::auction: return "auction";
        case ResolverKind::random_ordering: return "random-ordering";
        case ResolverKind::fifo: return "fifo";
    }
    return "?";
}

std::optional<ResolverKind> parse_resolver_kind(std::string_view s) {
    for (auto k : {ResolverKind::auction, ResolverKind::random_ordering, ResolverKind::fifo}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

std::string_view to_string(ScheduleKind k) {
    return k == ScheduleKind::harmonic ? "harmonic" : "offset";
}

std::optional<ScheduleKind> parse_schedule_kind(std::string_view s) {
    if (s == "harmonic") return ScheduleKind::harmonic;
    if (s == "offset") return ScheduleKind::offset;
    return std::nullopt;
}

int TurnOrdering::turn_of(AgentId a) const {
    for (std::size_t i = 0; i < contenders.size(); ++i) {
        if (contenders[i] == a) return turns[i];
    }
    throw std::out_of_range("agent " + std::to_string(a) + " is not a contender");
}

AgentId TurnOrdering::agent_in_turn(int q) const {
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (turns[i] == q) return contenders[i];
    }
    throw std::out_of_range("no contender in turn " + std::to_string(q));
}

namespace {

auction::RewardSchedule<double> schedule_for(ScheduleKind kind, const std::vector<Contender>& c,
                                             const std::vector<std::size_t>& order) {
    if (kind == ScheduleKind::harmonic) return auction::RewardSchedule<double>::harmonic(c.size());
    const int lead = std::max(1, c[order.front()].remaining);
    return auction::RewardSchedule<double>::offset_harmonic(c.size(), lead);
}

// Fills turns/payments/utilities for an externally chosen order with no payments.
TurnOrdering unpaid(const std::vector<Contender>& c, const std::vector<std::size_t>& order, ScheduleKind kind) {
    TurnOrdering out;
    const auto schedule = schedule_for(kind, c, order);
    out.turns.resize(c.size());
    for (std::size_t q = 0; q < order.size(); ++q) out.turns[order[q]] = static_cast<int>(q + 1);
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double gain = c[i].incentive * schedule.alpha(static_cast<std::size_t>(out.turns[i]));
        out.contenders.push_back(c[i].agent);
        out.bids.push_back(0.0);
        out.payments.push_back(0.0);
        out.utilities.push_back(gain);
        out.welfare += gain;
    }
    return out;
}

void require_contenders(const std::vector<Contender>& c) {
    if (c.empty()) throw std::invalid_argument("conflict without contenders");
}

}  // namespace

TurnOrdering AuctionResolver::resolve(const std::vector<Contender>& c, std::mt19937_64&) const {
    require_contenders(c);
    std::vector<auction::Bid<double>> bids;
    std::vector<double> values;
    for (const auto& x : c) {
        bids.push_back({x.agent, static_cast<double>(x.incentive), x.arrival});
        values.push_back(static_cast<double>(x.incentive));
    }
    const auto order = auction::bid_order<double>(bids);
    const auto schedule = schedule_for(schedule_, c, order);

    TurnOrdering out;
    for (const auto& x : c) out.contenders.push_back(x.agent);
    out.bids = values;
    if (c.size() == 1) {
        out.turns = {1};
        out.payments = {0.0};
        out.utilities = {values[0] * schedule.alpha(1)};
        out.welfare = out.utilities[0];
        return out;
    }
    const auto outcome = auction::run_auction<double>(bids, values, schedule);
    out.turns = outcome.turns;
    out.payments = outcome.payments;
    out.utilities = outcome.utilities;
    out.welfare = outcome.welfare;
    return out;
}

TurnOrdering RandomOrderingResolver::resolve(const std::vector<Contender>& c, std::mt19937_64& rng) const {
    require_contenders(c);
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    return unpaid(c, order, schedule_);
}

TurnOrdering FifoResolver::resolve(const std::vector<Contender>& c, std::mt19937_64&) const {
    require_contenders(c);
    std::vector<std::size_t> order(c.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (c[a].arrival != c[b].arrival) return c[a].arrival < c[b].arrival;
        return c[a].agent < c[b].agent;
    });
    return unpaid(c, order, schedule_);
}

std::unique_ptr<ConflictResolver> make_resolver(ResolverKind kind, ScheduleKind schedule) {
    switch (kind) {
        case ResolverKind::auction: return std::make_unique<AuctionResolver>(schedule);
        case ResolverKind::random_ordering: return std::make_unique<RandomOrderingResolver>(schedule);
        case ResolverKind::fifo: return std::make_unique<FifoResolver>(schedule);
    }
    throw std::invalid_argument("unknown resolver");
}

}  // namespace amapf
