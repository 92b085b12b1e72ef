#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "amapf/world.hpp"

namespace amapf {

enum class ResolverKind { auction, random_ordering, fifo };

std::string_view to_string(ResolverKind k);
std::optional<ResolverKind> parse_resolver_kind(std::string_view s);

/// Turn reward sequence used inside a conflict.
enum class ScheduleKind {
    harmonic,  // alpha_q = 1/q
    offset,    // alpha_q = 1/(d + q - 1), d = leader's remaining distance
};

std::string_view to_string(ScheduleKind k);
std::optional<ScheduleKind> parse_schedule_kind(std::string_view s);

struct Contender {
    AgentId agent = 0;
    int incentive = 1;
    Tick arrival = 0;   // tick the agent joined the conflict
    int remaining = 1;  // potential at the agent's current cell
};

/// Outcome of one conflict resolution; all vectors are parallel to `contenders`.
struct TurnOrdering {
    std::vector<AgentId> contenders;
    std::vector<int> turns;  // 1-based permutation
    std::vector<double> bids;
    std::vector<double> payments;
    std::vector<double> utilities;
    double welfare = 0.0;

    int turn_of(AgentId a) const;
    AgentId agent_in_turn(int q) const;
};

class ConflictResolver {
public:
    virtual ~ConflictResolver() = default;
    virtual ResolverKind kind() const = 0;
    virtual TurnOrdering resolve(const std::vector<Contender>& contenders, std::mt19937_64& rng) const = 0;
};

/// Truthful bids (bid = incentive) through the payment/allocation auction.
class AuctionResolver final : public ConflictResolver {
public:
    explicit AuctionResolver(ScheduleKind schedule = ScheduleKind::harmonic) : schedule_(schedule) {}
    ResolverKind kind() const override { return ResolverKind::auction; }
    TurnOrdering resolve(const std::vector<Contender>& contenders, std::mt19937_64& rng) const override;

private:
    ScheduleKind schedule_;
};

/// Uniformly random permutation; no payments.
class RandomOrderingResolver final : public ConflictResolver {
public:
    explicit RandomOrderingResolver(ScheduleKind schedule = ScheduleKind::harmonic) : schedule_(schedule) {}
    ResolverKind kind() const override { return ResolverKind::random_ordering; }
    TurnOrdering resolve(const std::vector<Contender>& contenders, std::mt19937_64& rng) const override;

private:
    ScheduleKind schedule_;
};

/// First-in first-out by conflict-arrival tick, then id; no payments.
class FifoResolver final : public ConflictResolver {
public:
    explicit FifoResolver(ScheduleKind schedule = ScheduleKind::harmonic) : schedule_(schedule) {}
    ResolverKind kind() const override { return ResolverKind::fifo; }
    TurnOrdering resolve(const std::vector<Contender>& contenders, std::mt19937_64& rng) const override;

private:
    ScheduleKind schedule_;
};

std::unique_ptr<ConflictResolver> make_resolver(ResolverKind kind, ScheduleKind schedule = ScheduleKind::harmonic);

}  // namespace amapf
