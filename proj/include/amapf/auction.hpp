#pragma once

// Turn-order auction for agents contending over one cell.
//
// Allocation: contenders sorted by descending bid take turns 1..k.
// Payment of the turn-q agent (bids b sorted descending, rewards alpha):
//
//     h_q = sum_{j=q}^{k} b_{j+1} * (alpha_j - alpha_{j+1}),   b_{k+1} = alpha_{k+1} = 0
//
// Utility: v * alpha_q - h_q. With these rules bidding the true value is a
// dominant strategy and the allocation maximizes sum_i v_i * alpha_turn(i).
//
// Everything is templated on the scalar so the same code runs in double
// precision inside the simulator and in exact rationals in the tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "amapf/world.hpp"

namespace amapf::auction {

using Rational = boost::rational<std::int64_t>;

template <class Scalar>
struct Bid {
    AgentId agent = 0;
    Scalar amount{};
    Tick arrival = 0;  // tick the agent joined the conflict; earlier wins ties
};

/// Strictly decreasing positive per-turn rewards alpha_1 > alpha_2 > ... > 0.
template <class Scalar>
class RewardSchedule {
public:
    explicit RewardSchedule(std::vector<Scalar> alpha) : alpha_(std::move(alpha)) {
        if (alpha_.empty()) throw std::invalid_argument("reward schedule is empty");
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            if (!(alpha_[i] > Scalar(0))) throw std::invalid_argument("reward schedule must be positive");
            if (i > 0 && !(alpha_[i] < alpha_[i - 1])) {
                throw std::invalid_argument("reward schedule must be strictly decreasing");
            }
        }
    }

    /// alpha_q = 1 / q
    static RewardSchedule harmonic(std::size_t k) { return offset_harmonic(k, 1); }

    /// alpha_q = 1 / (d + q - 1); d is typically the leader's remaining distance.
    static RewardSchedule offset_harmonic(std::size_t k, std::int64_t d) {
        if (d < 1) throw std::invalid_argument("schedule offset must be >= 1");
        std::vector<Scalar> a;
        a.reserve(k);
        for (std::size_t q = 1; q <= k; ++q) a.push_back(Scalar(1) / Scalar(d + static_cast<std::int64_t>(q) - 1));
        return RewardSchedule(std::move(a));
    }

    std::size_t size() const noexcept { return alpha_.size(); }

    /// 1-based; alpha_{size+1} (and beyond) is 0.
    Scalar alpha(std::size_t q) const {
        if (q == 0) throw std::out_of_range("turn index is 1-based");
        return q <= alpha_.size() ? alpha_[q - 1] : Scalar(0);
    }

    const std::vector<Scalar>& values() const noexcept { return alpha_; }

private:
    std::vector<Scalar> alpha_;
};

template <class Scalar>
struct AuctionOutcome {
    std::vector<int> turns;          // turns[i] = sigma of input contender i, 1-based
    std::vector<std::size_t> order;  // input indices by turn
    std::vector<Scalar> payments;    // per input contender
    std::vector<Scalar> utilities;   // evaluated with true values
    Scalar welfare{};                // sum v_i * alpha_{turn(i)}
};

/// Input indices sorted by descending bid, then earlier arrival, then lower id.
template <class Scalar>
std::vector<std::size_t> bid_order(std::span<const Bid<Scalar>> bids) {
    std::vector<std::size_t> idx(bids.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = bids[a];
        const auto& y = bids[b];
        if (x.amount != y.amount) return x.amount > y.amount;
        if (x.arrival != y.arrival) return x.arrival < y.arrival;
        return x.agent < y.agent;
    });
    return idx;
}

/// Allocation rule: turns[i] is the rank of bid i.
template <class Scalar>
std::vector<int> allocate(std::span<const Bid<Scalar>> bids) {
    if (bids.empty()) throw std::invalid_argument("allocate: no bids");
    for (const auto& b : bids) {
        if (b.amount < Scalar(0)) throw std::invalid_argument("allocate: negative bid");
    }
    const auto order = bid_order(bids);
    std::vector<int> turns(bids.size());
    for (std::size_t q = 0; q < order.size(); ++q) turns[order[q]] = static_cast<int>(q + 1);
    return turns;
}

/// Payment rule for the agent in turn q given all bids sorted descending.
template <class Scalar>
Scalar payment(std::span<const Scalar> sorted_desc, std::size_t q, const RewardSchedule<Scalar>& schedule) {
    const std::size_t k = sorted_desc.size();
    if (q < 1 || q > k) {
        throw std::out_of_range("payment: turn " + std::to_string(q) + " outside [1, " + std::to_string(k) + "]");
    }
    if (schedule.size() < k) throw std::invalid_argument("payment: schedule shorter than the bid list");
    Scalar h(0);
    // The j = k term multiplies b_{k+1} = 0.
    for (std::size_t j = q; j < k; ++j) {
        h += sorted_desc[j] * (schedule.alpha(j) - schedule.alpha(j + 1));
    }
    return h;
}

template <class Scalar>
Scalar utility(const Scalar& value, std::size_t q, const Scalar& pay, const RewardSchedule<Scalar>& schedule) {
    return value * schedule.alpha(q) - pay;
}

/// Resolves one conflict. `values` are the contenders' true incentives (same
/// order as `bids`) and are only used to evaluate utilities and welfare.
template <class Scalar>
AuctionOutcome<Scalar> run_auction(std::span<const Bid<Scalar>> bids, std::span<const Scalar> values,
                                   const RewardSchedule<Scalar>& schedule) {
    if (bids.size() < 2) throw std::invalid_argument("run_auction: needs at least two contenders");
    if (values.size() != bids.size()) throw std::invalid_argument("run_auction: one true value per bid");

    AuctionOutcome<Scalar> out;
    out.order = bid_order(bids);
    out.turns = allocate(bids);

    std::vector<Scalar> sorted;
    sorted.reserve(bids.size());
    for (auto i : out.order) sorted.push_back(bids[i].amount);

    out.payments.resize(bids.size());
    out.utilities.resize(bids.size());
    out.welfare = Scalar(0);
    for (std::size_t i = 0; i < bids.size(); ++i) {
        const auto q = static_cast<std::size_t>(out.turns[i]);
        out.payments[i] = payment<Scalar>(sorted, q, schedule);
        out.utilities[i] = utility(values[i], q, out.payments[i], schedule);
        out.welfare += values[i] * schedule.alpha(q);
    }
    return out;
}

/// Truthful convenience overload: bids are the true values.
template <class Scalar>
AuctionOutcome<Scalar> run_auction(std::span<const Bid<Scalar>> bids, const RewardSchedule<Scalar>& schedule) {
    std::vector<Scalar> values;
    values.reserve(bids.size());
    for (const auto& b : bids) values.push_back(b.amount);
    return run_auction<Scalar>(bids, values, schedule);
}

template <class Scalar>
struct UtilityPoint {
    Scalar bid{};
    Scalar utility{};
};

/// Utility of contender `focal` for every bid in `bid_grid` while everyone else
/// bids truthfully. `truthful[i].amount` is contender i's true value.
template <class Scalar>
std::vector<UtilityPoint<Scalar>> sweep_utilities(std::span<const Bid<Scalar>> truthful, std::size_t focal,
                                                  std::span<const Scalar> bid_grid,
                                                  const RewardSchedule<Scalar>& schedule) {
    if (focal >= truthful.size()) throw std::out_of_range("sweep_utilities: focal agent not a contender");
    std::vector<UtilityPoint<Scalar>> curve;
    curve.reserve(bid_grid.size());
    const Scalar value = truthful[focal].amount;
    if (truthful.size() == 1) {
        for (const auto& b : bid_grid) curve.push_back({b, value * schedule.alpha(1)});
        return curve;
    }
    std::vector<Scalar> values;
    for (const auto& b : truthful) values.push_back(b.amount);
    std::vector<Bid<Scalar>> bids(truthful.begin(), truthful.end());
    for (const auto& b : bid_grid) {
        bids[focal].amount = b;
        const auto outcome = run_auction<Scalar>(bids, values, schedule);
        curve.push_back({b, outcome.utilities[focal]});
    }
    return curve;
}

inline std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Parses "7", "-2.5" or "7/3" exactly; throws std::invalid_argument otherwise.
Rational parse_rational(std::string_view text);

}  // namespace amapf::auction
