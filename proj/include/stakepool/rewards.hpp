#pragma once

#include "stakepool/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace stakepool {

struct MonteCarloRecord {
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<double> estimate;  // per atomic member
    std::vector<double> stderr_;   // binomial standard errors
    double rate_estimate = 0;      // reward per unit of oceanic stake
    double rate_stderr = 0;
};

enum class RewardMethod {
    losing,
    proportional,
    prop_squares,
    prop_sqrt,
    shapley_dp,
    shapley_enumeration,
    shapley_closed_form,
    shapley_monte_carlo,
};

std::string_view to_string(RewardMethod m);

// Rewards inside one pool: one entry per atomic member (in pool order) and
// the reward per unit of oceanic stake.
struct PoolRewards {
    std::vector<Scalar> member;
    Scalar oceanic_rate = 0;
    RewardMethod method = RewardMethod::losing;
    std::optional<MonteCarloRecord> monte_carlo;

    double uncertainty(std::size_t member_index) const;
    double rate_uncertainty() const;
    Scalar total(const Scalar& oceanic_share) const;
};

struct RewardOptions {
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 42;
    // Largest scaled threshold the atomic Shapley DP accepts.
    std::size_t dp_budget = 2'000'000;
};

PoolRewards proportional_family_rewards(const Composition& pool, const Scalar& h, Scheme scheme,
                                        double tol = default_tolerance);

// Counts coalitions by (size, stake sum) over stakes scaled to integers.
PoolRewards shapley_atomic_exact(const Composition& pool, const Scalar& h, double tol = default_tolerance,
                                 std::size_t dp_budget = RewardOptions{}.dp_budget);

// Permutation enumeration, at most 9 members.
PoolRewards shapley_atomic_enum(const Composition& pool, const Scalar& h, double tol = default_tolerance);

struct OneLargeShapley {
    Scalar large;
    Scalar small;
};

// One player of stake a with k unit-stake players.
OneLargeShapley shapley_atomic_onelarge(long k, const Scalar& a, const Scalar& h);

// Reward of a second player of stake a joining a pool of one a-player and
// k unit players. Integer a, h, k with 2 <= a < h and h-a <= k <= h-1.
Scalar shapley_atomic_twolarge_equal(long k, const Scalar& a, const Scalar& h);

// At most two atomic members and positive oceanic share; two members
// additionally need oceanic share <= h.
PoolRewards shapley_oceanic_closed(const Composition& pool, const Scalar& h, double tol = default_tolerance);

PoolRewards shapley_oceanic_mc(const Composition& pool, const Scalar& h, std::uint64_t samples,
                               std::uint64_t seed, double tol = default_tolerance);

// Dispatch for any pool and scheme.
PoolRewards pool_rewards(const Composition& pool, const Scalar& h, Scheme scheme,
                         const RewardOptions& options = {}, double tol = default_tolerance);

struct RewardAllocation {
    std::vector<Scalar> atomic;        // by player id
    std::vector<Scalar> oceanic_rate;  // by pool index
    std::vector<PoolRewards> pools;
};

RewardAllocation allocate_rewards(const Partition& partition, const GameSpec& game, Scheme scheme,
                                  const RewardOptions& options = {});

}  // namespace stakepool
