#pragma once

#include "stakepool/model.hpp"
#include "stakepool/rewards.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stakepool {

// Stake the player places in each pool of the fixed partition, after leaving
// her own pool. Unallocated stake earns nothing.
struct SybilStrategy {
    PlayerId player = 0;
    std::vector<std::pair<std::size_t, Scalar>> allocations;  // pool index, stake
};

struct SybilPayoff {
    Scalar value;
    double noise = 0;  // Monte Carlo standard error, 0 when exact
};

SybilPayoff sybil_payoff(const GameSpec& game, const Partition& partition, const SybilStrategy& strategy,
                         Scheme scheme, const RewardOptions& options = {});

struct Waterfill {
    std::vector<Scalar> allocation;
    Scalar payoff;
    Scalar level;  // common (m_j + s_j) / sqrt(m_j) of the pools that receive stake
};

// Maximizes sum_j s_j / (m_j + s_j) subject to sum_j s_j <= budget.
Waterfill waterfill_proportional(const std::vector<Scalar>& pool_stakes, const Scalar& budget);

// Same with a lower bound s_j >= floor_j on every pool.
Waterfill waterfill_with_floors(const std::vector<Scalar>& pool_stakes, const std::vector<Scalar>& floors,
                                const Scalar& budget);

enum class SybilVerdict { sybil_proof, vulnerable, inconclusive };
std::string_view to_string(SybilVerdict v);

struct SybilAudit {
    PlayerId player = 0;
    Scalar baseline;
    Scalar best;
    SybilStrategy strategy;
    SybilVerdict verdict = SybilVerdict::inconclusive;
    std::string method;  // exact-waterfill or grid+refine
    double noise = 0;
};

struct SybilOptions {
    RewardOptions rewards;
    long grid = 200;          // grid step a_i / grid
    int refine_rounds = 12;   // halvings of the step during local refinement
};

SybilAudit sybil_best_response(const GameSpec& game, const Partition& partition, PlayerId player, Scheme scheme,
                               const SybilOptions& options = {});
std::vector<SybilAudit> audit_sybil_proofness(const GameSpec& game, const Partition& partition, Scheme scheme,
                                              const SybilOptions& options = {});

struct ConcavityWitness {
    Scalar x;
    Scalar whole;  // p(x, S)
    Scalar split;  // 2 p(x/2, S), one half in each of two copies of S
    bool verified = false;
};

struct ConcavityReport {
    std::vector<std::pair<Scalar, Scalar>> samples;  // (x, p(x, S)), losing points omitted
    std::size_t concave_points = 0;
    std::size_t violations = 0;
    std::optional<ConcavityWitness> witness;
};

// Samples the reward of a member of stake x in (0, h) joining co-members S.
ConcavityReport concavity_probe(Scheme scheme, const Composition& co_members, const Scalar& h, long grid,
                                const RewardOptions& options = {}, double tol = default_tolerance);

struct SplitAnalysis {
    long lambda = 0;
    long m = 0;
    Scalar k;                  // oceanic share next to each avatar
    Scalar solo;               // lambda pools of size h
    Scalar split_shapley;      // lambda*m avatars of stake h/m
    Scalar split_proportional;
    bool k_at_most_h = false;
    bool equality = false;
};

SplitAnalysis big_player_split_analysis(const Scalar& a, const Scalar& h, const Scalar& l, long m,
                                        double tol = default_tolerance);

}  // namespace stakepool
