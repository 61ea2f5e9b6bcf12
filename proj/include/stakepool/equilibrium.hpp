#pragma once

#include "stakepool/model.hpp"
#include "stakepool/rewards.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stakepool {

// Who moves in a deviation: an atomic player, or an infinitesimal unit of
// ocean currently in pool `id`.
struct Mover {
    enum class Kind { atomic, oceanic } kind;
    std::size_t id;
};

struct Deviation {
    Mover who;
    std::size_t from;
    std::optional<std::size_t> to;  // empty: opens a new solo pool
    Scalar before;
    Scalar after;
    bool statistical = false;
};

struct NashReport {
    bool equilibrium = true;
    bool statistical = false;  // some comparison relied on Monte Carlo
    std::vector<Deviation> deviations;
};

struct NashOptions {
    RewardOptions rewards;
    bool stop_at_first = false;
};

// Requires a valid partition whose pools are all winning.
NashReport check_nash(const Partition& partition, const GameSpec& game, Scheme scheme,
                      const NashOptions& options = {});

struct Condition {
    std::string name;
    bool pass;
    std::string detail;
};

struct ConditionReport {
    std::vector<Condition> conditions;
    std::string verdict;  // "pass", "fail", "sufficient-pass"

    bool pass() const;
};

struct KLParams {
    Scalar k;
    Scalar l;
    std::vector<Scalar> per_player_k;  // oceanic model: k_i by player id
};

// Pools: one large player plus oceanic share k_i each; the rest pure ocean of size l.
ConditionReport oceanic_kl_conditions(const KLParams& params, const GameSpec& game);

struct OceanicConstruction {
    Partition partition;
    KLParams params;        // params.l is the achieved pool size
    Scalar requested_l;
    std::size_t pure_pools = 0;
};

OceanicConstruction construct_oceanic_equilibrium(const GameSpec& game, std::optional<Scalar> l = std::nullopt,
                                                  double slack = 0);
Partition oceanic_kl_partition(const GameSpec& game, const std::vector<Scalar>& k, const Scalar& l,
                               std::size_t pure_pools);

double f_function(double ki, double kj);
double shapley_premium(double ki);
double kstar(double a, double h);

ConditionReport atomic_kl_conditions(long k, long l, const Scalar& a, const Scalar& h,
                                     std::size_t large_count = 1);
ConditionReport sqrt_kl_conditions(long k, long l, const Scalar& a, const Scalar& h);

// Stakes are either 1 or a single value a.
struct TwoValued {
    Scalar a;
    std::vector<PlayerId> large;
    std::vector<PlayerId> small;
};
TwoValued two_valued_stakes(const GameSpec& game);

// Type A: each large player with k small ones. Remaining small players fill
// pools of l-1 (type C); leftovers are added one per pool to make type B pools of l.
Partition kl_partition(const GameSpec& game, long k, long l);

struct AtomicConstruction {
    Partition partition;
    long k = 0;
    long l = 0;
    std::string rule;
    bool single_point = false;  // the admissible l interval held one integer
};

AtomicConstruction construct_atomic_kl_equilibrium(const GameSpec& game);
AtomicConstruction construct_sqrt_kl_equilibrium(const GameSpec& game);

struct KLSearchEntry {
    long k;
    long l;
    std::size_t small_players;
    bool equilibrium;
};

// For every (k, l) in range builds a one-large-player instance containing pools
// of all three types and runs check_nash.
std::vector<KLSearchEntry> search_kl_equilibria(const Scalar& a, const Scalar& h, Scheme scheme, long k_max,
                                                long l_max, const NashOptions& options = {});

// Leximin over pool stakes among OPT-sized partitions.
Partition construct_leximin_optimal(const GameSpec& game, std::size_t cap = 12);

struct EquilibriumEntry {
    Partition partition;
    std::size_t winning;
};

// All-winning partitions that pass check_nash, by descending W.
std::vector<EquilibriumEntry> enumerate_equilibria(const GameSpec& game, Scheme scheme, std::size_t cap = 10,
                                                   const NashOptions& options = {});

// Same search up to permutations of equal-stake players: one representative
// per multiset partition.
std::vector<EquilibriumEntry> enumerate_equilibria_by_type(const GameSpec& game, Scheme scheme,
                                                           const NashOptions& options = {},
                                                           std::size_t max_candidates = 5'000'000);

}  // namespace stakepool
