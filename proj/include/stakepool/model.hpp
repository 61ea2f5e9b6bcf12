#pragma once

#include "stakepool/scalar.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stakepool {

// Zero-based index into GameSpec::stakes(). Scenario files and reports use
// one-based ids.
using PlayerId = std::size_t;

enum class Scheme { shapley, proportional, prop_squares, prop_sqrt };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);
bool atomic_only(Scheme s);

enum class Arithmetic { exact, floating };

inline constexpr double default_tolerance = 1e-9;

class GameSpec {
public:
    GameSpec(Scalar threshold, std::vector<Scalar> atomic_stakes, Scalar oceanic_mass = 0,
             double tolerance = default_tolerance);

    const Scalar& threshold() const { return threshold_; }
    const std::vector<Scalar>& stakes() const { return stakes_; }
    const Scalar& stake(PlayerId i) const;
    std::size_t player_count() const { return stakes_.size(); }
    const Scalar& oceanic_mass() const { return oceanic_; }
    bool has_ocean() const { return !oceanic_.is_zero(); }
    Arithmetic arithmetic() const { return arithmetic_; }
    double tolerance() const { return tolerance_; }
    Scalar total_stake() const;

private:
    Scalar threshold_;
    std::vector<Scalar> stakes_;
    Scalar oceanic_;
    double tolerance_;
    Arithmetic arithmetic_;
};

struct Pool {
    std::vector<PlayerId> atomic;
    Scalar oceanic = 0;
};

struct Partition {
    std::vector<Pool> pools;
};

// Stake multiset of a pool, detached from player identities.
struct Composition {
    std::vector<Scalar> atomic;
    Scalar oceanic = 0;

    Scalar stake() const;
};

Composition composition(const Pool& pool, const GameSpec& game);

Scalar pool_stake(const Pool& pool, const GameSpec& game);
bool is_winning(const Scalar& stake, const Scalar& threshold, double tol);
int rho(const Pool& pool, const GameSpec& game);

struct ValidationReport {
    std::vector<std::string> problems;
    std::vector<std::size_t> losing_pools;

    bool valid() const { return problems.empty(); }
    bool all_winning() const { return valid() && losing_pools.empty(); }
};

ValidationReport validate_partition(const Partition& partition, const GameSpec& game);

// Throws InputError when the partition is not a valid profile.
void require_valid(const Partition& partition, const GameSpec& game);

Partition grand_coalition(const GameSpec& game);

std::string describe(const Partition& partition);

}  // namespace stakepool
