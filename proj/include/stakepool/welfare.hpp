#pragma once

#include "stakepool/equilibrium.hpp"
#include "stakepool/model.hpp"

#include <optional>
#include <string>

namespace stakepool {

struct OptResult {
    long value = 0;
    std::optional<Partition> witness;
    bool bound_only = false;  // solver cap exceeded, value is floor(total / h)
};

OptResult opt_atomic(const GameSpec& game, std::size_t cap = 20);
OptResult opt_oceanic(const GameSpec& game, std::size_t cap = 20);
// Dispatches on whether the game has an ocean.
OptResult opt(const GameSpec& game, std::size_t cap = 20);

std::size_t winning_count(const Partition& partition, const GameSpec& game);

enum class PoSMode { exhaustive, exhaustive_by_type, constructive };

std::string_view to_string(PoSMode m);
PoSMode parse_pos_mode(std::string_view name);

struct PoSReport {
    OptResult opt;
    std::size_t best_equilibrium_w = 0;
    std::optional<Scalar> pos;  // empty when no all-winning equilibrium exists
    PoSMode mode = PoSMode::exhaustive;
    bool upper_bound = false;   // constructive: pos bounds the true value from above
    std::size_t equilibria = 0;
    std::optional<Partition> witness;
    std::string note;
};

struct PoSOptions {
    std::size_t enum_cap = 10;
    std::size_t opt_cap = 20;
    NashOptions nash;
};

PoSReport price_of_stability(const GameSpec& game, Scheme scheme, PoSMode mode, const PoSOptions& options = {});

}  // namespace stakepool
