#include "stakepool/welfare.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <numeric>

namespace stakepool {

namespace {

std::vector<PlayerId> by_descending_stake(const GameSpec& game) {
    std::vector<PlayerId> order(game.player_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return game.stake(x) > game.stake(y); });
    return order;
}

long upper_bound(const Scalar& total, const GameSpec& game) {
    return static_cast<long>(floor_int(total / game.threshold() + Scalar::real(game.tolerance())));
}

// Assigns players to t groups maximizing sum_j min(load_j, h). Groups are
// opened in order; equal loads are interchangeable.
struct Packer {
    const GameSpec& game;
    std::vector<PlayerId> order;
    std::vector<Scalar> suffix;
    std::size_t groups = 0;
    Scalar goal;  // stop once the capped sum reaches this

    std::vector<Scalar> load;
    std::vector<int> label;
    Scalar best_value;
    std::vector<int> best_label;
    bool reached = false;

    Scalar capped() const {
        Scalar s = 0;
        for (const auto& x : load) s += min(x, game.threshold());
        return s;
    }

    void run(std::size_t pos, std::size_t opened) {
        if (reached) return;
        const Scalar current = capped();
        if (best_label.empty() || current > best_value) {
            // placing the rest anywhere keeps the value; record it
            best_value = current;
            best_label = label;
            for (std::size_t p = pos; p < order.size(); ++p) best_label[p] = 0;
            if (at_least(best_value, goal, game.tolerance())) {
                reached = true;
                return;
            }
        }
        if (pos == order.size()) return;
        Scalar room = Scalar(static_cast<long>(groups)) * game.threshold() - current;
        if (!exceeds(current + min(suffix[pos], room), best_value, game.tolerance())) return;

        const Scalar& a = game.stake(order[pos]);
        std::vector<Scalar> tried;
        const std::size_t last = std::min(opened + 1, groups);
        for (std::size_t b = 0; b < last; ++b) {
            if (load[b] >= game.threshold()) continue;
            if (std::find(tried.begin(), tried.end(), load[b]) != tried.end()) continue;
            tried.push_back(load[b]);
            label[pos] = static_cast<int>(b);
            load[b] += a;
            run(pos + 1, std::max(opened, b + 1));
            load[b] -= a;
            if (reached) return;
        }
        // player not needed: park in group 0
        label[pos] = 0;
        run(pos + 1, opened);
    }

    Scalar solve(std::size_t t) {
        groups = t;
        load.assign(t, Scalar(0));
        label.assign(order.size(), 0);
        best_label.clear();
        best_value = 0;
        reached = false;
        run(0, 0);
        return best_value;
    }

    Partition materialize() const {
        Partition partition;
        partition.pools.resize(groups);
        for (std::size_t p = 0; p < order.size(); ++p) partition.pools[best_label[p]].atomic.push_back(order[p]);
        for (auto& pool : partition.pools) std::sort(pool.atomic.begin(), pool.atomic.end());
        return partition;
    }
};

Packer make_packer(const GameSpec& game) {
    Packer packer{game, by_descending_stake(game), {}, 0, 0, {}, {}, 0, {}, false};
    packer.suffix.assign(game.player_count() + 1, Scalar(0));
    for (std::size_t p = game.player_count(); p-- > 0;)
        packer.suffix[p] = packer.suffix[p + 1] + game.stake(packer.order[p]);
    return packer;
}

}  // namespace

OptResult opt_atomic(const GameSpec& game, std::size_t cap) {
    if (game.has_ocean()) throw PremiseError("opt_atomic needs a game without ocean");
    OptResult out;
    const long bound = upper_bound(game.total_stake(), game);
    if (bound <= 0) return out;
    if (game.player_count() > cap) {
        out.value = bound;
        out.bound_only = true;
        return out;
    }
    Packer packer = make_packer(game);
    for (long t = bound; t >= 1; --t) {
        packer.goal = Scalar(t) * game.threshold();
        packer.solve(static_cast<std::size_t>(t));
        if (!packer.reached) continue;
        out.value = t;
        out.witness = packer.materialize();
        return out;
    }
    return out;
}

OptResult opt_oceanic(const GameSpec& game, std::size_t cap) {
    const Scalar& h = game.threshold();
    const Scalar& L = game.oceanic_mass();
    OptResult out;
    const long bound = upper_bound(game.total_stake() + L, game);
    if (bound <= 0) return out;
    if (game.player_count() > cap) {
        out.value = bound;
        out.bound_only = true;
        return out;
    }
    Packer packer = make_packer(game);
    for (long t = bound; t >= 1; --t) {
        // deficit = t h - capped sum must not exceed L
        const Scalar need = Scalar(t) * h - L;
        packer.goal = need;
        Scalar best = packer.solve(static_cast<std::size_t>(t));
        if (!at_least(best, need, game.tolerance())) continue;
        out.value = t;
        Partition partition = packer.materialize();
        Scalar left = L;
        for (auto& pool : partition.pools) {
            Scalar s = pool_stake(pool, game);
            if (s < h) {
                pool.oceanic = min(h - s, left);
                left -= pool.oceanic;
            }
        }
        if (left.sign() > 0) partition.pools.front().oceanic += left;
        out.witness = std::move(partition);
        return out;
    }
    return out;
}

OptResult opt(const GameSpec& game, std::size_t cap) {
    return game.has_ocean() ? opt_oceanic(game, cap) : opt_atomic(game, cap);
}

std::size_t winning_count(const Partition& partition, const GameSpec& game) {
    require_valid(partition, game);
    std::size_t w = 0;
    for (const auto& pool : partition.pools) w += rho(pool, game) == 1 ? 1 : 0;
    return w;
}

std::string_view to_string(PoSMode m) {
    switch (m) {
        case PoSMode::exhaustive: return "exhaustive";
        case PoSMode::exhaustive_by_type: return "exhaustive-by-type";
        case PoSMode::constructive: return "constructive-upper-bound";
    }
    return "?";
}

PoSMode parse_pos_mode(std::string_view name) {
    if (name == "exhaustive") return PoSMode::exhaustive;
    if (name == "exhaustive-by-type" || name == "by-type") return PoSMode::exhaustive_by_type;
    if (name == "constructive" || name == "constructive-upper-bound") return PoSMode::constructive;
    throw InputError("unknown PoS mode '" + std::string(name) + "'");
}

PoSReport price_of_stability(const GameSpec& game, Scheme scheme, PoSMode mode, const PoSOptions& options) {
    PoSReport report;
    report.mode = mode;
    report.opt = opt(game, options.opt_cap);

    if (mode == PoSMode::constructive) {
        report.upper_bound = true;
        Partition built;
        if (scheme == Scheme::shapley && game.has_ocean()) {
            built = construct_oceanic_equilibrium(game).partition;
        } else if (scheme == Scheme::shapley) {
            built = construct_atomic_kl_equilibrium(game).partition;
        } else if (scheme == Scheme::proportional) {
            built = construct_leximin_optimal(game, options.opt_cap);
        } else if (scheme == Scheme::prop_sqrt) {
            built = construct_sqrt_kl_equilibrium(game).partition;
        } else {
            if (game.has_ocean()) throw InputError("prop_squares is defined only for the atomic model");
            built = grand_coalition(game);
        }
        ValidationReport v = validate_partition(built, game);
        if (!v.all_winning()) {
            report.note = "constructed partition has losing pools";
        } else if (!check_nash(built, game, scheme, options.nash).equilibrium) {
            report.note = "constructed partition failed check_nash";
        }
        report.best_equilibrium_w = winning_count(built, game);
        report.equilibria = report.note.empty() ? 1 : 0;
        report.witness = std::move(built);
    } else {
        if (game.has_ocean()) throw PremiseError("exhaustive PoS needs a purely atomic game");
        std::vector<EquilibriumEntry> found =
            mode == PoSMode::exhaustive ? enumerate_equilibria(game, scheme, options.enum_cap, options.nash)
                                        : enumerate_equilibria_by_type(game, scheme, options.nash);
        report.equilibria = found.size();
        if (!found.empty()) {
            report.best_equilibrium_w = found.front().winning;
            report.witness = std::move(found.front().partition);
        }
    }

    if (report.best_equilibrium_w == 0 || !report.note.empty()) {
        if (report.note.empty()) report.note = "no equilibrium with all pools winning";
        return report;
    }
    report.pos = Scalar(report.opt.value) / Scalar(static_cast<long>(report.best_equilibrium_w));
    if (report.opt.bound_only) report.note = "OPT is the floor(total/h) bound";
    return report;
}

}  // namespace stakepool
