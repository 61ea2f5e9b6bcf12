#include "stakepool/equilibrium.hpp"

#include "stakepool/errors.hpp"

namespace stakepool {

namespace {

// Reward per unit for an infinitesimal slice of ocean entering a pool that
// currently holds none.
Scalar marginal_entry_rate(const Composition& pool, const Scalar& h, Scheme scheme, double tol) {
    if (!is_winning(pool.stake(), h, tol)) return 0;
    // Under Shapley the ocean's value vanishes faster than its mass as the
    // share goes to zero: no atomic prefix sum lies in [h - eps, h).
    if (scheme == Scheme::shapley) return 0;
    return Scalar(1) / pool.stake();
}

}  // namespace

bool ConditionReport::pass() const {
    for (const auto& c : conditions)
        if (!c.pass) return false;
    return true;
}

NashReport check_nash(const Partition& partition, const GameSpec& game, Scheme scheme, const NashOptions& options) {
    ValidationReport validation = validate_partition(partition, game);
    if (!validation.valid()) {
        std::string msg = "invalid partition:";
        for (const auto& p : validation.problems) msg += " " + p + ";";
        throw InputError(msg);
    }
    if (!validation.losing_pools.empty()) {
        std::string msg = "equilibrium candidates must consist of winning pools; losing:";
        for (auto p : validation.losing_pools) msg += " pool " + std::to_string(p + 1);
        throw PremiseError(msg);
    }
    if (atomic_only(scheme) && game.has_ocean())
        throw InputError(std::string(to_string(scheme)) + " is defined only for the atomic model");

    const Scalar& h = game.threshold();
    const double tol = game.tolerance();
    const auto& pools = partition.pools;
    std::vector<Composition> comps;
    std::vector<PoolRewards> current;
    for (const auto& pool : pools) {
        comps.push_back(composition(pool, game));
        current.push_back(pool_rewards(comps.back(), h, scheme, options.rewards, tol));
    }

    NashReport report;
    auto record = [&](Deviation d, double noise) {
        bool statistical = noise > 0;
        report.statistical = report.statistical || statistical;
        if (!exceeds(d.after, d.before, tol + 3 * noise)) return false;
        d.statistical = statistical;
        report.equilibrium = false;
        report.deviations.push_back(std::move(d));
        return options.stop_at_first;
    };

    for (std::size_t p = 0; p < pools.size(); ++p) {
        for (std::size_t j = 0; j < pools[p].atomic.size(); ++j) {
            const PlayerId i = pools[p].atomic[j];
            const Scalar& before = current[p].member[j];
            const double before_noise = current[p].uncertainty(j);
            for (std::size_t q = 0; q < pools.size(); ++q) {
                if (q == p) continue;
                Composition target = comps[q];
                target.atomic.push_back(game.stake(i));
                PoolRewards r = pool_rewards(target, h, scheme, options.rewards, tol);
                Deviation d{{Mover::Kind::atomic, i}, p, q, before, r.member.back()};
                if (record(std::move(d), before_noise + r.uncertainty(target.atomic.size() - 1))) return report;
            }
            Composition solo{{game.stake(i)}, 0};
            PoolRewards r = pool_rewards(solo, h, scheme, options.rewards, tol);
            Deviation d{{Mover::Kind::atomic, i}, p, std::nullopt, before, r.member.back()};
            if (record(std::move(d), before_noise)) return report;
        }
    }

    if (game.has_ocean()) {
        for (std::size_t p = 0; p < pools.size(); ++p) {
            if (pools[p].oceanic.sign() <= 0) continue;
            const Scalar& rate = current[p].oceanic_rate;
            for (std::size_t q = 0; q < pools.size(); ++q) {
                if (q == p) continue;
                bool has_ocean = pools[q].oceanic.sign() > 0;
                Scalar entry = has_ocean ? current[q].oceanic_rate : marginal_entry_rate(comps[q], h, scheme, tol);
                double noise = current[p].rate_uncertainty() + (has_ocean ? current[q].rate_uncertainty() : 0.0);
                Deviation d{{Mover::Kind::oceanic, p}, p, q, rate, entry};
                if (record(std::move(d), noise)) return report;
            }
        }
    }
    return report;
}

}  // namespace stakepool
