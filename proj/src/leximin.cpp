#include "stakepool/equilibrium.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <numeric>

namespace stakepool {

namespace {

// Pours `ocean` onto the lowest loads. Returns the share given to each block.
std::vector<Scalar> pour(const std::vector<Scalar>& loads, const Scalar& ocean) {
    const std::size_t t = loads.size();
    std::vector<Scalar> share(t, Scalar(0));
    if (ocean.is_zero() || t == 0) return share;
    std::vector<std::size_t> order(t);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return loads[x] < loads[y]; });
    Scalar prefix = 0, level = 0;
    std::size_t filled = 0;
    for (std::size_t j = 0; j < t; ++j) {
        prefix += loads[order[j]];
        level = (ocean + prefix) / Scalar(static_cast<long>(j + 1));
        filled = j + 1;
        if (j + 1 == t || level <= loads[order[j + 1]]) break;
    }
    for (std::size_t j = 0; j < filled; ++j) share[order[j]] = level - loads[order[j]];
    return share;
}

struct LeximinSearch {
    const GameSpec& game;
    std::vector<PlayerId> order;  // by descending stake
    std::size_t blocks = 0;
    std::vector<Scalar> suffix;   // remaining stake from position i
    std::vector<int> label;
    std::vector<Scalar> load;
    std::vector<std::size_t> members;

    bool found = false;
    std::vector<Scalar> best_sorted;
    std::vector<int> best_label;
    std::vector<Scalar> best_share;

    bool feasible(std::size_t pos) const {
        Scalar deficit = 0;
        for (std::size_t b = 0; b < blocks; ++b)
            if (load[b] < game.threshold()) deficit += game.threshold() - load[b];
        return at_least(suffix[pos] + game.oceanic_mass(), deficit, game.tolerance());
    }

    void leaf() {
        if (!game.has_ocean())
            for (std::size_t b = 0; b < blocks; ++b)
                if (members[b] == 0) return;
        std::vector<Scalar> share = pour(load, game.oceanic_mass());
        std::vector<Scalar> stake(blocks);
        for (std::size_t b = 0; b < blocks; ++b) {
            stake[b] = load[b] + share[b];
            if (!is_winning(stake[b], game.threshold(), game.tolerance())) return;
        }
        std::vector<Scalar> sorted = stake;
        std::sort(sorted.begin(), sorted.end());
        bool better = !found;
        if (found) {
            for (std::size_t b = 0; b < blocks; ++b) {
                if (near(sorted[b], best_sorted[b], game.tolerance())) continue;
                better = sorted[b] > best_sorted[b];
                break;
            }
        }
        if (better) {
            found = true;
            best_sorted = std::move(sorted);
            best_label = label;
            best_share = std::move(share);
        }
    }

    void run(std::size_t pos, int used) {
        if (!feasible(pos)) return;
        if (pos == order.size()) {
            leaf();
            return;
        }
        const PlayerId i = order[pos];
        int first = 0;
        if (pos > 0 && game.stake(order[pos - 1]) == game.stake(i)) first = label[pos - 1];
        int last = std::min<int>(used, static_cast<int>(blocks) - 1);
        for (int b = first; b <= last; ++b) {
            label[pos] = b;
            load[b] += game.stake(i);
            ++members[b];
            run(pos + 1, std::max(used, b + 1));
            load[b] -= game.stake(i);
            --members[b];
        }
    }
};

}  // namespace

Partition construct_leximin_optimal(const GameSpec& game, std::size_t cap) {
    const std::size_t n = game.player_count();
    if (n > cap) throw CapacityError("leximin search supports at most " + std::to_string(cap) + " atomic players");
    const Scalar total = game.total_stake();
    const long upper = static_cast<long>(floor_int(total / game.threshold() + Scalar::real(game.tolerance())));
    if (upper <= 0) return grand_coalition(game);

    LeximinSearch search{game, {}, 0, {}, {}, {}, {}, false, {}, {}, {}};
    search.order.resize(n);
    std::iota(search.order.begin(), search.order.end(), 0);
    std::stable_sort(search.order.begin(), search.order.end(),
                     [&](auto x, auto y) { return game.stake(x) > game.stake(y); });
    search.suffix.assign(n + 1, Scalar(0));
    for (std::size_t p = n; p-- > 0;) search.suffix[p] = search.suffix[p + 1] + game.stake(search.order[p]);

    for (long t = upper; t >= 1; --t) {
        search.blocks = static_cast<std::size_t>(t);
        search.label.assign(n, 0);
        search.load.assign(search.blocks, Scalar(0));
        search.members.assign(search.blocks, 0);
        search.found = false;
        search.run(0, 0);
        if (!search.found) continue;
        Partition partition;
        partition.pools.resize(search.blocks);
        for (std::size_t p = 0; p < n; ++p) partition.pools[search.best_label[p]].atomic.push_back(search.order[p]);
        for (std::size_t b = 0; b < search.blocks; ++b) {
            std::sort(partition.pools[b].atomic.begin(), partition.pools[b].atomic.end());
            partition.pools[b].oceanic = search.best_share[b];
        }
        return partition;
    }
    return grand_coalition(game);
}

}  // namespace stakepool
