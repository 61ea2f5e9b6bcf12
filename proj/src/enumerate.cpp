#include "stakepool/equilibrium.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <optional>

namespace stakepool {

namespace {

void require_atomic(const GameSpec& game) {
    if (game.has_ocean()) throw PremiseError("equilibrium enumeration needs a purely atomic game");
}

void sort_entries(std::vector<EquilibriumEntry>& entries) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& x, const auto& y) { return x.winning > y.winning; });
}

struct RgsSearch {
    const GameSpec& game;
    Scheme scheme;
    NashOptions options;
    std::vector<Scalar> suffix;
    std::vector<std::size_t> label;
    std::vector<Scalar> load;
    std::vector<EquilibriumEntry> found;

    bool feasible(std::size_t pos, std::size_t blocks) const {
        Scalar deficit = 0;
        for (std::size_t b = 0; b < blocks; ++b)
            if (load[b] < game.threshold()) deficit += game.threshold() - load[b];
        return at_least(suffix[pos], deficit, game.tolerance());
    }

    void leaf(std::size_t blocks) {
        for (std::size_t b = 0; b < blocks; ++b)
            if (!is_winning(load[b], game.threshold(), game.tolerance())) return;
        Partition partition;
        partition.pools.resize(blocks);
        for (std::size_t i = 0; i < label.size(); ++i) partition.pools[label[i]].atomic.push_back(i);
        if (check_nash(partition, game, scheme, options).equilibrium) found.push_back({std::move(partition), blocks});
    }

    void run(std::size_t pos, std::size_t blocks) {
        if (!feasible(pos, blocks)) return;
        if (pos == label.size()) {
            leaf(blocks);
            return;
        }
        for (std::size_t b = 0; b <= blocks; ++b) {
            label[pos] = b;
            if (b == blocks) load.push_back(Scalar(0));
            load[b] += game.stake(pos);
            run(pos + 1, std::max(blocks, b + 1));
            load[b] -= game.stake(pos);
            if (b == blocks) load.pop_back();
        }
    }
};

struct TypeSearch {
    const GameSpec& game;
    Scheme scheme;
    NashOptions options;
    std::vector<Scalar> value;                  // stake of each class
    std::vector<std::vector<PlayerId>> members; // players of each class
    std::vector<std::vector<std::size_t>> blocks;
    std::size_t max_candidates;
    std::size_t candidates = 0;
    std::vector<EquilibriumEntry> found;

    Scalar stake_of(const std::vector<std::size_t>& v) const {
        Scalar s = 0;
        for (std::size_t c = 0; c < v.size(); ++c)
            if (v[c]) s += value[c] * Scalar(static_cast<long>(v[c]));
        return s;
    }

    void leaf() {
        if (++candidates > max_candidates)
            throw CapacityError("more than " + std::to_string(max_candidates) + " candidate partitions");
        std::vector<std::size_t> next(value.size(), 0);
        Partition partition;
        for (const auto& block : blocks) {
            Pool pool;
            for (std::size_t c = 0; c < block.size(); ++c)
                for (std::size_t j = 0; j < block[c]; ++j) pool.atomic.push_back(members[c][next[c]++]);
            std::sort(pool.atomic.begin(), pool.atomic.end());
            partition.pools.push_back(std::move(pool));
        }
        if (check_nash(partition, game, scheme, options).equilibrium)
            found.push_back({std::move(partition), blocks.size()});
    }

    void run(std::vector<std::size_t>& rem) {
        if (std::all_of(rem.begin(), rem.end(), [](auto x) { return x == 0; })) {
            leaf();
            return;
        }
        if (!is_winning(stake_of(rem), game.threshold(), game.tolerance())) return;
        // next block v: nonzero, v <= rem, lexicographically <= previous block
        std::vector<std::size_t> v(rem.size(), 0);
        const std::optional<std::vector<std::size_t>> prev =
            blocks.empty() ? std::nullopt : std::optional(blocks.back());
        while (true) {
            // odometer over v, last class fastest
            std::size_t c = v.size();
            while (c > 0) {
                --c;
                if (v[c] < rem[c]) {
                    ++v[c];
                    break;
                }
                v[c] = 0;
                if (c == 0) return;
            }
            if (v.empty()) return;
            if (prev && std::lexicographical_compare(prev->begin(), prev->end(), v.begin(), v.end())) continue;
            if (!is_winning(stake_of(v), game.threshold(), game.tolerance())) continue;
            std::vector<std::size_t> after = rem;
            for (std::size_t d = 0; d < v.size(); ++d) after[d] -= v[d];
            Scalar left = stake_of(after);
            if (!left.is_zero() && !is_winning(left, game.threshold(), game.tolerance())) continue;
            blocks.push_back(v);
            run(after);
            blocks.pop_back();
        }
    }
};

}  // namespace

std::vector<EquilibriumEntry> enumerate_equilibria(const GameSpec& game, Scheme scheme, std::size_t cap,
                                                   const NashOptions& options) {
    require_atomic(game);
    const std::size_t n = game.player_count();
    if (n > cap) throw CapacityError("enumeration supports at most " + std::to_string(cap) + " players, got " + std::to_string(n));
    if (n == 0) return {};
    NashOptions opts = options;
    opts.stop_at_first = true;
    RgsSearch search{game, scheme, opts, std::vector<Scalar>(n + 1, Scalar(0)), std::vector<std::size_t>(n, 0), {}, {}};
    for (std::size_t p = n; p-- > 0;) search.suffix[p] = search.suffix[p + 1] + game.stake(p);
    search.run(0, 0);
    sort_entries(search.found);
    return std::move(search.found);
}

std::vector<EquilibriumEntry> enumerate_equilibria_by_type(const GameSpec& game, Scheme scheme,
                                                           const NashOptions& options, std::size_t max_candidates) {
    require_atomic(game);
    if (game.player_count() == 0) return {};
    NashOptions opts = options;
    opts.stop_at_first = true;
    TypeSearch search{game, scheme, opts, {}, {}, {}, max_candidates, 0, {}};
    for (PlayerId i = 0; i < game.player_count(); ++i) {
        auto it = std::find(search.value.begin(), search.value.end(), game.stake(i));
        if (it == search.value.end()) {
            search.value.push_back(game.stake(i));
            search.members.push_back({i});
        } else {
            search.members[static_cast<std::size_t>(it - search.value.begin())].push_back(i);
        }
    }
    std::vector<std::size_t> rem;
    for (const auto& m : search.members) rem.push_back(m.size());
    search.run(rem);
    sort_entries(search.found);
    return std::move(search.found);
}

}  // namespace stakepool
