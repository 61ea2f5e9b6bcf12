#include "stakepool/sybil.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stakepool {

namespace {

struct Baseline {
    std::vector<Composition> pools;  // the player removed
    std::size_t home = 0;
};

Baseline without_player(const GameSpec& game, const Partition& partition, PlayerId player) {
    require_valid(partition, game);
    if (player >= game.player_count()) throw InputError("unknown player " + std::to_string(player + 1));
    Baseline out;
    bool found = false;
    for (std::size_t p = 0; p < partition.pools.size(); ++p) {
        const Pool& pool = partition.pools[p];
        Composition comp;
        comp.oceanic = pool.oceanic;
        for (PlayerId i : pool.atomic) {
            if (i == player) {
                out.home = p;
                found = true;
            } else {
                comp.atomic.push_back(game.stake(i));
            }
        }
        out.pools.push_back(std::move(comp));
    }
    if (!found) throw InputError("player " + std::to_string(player + 1) + " is not in the partition");
    return out;
}

// Reward of one avatar of stake s added to `base`.
PoolRewards avatar_rewards(const Composition& base, const Scalar& s, const Scalar& h, Scheme scheme,
                           const RewardOptions& options, double tol) {
    Composition c = base;
    c.atomic.push_back(s);
    return pool_rewards(c, h, scheme, options, tol);
}

void check_budget(const std::vector<Scalar>& stakes, const std::vector<Scalar>& floors, const Scalar& budget) {
    if (budget.sign() < 0) throw InputError("budget must be nonnegative");
    for (std::size_t j = 0; j < stakes.size(); ++j) {
        if (stakes[j].sign() <= 0) throw InputError("water-filling needs positive pool stakes");
        if (floors[j].sign() < 0) throw InputError("floors must be nonnegative");
    }
}

}  // namespace

SybilPayoff sybil_payoff(const GameSpec& game, const Partition& partition, const SybilStrategy& strategy,
                         Scheme scheme, const RewardOptions& options) {
    Baseline base = without_player(game, partition, strategy.player);
    const double tol = game.tolerance();
    std::vector<std::vector<Scalar>> avatars(base.pools.size());
    Scalar used = 0;
    for (const auto& [pool, s] : strategy.allocations) {
        if (pool >= base.pools.size()) throw InputError("allocation to nonexistent pool " + std::to_string(pool + 1));
        if (s.sign() < 0) throw InputError("negative allocation");
        if (s.is_zero()) continue;
        avatars[pool].push_back(s);
        used += s;
    }
    if (exceeds(used, game.stake(strategy.player), tol))
        throw InputError("allocations exceed the player's stake " + game.stake(strategy.player).str());

    SybilPayoff out;
    for (std::size_t p = 0; p < avatars.size(); ++p) {
        if (avatars[p].empty()) continue;
        Composition c = base.pools[p];
        const std::size_t first = c.atomic.size();
        c.atomic.insert(c.atomic.end(), avatars[p].begin(), avatars[p].end());
        PoolRewards r = pool_rewards(c, game.threshold(), scheme, options, tol);
        for (std::size_t j = first; j < c.atomic.size(); ++j) {
            out.value += r.member[j];
            out.noise += r.uncertainty(j);
        }
    }
    return out;
}

Waterfill waterfill_with_floors(const std::vector<Scalar>& stakes, const std::vector<Scalar>& floors,
                                const Scalar& budget) {
    if (stakes.size() != floors.size()) throw InputError("one floor per pool");
    check_budget(stakes, floors, budget);
    const std::size_t n = stakes.size();
    Waterfill out;
    out.allocation = floors;
    Scalar fixed = std::accumulate(floors.begin(), floors.end(), Scalar(0));
    if (exceeds(fixed, budget, default_tolerance)) throw PremiseError("floors exceed the budget");
    if (n == 0) return out;

    std::vector<Scalar> root(n), breakpoint(n);
    for (std::size_t j = 0; j < n; ++j) {
        root[j] = sqrt(stakes[j]);
        breakpoint[j] = (stakes[j] + floors[j]) / root[j];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return breakpoint[x] < breakpoint[y]; });

    out.level = breakpoint[order[0]];
    if (budget > fixed) {
        Scalar sum_m = 0, sum_root = 0;
        std::size_t active = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t j = order[r];
            sum_m += stakes[j];
            sum_root += root[j];
            fixed -= floors[j];
            active = r + 1;
            out.level = (budget - fixed + sum_m) / sum_root;
            if (r + 1 == n || out.level <= breakpoint[order[r + 1]]) break;
        }
        Scalar spent = 0;
        for (std::size_t r = 0; r < active; ++r) {
            const std::size_t j = order[r];
            out.allocation[j] = max(floors[j], out.level * root[j] - stakes[j]);
        }
        for (const auto& s : out.allocation) spent += s;
        if (!spent.is_exact() || !(spent == budget)) {
            // put the rounding residue on the last active pool
            const std::size_t j = order[active - 1];
            Scalar others = 0;
            for (std::size_t q = 0; q < n; ++q)
                if (q != j) others += out.allocation[q];
            out.allocation[j] = max(floors[j], budget - others);
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        if (out.allocation[j].sign() > 0) out.payoff += out.allocation[j] / (stakes[j] + out.allocation[j]);
    return out;
}

Waterfill waterfill_proportional(const std::vector<Scalar>& pool_stakes, const Scalar& budget) {
    return waterfill_with_floors(pool_stakes, std::vector<Scalar>(pool_stakes.size(), Scalar(0)), budget);
}

std::string_view to_string(SybilVerdict v) {
    switch (v) {
        case SybilVerdict::sybil_proof: return "sybil-proof-at-profile";
        case SybilVerdict::vulnerable: return "vulnerable";
        case SybilVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

SybilAudit proportional_best_response(const GameSpec& game, const Baseline& base, PlayerId player,
                                      const Scalar& baseline) {
    const Scalar& h = game.threshold();
    const Scalar& a = game.stake(player);
    const double tol = game.tolerance();
    std::vector<std::size_t> open, closed;
    for (std::size_t p = 0; p < base.pools.size(); ++p) {
        Scalar m = base.pools[p].stake();
        if (m.is_zero()) continue;  // an avatar alone never reaches h
        (is_winning(m, h, tol) ? open : closed).push_back(p);
    }
    if (closed.size() > 20) throw CapacityError("more than 20 losing pools to consider");

    SybilAudit out;
    out.player = player;
    out.baseline = baseline;
    out.best = baseline;
    out.strategy = {player, {{base.home, a}}};
    out.method = "exact-waterfill";
    for (std::uint32_t mask = 0; mask < (1u << closed.size()); ++mask) {
        std::vector<std::size_t> used = open;
        std::vector<Scalar> stakes, floors;
        for (std::size_t p : open) {
            stakes.push_back(base.pools[p].stake());
            floors.push_back(Scalar(0));
        }
        Scalar need = 0;
        for (std::size_t b = 0; b < closed.size(); ++b) {
            if (!(mask >> b & 1u)) continue;
            const std::size_t p = closed[b];
            used.push_back(p);
            stakes.push_back(base.pools[p].stake());
            floors.push_back(h - stakes.back());
            need += floors.back();
        }
        if (need > a || used.empty()) continue;
        Waterfill w = waterfill_with_floors(stakes, floors, a);
        if (!(w.payoff > out.best)) continue;
        out.best = w.payoff;
        out.strategy.allocations.clear();
        for (std::size_t j = 0; j < used.size(); ++j)
            if (w.allocation[j].sign() > 0) out.strategy.allocations.emplace_back(used[j], w.allocation[j]);
        std::sort(out.strategy.allocations.begin(), out.strategy.allocations.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
    }
    out.verdict = exceeds(out.best, out.baseline, tol) ? SybilVerdict::vulnerable : SybilVerdict::sybil_proof;
    return out;
}

struct GridSearch {
    const GameSpec& game;
    const Baseline& base;
    Scheme scheme;
    const SybilOptions& options;

    PoolRewards eval(std::size_t p, const Scalar& s) const {
        return avatar_rewards(base.pools[p], s, game.threshold(), scheme, options.rewards, game.tolerance());
    }
};

}  // namespace

SybilAudit sybil_best_response(const GameSpec& game, const Partition& partition, PlayerId player, Scheme scheme,
                               const SybilOptions& options) {
    Baseline base = without_player(game, partition, player);
    const Scalar& a = game.stake(player);
    const double tol = game.tolerance();
    GridSearch g{game, base, scheme, options};
    PoolRewards home = g.eval(base.home, a);
    const Scalar baseline = home.member.back();
    const double baseline_noise = home.uncertainty(home.member.size() - 1);
    if (scheme == Scheme::proportional) return proportional_best_response(game, base, player, baseline);

    const std::size_t P = base.pools.size();
    const long N = options.grid;
    if (N < 1) throw InputError("grid must be positive");
    const Scalar unit = a / Scalar(N);

    // value[p][u]: avatar of stake u * unit in pool p
    std::vector<std::vector<Scalar>> value(P, std::vector<Scalar>(N + 1, Scalar(0)));
    std::vector<std::vector<double>> noise(P, std::vector<double>(N + 1, 0.0));
    for (std::size_t p = 0; p < P; ++p) {
        for (long u = 1; u <= N; ++u) {
            PoolRewards r = g.eval(p, unit * Scalar(u));
            value[p][u] = r.member.back();
            noise[p][u] = r.uncertainty(r.member.size() - 1);
        }
    }
    // knapsack over pools on doubles, then exact re-evaluation of the choice
    const std::size_t B = static_cast<std::size_t>(N);
    std::vector<double> best(B + 1, 0.0);
    std::vector<std::vector<std::size_t>> pick(P, std::vector<std::size_t>(B + 1, 0));
    for (std::size_t p = 0; p < P; ++p) {
        std::vector<double> next(B + 1, -1.0);
        for (std::size_t b = 0; b <= B; ++b) {
            for (std::size_t u = 0; u <= b; ++u) {
                double v = best[b - u] + value[p][u].to_double();
                if (v > next[b]) {
                    next[b] = v;
                    pick[p][b] = u;
                }
            }
        }
        best = std::move(next);
    }
    std::vector<Scalar> x(P, Scalar(0)), cur(P, Scalar(0));
    std::vector<double> cur_noise(P, 0.0);
    {
        std::size_t b = std::max_element(best.begin(), best.end()) - best.begin();
        for (std::size_t p = P; p-- > 0;) {
            std::size_t u = pick[p][b];
            x[p] = unit * Scalar(static_cast<long>(u));
            cur[p] = value[p][u];
            cur_noise[p] = noise[p][u];
            b -= u;
        }
    }

    // pattern search: move delta between pools and the withheld bucket (index P)
    auto stake_at = [&](std::size_t j) {
        if (j < P) return x[j];
        Scalar left = a;
        for (const auto& s : x) left -= s;
        return left;
    };
    Scalar delta = unit / 2;
    try {
        for (int round = 0; round < options.refine_rounds; ++round) {
            bool moved = true;
            int passes = 0;
            while (moved && passes++ < 20) {
                moved = false;
                for (std::size_t from = 0; from <= P; ++from) {
                    for (std::size_t to = 0; to <= P; ++to) {
                        if (from == to || stake_at(from) < delta) continue;
                        Scalar gain = 0;
                        std::optional<PoolRewards> rf, rt;
                        if (from < P) {
                            Scalar s = x[from] - delta;
                            if (s.sign() > 0) rf = g.eval(from, s);
                            gain += (rf ? rf->member.back() : Scalar(0)) - cur[from];
                        }
                        if (to < P) {
                            rt = g.eval(to, x[to] + delta);
                            gain += rt->member.back() - cur[to];
                        }
                        if (!(gain.to_double() > 1e-15)) continue;
                        if (from < P) {
                            x[from] -= delta;
                            cur[from] = rf ? rf->member.back() : Scalar(0);
                            cur_noise[from] = rf ? rf->uncertainty(rf->member.size() - 1) : 0.0;
                        }
                        if (to < P) {
                            x[to] += delta;
                            cur[to] = rt->member.back();
                            cur_noise[to] = rt->uncertainty(rt->member.size() - 1);
                        }
                        moved = true;
                    }
                }
            }
            delta = delta / 2;
        }
    } catch (const CapacityError&) {
        // finer steps outgrow the exact solver; keep what we have
    }

    SybilAudit out;
    out.player = player;
    out.baseline = baseline;
    out.method = "grid+refine";
    out.best = std::accumulate(cur.begin(), cur.end(), Scalar(0));
    out.noise = baseline_noise + std::accumulate(cur_noise.begin(), cur_noise.end(), 0.0);
    out.strategy.player = player;
    if (out.best > baseline) {
        for (std::size_t p = 0; p < P; ++p)
            if (x[p].sign() > 0) out.strategy.allocations.emplace_back(p, x[p]);
    } else {
        out.best = baseline;
        out.strategy.allocations = {{base.home, a}};
    }
    if (out.best.is_exact() && baseline.is_exact() && out.noise == 0) {
        out.verdict = out.best > baseline ? SybilVerdict::vulnerable : SybilVerdict::sybil_proof;
    } else {
        const double gain = (out.best - baseline).to_double();
        if (gain <= tol)
            out.verdict = SybilVerdict::sybil_proof;
        else if (gain > 3 * std::max(out.noise, tol))
            out.verdict = SybilVerdict::vulnerable;
        else
            out.verdict = SybilVerdict::inconclusive;
    }
    return out;
}

std::vector<SybilAudit> audit_sybil_proofness(const GameSpec& game, const Partition& partition, Scheme scheme,
                                              const SybilOptions& options) {
    std::vector<SybilAudit> out;
    for (PlayerId i = 0; i < game.player_count(); ++i)
        out.push_back(sybil_best_response(game, partition, i, scheme, options));
    return out;
}

ConcavityReport concavity_probe(Scheme scheme, const Composition& co_members, const Scalar& h, long grid,
                                const RewardOptions& options, double tol) {
    if (grid < 2) throw InputError("concavity grid must be at least 2");
    auto p = [&](const Scalar& x) -> std::optional<Scalar> {
        PoolRewards r = avatar_rewards(co_members, x, h, scheme, options, tol);
        if (r.method == RewardMethod::losing) return std::nullopt;
        return r.member.back();
    };
    ConcavityReport out;
    std::vector<std::optional<Scalar>> values;
    for (long i = 1; i < grid; ++i) {
        Scalar x = h * Scalar(i) / Scalar(grid);
        values.push_back(p(x));
        if (values.back()) out.samples.emplace_back(x, *values.back());
    }
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (!values[i - 1] || !values[i] || !values[i + 1]) continue;
        Scalar mid = (*values[i - 1] + *values[i + 1]) / 2;
        if (at_least(*values[i], mid, tol))
            ++out.concave_points;
        else
            ++out.violations;
    }
    for (long i = 1; i < grid && !out.witness; ++i) {
        Scalar x = h * Scalar(i) / Scalar(grid);
        auto whole = values[static_cast<std::size_t>(i - 1)];
        auto half = p(x / 2);
        if (!whole || !half) continue;
        Scalar split = 2 * *half;
        if (exceeds(split, *whole, tol)) out.witness = ConcavityWitness{x, *whole, split, true};
    }
    return out;
}

SplitAnalysis big_player_split_analysis(const Scalar& a, const Scalar& h, const Scalar& l, long m, double tol) {
    if (h.sign() <= 0 || a.sign() <= 0) throw InputError("a and h must be positive");
    if (m < 1) throw InputError("m must be at least 1");
    const Scalar ratio = a / h;
    if (!ratio.is_integer() && !near(ratio, Scalar(static_cast<long>(std::llround(ratio.to_double()))), tol))
        throw PremiseError("a must be an integer multiple of h");
    if (!at_least(l, h, tol)) throw PremiseError("pool size l must be at least h");
    SplitAnalysis out;
    out.lambda = std::llround(ratio.to_double());
    out.m = m;
    out.solo = Scalar(out.lambda);
    const Scalar avatars = Scalar(out.lambda) * Scalar(m);
    const Scalar piece = h / Scalar(m);
    if (m == 1) {
        out.k = 0;
        out.split_shapley = out.solo;
        out.split_proportional = out.solo;
    } else {
        out.k = sqrt(l * (h - piece));
        Composition pool{{piece}, out.k};
        out.split_shapley = avatars * shapley_oceanic_closed(pool, h, tol).member[0];
        out.split_proportional = avatars * piece / (out.k + piece);
    }
    out.k_at_most_h = m == 1 || at_least(h, out.k, tol);
    out.equality = near(out.split_shapley, out.solo, tol);
    return out;
}

}  // namespace stakepool
