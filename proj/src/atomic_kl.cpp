#include "stakepool/equilibrium.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>

namespace stakepool {

namespace {

Condition check(std::string name, bool pass, std::string detail) {
    return {std::move(name), pass, std::move(detail)};
}

long to_long(const Scalar& x, const char* what) {
    if (!x.is_integer()) throw PremiseError(std::string(what) + " must be an integer");
    return static_cast<long>(floor_int(x));
}

// Smallest integer k with k >= k*(a, h), decided exactly.
long ceil_kstar(long a, long h) {
    long d = -3 * a * a + h * h + 2 * a * h - 2 * h + 2 * a + 1;
    auto at_least_kstar = [&](long k) {
        long lhs = 2 * k + a - h + 1;  // k >= k*  <=>  lhs >= sqrt(d)
        return lhs >= 0 && lhs * lhs >= d;
    };
    long k = std::max(0L, static_cast<long>(kstar(static_cast<double>(a), static_cast<double>(h))) - 1);
    while (!at_least_kstar(k)) ++k;
    return k;
}

}  // namespace

TwoValued two_valued_stakes(const GameSpec& game) {
    TwoValued out;
    std::optional<Scalar> big;
    for (PlayerId i = 0; i < game.player_count(); ++i) {
        const Scalar& s = game.stake(i);
        if (s == Scalar(1)) {
            out.small.push_back(i);
            continue;
        }
        if (big && !(*big == s)) throw PremiseError("unsupported stake pattern: stakes must take values 1 and a");
        big = s;
        out.large.push_back(i);
    }
    if (!big) throw PremiseError("unsupported stake pattern: no large player");
    out.a = *big;
    return out;
}

ConditionReport atomic_kl_conditions(long k, long l, const Scalar& a, const Scalar& h, std::size_t large_count) {
    const Scalar K(k), Lv(l);
    if (!(K < h)) throw PremiseError("atomic (k,l) conditions need k < h");
    if (K + a < h) throw PremiseError("atomic (k,l) conditions need k + a >= h");
    if (Lv < h + 1) throw PremiseError("atomic (k,l) conditions need l >= h + 1");
    to_long(h, "threshold h");

    ConditionReport report;
    Scalar lower = K * (K + 1) / (h - a);
    report.conditions.push_back(check("small players stay in type A", lower <= Lv,
                                      "k(k+1)/(h-a)=" + lower.str() + " <= l=" + std::to_string(l)));
    Scalar upper = K == h - 1 ? h * (h + 1) / (h + 1 - a) : (K + 1) * (K + 2) / (h - a);
    report.conditions.push_back(check("small players stay in type B", Lv <= upper,
                                      "l=" + std::to_string(l) + " <= " + upper.str()));
    Scalar large_bound = a * (K + 1) / (K - h + a + 1);
    report.conditions.push_back(check("large player stays in type A", large_bound <= Lv,
                                      "a(k+1)/(k-h+a+1)=" + large_bound.str() + " <= l=" + std::to_string(l)));
    if (large_count >= 2) {
        Scalar own = shapley_atomic_onelarge(k, a, h).large;
        Scalar cross = shapley_atomic_twolarge_equal(k, a, h);
        report.conditions.push_back(check("large player stays out of other type A pools", cross <= own,
                                          "deviation=" + cross.str() + " <= own=" + own.str()));
    }
    report.verdict = report.pass() ? "sufficient-pass" : "fail";
    return report;
}

ConditionReport sqrt_kl_conditions(long k, long l, const Scalar& a, const Scalar& h) {
    (void)h;
    const Scalar K(k), Lv(l);
    const Scalar root = sqrt(a);
    const double tol = default_tolerance;
    ConditionReport report;
    report.conditions.push_back(check("l-1 >= k", Lv - 1 >= K, "l-1=" + std::to_string(l - 1) + " k=" + std::to_string(k)));
    report.conditions.push_back(check("k <= l - sqrt(a)", at_least(Lv - root, K, tol),
                                      "l-sqrt(a)=" + (Lv - root).decimal()));
    report.conditions.push_back(check("k >= l - sqrt(a) - 1", at_least(K, Lv - root - 1, tol),
                                      "l-sqrt(a)-1=" + (Lv - root - 1).decimal()));
    report.verdict = report.pass() ? "sufficient-pass" : "fail";
    return report;
}

Partition kl_partition(const GameSpec& game, long k, long l) {
    TwoValued tv = two_valued_stakes(game);
    if (k < 0 || l < 2) throw PremiseError("need k >= 0 and l >= 2");
    const std::size_t nb = tv.large.size(), ns = tv.small.size();
    const std::size_t need = nb * static_cast<std::size_t>(k);
    if (ns < need) throw PremiseError("population too small: type A pools need " + std::to_string(need) + " small players");
    const std::size_t rest = ns - need;
    const std::size_t c_size = static_cast<std::size_t>(l - 1);
    const std::size_t c_pools = rest / c_size, extra = rest % c_size;
    if (extra > c_pools)
        throw PremiseError("population too small: " + std::to_string(extra) + " leftover small players but only " +
                           std::to_string(c_pools) + " type C pools");
    Partition partition;
    std::size_t next = 0;
    for (PlayerId big : tv.large) {
        Pool pool{{big}, 0};
        for (long j = 0; j < k; ++j) pool.atomic.push_back(tv.small[next++]);
        partition.pools.push_back(std::move(pool));
    }
    for (std::size_t c = 0; c < c_pools; ++c) {
        Pool pool;
        std::size_t size = c_size + (c < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) pool.atomic.push_back(tv.small[next++]);
        partition.pools.push_back(std::move(pool));
    }
    return partition;
}

AtomicConstruction construct_atomic_kl_equilibrium(const GameSpec& game) {
    TwoValued tv = two_valued_stakes(game);
    const long a = to_long(tv.a, "large stake a");
    const long h = to_long(game.threshold(), "threshold h");
    if (a < 2 || a >= h) throw PremiseError("atomic construction needs 2 <= a < h");
    if (game.has_ocean()) throw PremiseError("atomic construction needs a game without ocean");
    const long nb = static_cast<long>(tv.large.size()), ns = static_cast<long>(tv.small.size());
    const long bound = (2 * h - 1) * (2 * h - 1) + nb * (h + 1);
    if (ns < bound)
        throw PremiseError("population too small: need at least " + std::to_string(bound) + " unit-stake players, have " +
                           std::to_string(ns));

    AtomicConstruction out;
    const Scalar A(a), H(h);
    const std::size_t large_count = tv.large.size();
    auto admissible = [&](long k, long l) {
        return l - 1 >= h && atomic_kl_conditions(k, l, A, H, large_count).pass();
    };
    if (h <= a * a - 2 * a + 2) {
        long k = std::max(ceil_kstar(a, h), h - a);
        long l_star = ceil_int(Scalar(k) * Scalar(k + 1) / Scalar(h - a));
        out.k = k;
        out.rule = "k=ceil(k*), l=ceil(k(k+1)/(h-a))+1";
        if (admissible(k, l_star + 1)) {
            out.l = l_star + 1;
        } else if (admissible(k, l_star)) {
            out.l = l_star;
            out.rule = "k=ceil(k*), l=ceil(k(k+1)/(h-a))";
        } else {
            throw PremiseError("no admissible l for k=" + std::to_string(k));
        }
        long count = 0;
        for (long l = h + 1; l <= 4 * h * h; ++l) count += admissible(k, l) ? 1 : 0;
        out.single_point = count == 1;
    } else {
        out.k = h - 1;
        if (h >= a * a) {
            out.l = h + a;
            out.rule = "k=h-1, l=h+a";
        } else if (2 * h >= a * a + a && h <= a * a - 1) {
            out.l = h + a + 1;
            out.rule = "k=h-1, l=h+a+1";
        } else {
            throw PremiseError("no (k,l) rule covers a=" + std::to_string(a) + ", h=" + std::to_string(h));
        }
        if (!admissible(out.k, out.l))
            throw PremiseError("chosen (k,l) fails the sufficient conditions");
    }
    out.partition = kl_partition(game, out.k, out.l);
    return out;
}

AtomicConstruction construct_sqrt_kl_equilibrium(const GameSpec& game) {
    TwoValued tv = two_valued_stakes(game);
    const long h = to_long(game.threshold(), "threshold h");
    if (game.has_ocean()) throw PremiseError("square-root construction needs a game without ocean");
    if (tv.a <= Scalar(1)) throw PremiseError("square-root construction needs a > 1");
    const long k = static_cast<long>(ceil_int(game.threshold() - sqrt(tv.a) + 1));
    const long nb = static_cast<long>(tv.large.size()), ns = static_cast<long>(tv.small.size());
    const long bound = h * h + nb * k;
    if (ns < bound)
        throw PremiseError("population too small: need at least " + std::to_string(bound) + " unit-stake players, have " +
                           std::to_string(ns));
    AtomicConstruction out;
    out.k = k;
    out.l = h + 1;
    out.rule = "k=ceil(h-sqrt(a)+1), l=h+1";
    if (!sqrt_kl_conditions(k, out.l, tv.a, game.threshold()).pass()) {
        out.l = h + 2;
        out.rule = "k=ceil(h-sqrt(a)+1), l=h+2";
        if (!sqrt_kl_conditions(k, out.l, tv.a, game.threshold()).pass())
            throw PremiseError("neither l=h+1 nor l=h+2 satisfies the square-root conditions");
    }
    out.partition = kl_partition(game, out.k, out.l);
    return out;
}

std::vector<KLSearchEntry> search_kl_equilibria(const Scalar& a, const Scalar& h, Scheme scheme, long k_max, long l_max,
                                                const NashOptions& options) {
    const long hi = to_long(h, "threshold h");
    const long k_min = std::max(0L, static_cast<long>(ceil_int(h - a)));
    std::vector<KLSearchEntry> out;
    for (long k = k_min; k <= k_max; ++k) {
        for (long l = hi + 1; l <= l_max; ++l) {
            // one type B pool and l-1 type C pools
            const long c_pools = l;
            const long ns = k + (l - 1) * c_pools + 1;
            std::vector<Scalar> stakes{a};
            stakes.insert(stakes.end(), static_cast<std::size_t>(ns), Scalar(1));
            GameSpec game(h, std::move(stakes));
            Partition partition = kl_partition(game, k, l);
            NashOptions opts = options;
            opts.stop_at_first = true;
            bool ok = check_nash(partition, game, scheme, opts).equilibrium;
            out.push_back({k, l, static_cast<std::size_t>(ns), ok});
        }
    }
    return out;
}

}  // namespace stakepool
