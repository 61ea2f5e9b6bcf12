#include "stakepool/rewards.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace stakepool {

namespace {

PoolRewards losing_pool(const Composition& pool) {
    PoolRewards r;
    r.member.assign(pool.atomic.size(), Scalar(0));
    r.method = RewardMethod::losing;
    return r;
}

BigInt factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i) f *= i;
    return f;
}

bool all_exact(const Composition& pool, const Scalar& h) {
    if (!h.is_exact() || !pool.oceanic.is_exact()) return false;
    return std::all_of(pool.atomic.begin(), pool.atomic.end(), [](const Scalar& a) { return a.is_exact(); });
}

// Common denominator of the stakes and threshold.
BigInt common_denominator(const Composition& pool, const Scalar& h) {
    BigInt d = boost::multiprecision::denominator(h.exact());
    for (const auto& a : pool.atomic) {
        const BigInt& q = boost::multiprecision::denominator(a.exact());
        d = d / boost::multiprecision::gcd(d, q) * q;
    }
    return d;
}

BigInt scaled(const Scalar& x, const BigInt& d) {
    Rational v = x.exact() * d;
    return boost::multiprecision::numerator(v);
}

void require_integer(const Scalar& x, const char* what) {
    if (!x.is_integer()) throw PremiseError(std::string(what) + " must be an integer for this closed form");
}

}  // namespace

std::string_view to_string(RewardMethod m) {
    switch (m) {
        case RewardMethod::losing: return "losing";
        case RewardMethod::proportional: return "proportional";
        case RewardMethod::prop_squares: return "prop_squares";
        case RewardMethod::prop_sqrt: return "prop_sqrt";
        case RewardMethod::shapley_dp: return "shapley_dp";
        case RewardMethod::shapley_enumeration: return "shapley_enumeration";
        case RewardMethod::shapley_closed_form: return "shapley_closed_form";
        case RewardMethod::shapley_monte_carlo: return "shapley_monte_carlo";
    }
    return "?";
}

double PoolRewards::uncertainty(std::size_t i) const {
    return monte_carlo ? monte_carlo->stderr_.at(i) : 0.0;
}

double PoolRewards::rate_uncertainty() const { return monte_carlo ? monte_carlo->rate_stderr : 0.0; }

Scalar PoolRewards::total(const Scalar& oceanic_share) const {
    Scalar t = oceanic_rate * oceanic_share;
    for (const auto& v : member) t += v;
    return t;
}

PoolRewards proportional_family_rewards(const Composition& pool, const Scalar& h, Scheme scheme, double tol) {
    if (scheme == Scheme::shapley) throw std::invalid_argument("not a proportional-family scheme");
    if (atomic_only(scheme) && !pool.oceanic.is_zero())
        throw InputError(std::string(to_string(scheme)) + " is defined only for pools without oceanic stake");
    Scalar m = pool.stake();
    if (m.is_zero() || !is_winning(m, h, tol)) return losing_pool(pool);
    PoolRewards r;
    switch (scheme) {
        case Scheme::proportional:
            r.method = RewardMethod::proportional;
            for (const auto& a : pool.atomic) r.member.push_back(a / m);
            r.oceanic_rate = Scalar(1) / m;
            break;
        case Scheme::prop_squares: {
            r.method = RewardMethod::prop_squares;
            Scalar sum = 0;
            for (const auto& a : pool.atomic) sum += a * a;
            for (const auto& a : pool.atomic) r.member.push_back(a * a / sum);
            break;
        }
        case Scheme::prop_sqrt: {
            r.method = RewardMethod::prop_sqrt;
            std::vector<Scalar> roots;
            Scalar sum = 0;
            for (const auto& a : pool.atomic) {
                roots.push_back(sqrt(a));
                sum += roots.back();
            }
            for (const auto& s : roots) r.member.push_back(s / sum);
            break;
        }
        case Scheme::shapley: break;
    }
    return r;
}

PoolRewards shapley_atomic_exact(const Composition& pool, const Scalar& h, double tol, std::size_t dp_budget) {
    if (!pool.oceanic.is_zero())
        throw InputError("atomic Shapley DP applies only to pools without oceanic stake");
    if (!is_winning(pool.stake(), h, tol)) return losing_pool(pool);
    if (!all_exact(pool, h))
        throw PremiseError("atomic Shapley DP needs rational stakes; use shapley_atomic_enum for pools of at most 9 members");
    const std::size_t n = pool.atomic.size();
    if (n > 62) throw CapacityError("atomic Shapley DP supports at most 62 pool members");

    BigInt d = common_denominator(pool, h);
    BigInt big_h = scaled(h, d);
    if (big_h > dp_budget || big_h * n > BigInt(64'000'000))
        throw CapacityError("scaled threshold " + big_h.str() + " exceeds the Shapley DP budget");
    const auto H = big_h.convert_to<std::size_t>();
    std::vector<std::size_t> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        BigInt v = scaled(pool.atomic[i], d);
        w[i] = v >= big_h ? H : v.convert_to<std::size_t>();
    }

    std::vector<BigInt> weight(n);  // t!(n-1-t)!
    for (std::size_t t = 0; t < n; ++t)
        weight[t] = factorial(static_cast<unsigned>(t)) * factorial(static_cast<unsigned>(n - 1 - t));
    const BigInt denom = factorial(static_cast<unsigned>(n));

    PoolRewards r;
    r.method = RewardMethod::shapley_dp;
    r.member.resize(n);
    std::map<std::size_t, Scalar> cache;
    std::vector<std::uint64_t> count(n * H);
    for (std::size_t i = 0; i < n; ++i) {
        if (auto it = cache.find(w[i]); it != cache.end()) {
            r.member[i] = it->second;
            continue;
        }
        // count[t*H + s]: coalitions of the other members with t players and sum s < H
        std::fill(count.begin(), count.end(), 0);
        count[0] = 1;
        std::size_t used = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            ++used;
            const std::size_t wj = w[j];
            if (wj >= H) {
                continue;  // any coalition containing j already wins
            }
            for (std::size_t t = used; t-- > 0;)
                for (std::size_t s = H - wj; s-- > 0;)
                    if (count[t * H + s]) count[(t + 1) * H + s + wj] += count[t * H + s];
        }
        BigInt num = 0;
        const std::size_t lo = w[i] >= H ? 0 : H - w[i];
        for (std::size_t t = 0; t < n; ++t) {
            std::uint64_t c = 0;
            for (std::size_t s = lo; s < H; ++s) c += count[t * H + s];
            if (c) num += weight[t] * c;
        }
        Scalar value(Rational(num, denom));
        cache.emplace(w[i], value);
        r.member[i] = value;
    }
    return r;
}

PoolRewards shapley_atomic_enum(const Composition& pool, const Scalar& h, double tol) {
    if (!pool.oceanic.is_zero())
        throw InputError("atomic Shapley enumeration applies only to pools without oceanic stake");
    const std::size_t n = pool.atomic.size();
    if (n > 9) throw CapacityError("Shapley enumeration supports at most 9 pool members");
    if (!is_winning(pool.stake(), h, tol)) return losing_pool(pool);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::uint64_t> pivots(n, 0);
    if (all_exact(pool, h)) {
        BigInt d = common_denominator(pool, h);
        std::vector<BigInt> w;
        for (const auto& a : pool.atomic) w.push_back(scaled(a, d));
        BigInt H = scaled(h, d);
        do {
            BigInt sum = 0;
            for (std::size_t idx : order) {
                sum += w[idx];
                if (sum >= H) {
                    ++pivots[idx];
                    break;
                }
            }
        } while (std::next_permutation(order.begin(), order.end()));
    } else {
        std::vector<double> w;
        for (const auto& a : pool.atomic) w.push_back(a.to_double());
        const double H = h.to_double() - tol;
        do {
            double sum = 0;
            for (std::size_t idx : order) {
                sum += w[idx];
                if (sum >= H) {
                    ++pivots[idx];
                    break;
                }
            }
        } while (std::next_permutation(order.begin(), order.end()));
    }
    PoolRewards r;
    r.method = RewardMethod::shapley_enumeration;
    const BigInt total = factorial(static_cast<unsigned>(n));
    for (std::size_t i = 0; i < n; ++i) r.member.push_back(Scalar(Rational(BigInt(pivots[i]), total)));
    return r;
}

OneLargeShapley shapley_atomic_onelarge(long k, const Scalar& a, const Scalar& h) {
    if (k < 0) throw PremiseError("k must be nonnegative");
    require_integer(a, "large stake a");
    require_integer(h, "threshold h");
    if (a.sign() <= 0 || a >= h) throw PremiseError("large stake must lie in (0, h)");
    const Scalar K(k);
    if (K + a < h) throw PremiseError("losing pool: k + a < h");
    OneLargeShapley r;
    if (K < h) {
        r.large = (K - h + a + 1) / (K + 1);
        r.small = k > 0 ? (h - a) / (K * (K + 1)) : Scalar(0);
    } else {
        r.large = a / (K + 1);
        r.small = (K + 1 - a) / (K * (K + 1));
    }
    return r;
}

Scalar shapley_atomic_twolarge_equal(long k, const Scalar& a, const Scalar& h) {
    require_integer(a, "large stake a");
    require_integer(h, "threshold h");
    const Scalar K(k);
    if (a < 2 || a >= h)
        throw PremiseError("two-large closed form needs 2 <= a < h, got a=" + a.str() + ", h=" + h.str());
    if (K < h - a || K > h - 1)
        throw PremiseError("two-large closed form needs h-a <= k <= h-1, got k=" + std::to_string(k));
    Scalar tail = (K - h + a + 1) * (K - h + a + 2);
    Scalar head = 2 * a >= h ? (h - a) * (h - a + 1) : a * (2 * h - 3 * a + 1);
    return (head + tail) / (2 * (K + 1) * (K + 2));
}

PoolRewards shapley_oceanic_closed(const Composition& pool, const Scalar& h, double tol) {
    const Scalar& k = pool.oceanic;
    if (k.sign() <= 0) throw PremiseError("oceanic closed forms need a positive oceanic share");
    if (pool.atomic.size() > 2)
        throw PremiseError("no closed form for more than two atomic members; use Monte Carlo");
    if (!is_winning(pool.stake(), h, tol)) return losing_pool(pool);
    PoolRewards r;
    r.method = RewardMethod::shapley_closed_form;
    if (pool.atomic.size() == 1) {
        const Scalar& a = pool.atomic[0];
        r.member.push_back(k <= h ? (k + a - h) / k : a / k);
    } else if (pool.atomic.size() == 2) {
        if (k > h) throw PremiseError("two atomic members with oceanic share above h have no closed form");
        auto value = [&](const Scalar& a1, const Scalar& a2) {
            Scalar before = max(Scalar(0), a1 - h + k);     // arrives before the co-member
            Scalar upper = min(k, h - a2);                  // arrives after the co-member
            Scalar lower = max(Scalar(0), h - a1 - a2);
            Scalar after = upper > lower ? upper * upper - lower * lower : Scalar(0);
            return (before * before + after) / (2 * k * k);
        };
        r.member.push_back(value(pool.atomic[0], pool.atomic[1]));
        r.member.push_back(value(pool.atomic[1], pool.atomic[0]));
    }
    Scalar sum = 0;
    for (const auto& v : r.member) sum += v;
    r.oceanic_rate = (1 - sum) / k;
    return r;
}

PoolRewards shapley_oceanic_mc(const Composition& pool, const Scalar& h, std::uint64_t samples,
                               std::uint64_t seed, double tol) {
    if (pool.oceanic.sign() <= 0) throw PremiseError("Monte Carlo Shapley needs a positive oceanic share");
    if (samples == 0) throw InputError("sample count must be positive");
    if (!is_winning(pool.stake(), h, tol)) return losing_pool(pool);
    const std::size_t t = pool.atomic.size();
    const double k = pool.oceanic.to_double();
    const double H = h.to_double();
    std::vector<double> a(t);
    for (std::size_t i = 0; i < t; ++i) a[i] = pool.atomic[i].to_double();

    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> pivots(t, 0);
    std::vector<std::pair<double, std::size_t>> arrivals(t);
    for (std::uint64_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < t; ++i) arrivals[i] = {static_cast<double>(rng() >> 11) * 0x1.0p-53 * k, i};
        std::sort(arrivals.begin(), arrivals.end());
        double atomic_before = 0;
        for (const auto& [time, i] : arrivals) {
            double before = atomic_before + time;
            if (before >= H) break;  // ocean crossed the threshold
            if (before + a[i] >= H) {
                ++pivots[i];
                break;
            }
            atomic_before += a[i];
        }
    }
    MonteCarloRecord rec;
    rec.samples = samples;
    rec.seed = seed;
    const double N = static_cast<double>(samples);
    double any = 0;
    PoolRewards r;
    r.method = RewardMethod::shapley_monte_carlo;
    for (std::size_t i = 0; i < t; ++i) {
        double p = static_cast<double>(pivots[i]) / N;
        any += p;
        rec.estimate.push_back(p);
        rec.stderr_.push_back(std::sqrt(p * (1 - p) / N));
        r.member.push_back(Scalar::real(p));
    }
    rec.rate_estimate = (1 - any) / k;
    rec.rate_stderr = std::sqrt(any * (1 - any) / N) / k;
    r.oceanic_rate = Scalar::real(rec.rate_estimate);
    r.monte_carlo = std::move(rec);
    return r;
}

PoolRewards pool_rewards(const Composition& pool, const Scalar& h, Scheme scheme, const RewardOptions& options,
                         double tol) {
    if (scheme != Scheme::shapley) return proportional_family_rewards(pool, h, scheme, tol);
    if (!is_winning(pool.stake(), h, tol) || pool.stake().is_zero()) return losing_pool(pool);
    if (pool.oceanic.is_zero()) {
        if (all_exact(pool, h)) {
            try {
                return shapley_atomic_exact(pool, h, tol, options.dp_budget);
            } catch (const CapacityError&) {
                if (pool.atomic.size() > 9) throw;
            }
        }
        return shapley_atomic_enum(pool, h, tol);
    }
    if (pool.atomic.size() <= 1 || (pool.atomic.size() == 2 && pool.oceanic <= h))
        return shapley_oceanic_closed(pool, h, tol);
    return shapley_oceanic_mc(pool, h, options.samples, options.seed, tol);
}

RewardAllocation allocate_rewards(const Partition& partition, const GameSpec& game, Scheme scheme,
                                  const RewardOptions& options) {
    require_valid(partition, game);
    RewardAllocation out;
    out.atomic.assign(game.player_count(), Scalar(0));
    for (const auto& pool : partition.pools) {
        PoolRewards r = pool_rewards(composition(pool, game), game.threshold(), scheme, options, game.tolerance());
        for (std::size_t j = 0; j < pool.atomic.size(); ++j) out.atomic[pool.atomic[j]] = r.member[j];
        out.oceanic_rate.push_back(r.oceanic_rate);
        out.pools.push_back(std::move(r));
    }
    return out;
}

}  // namespace stakepool
