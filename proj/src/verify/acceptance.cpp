#include "stakepool/verify.hpp"

#include "stakepool/equilibrium.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/rewards.hpp"
#include "stakepool/sybil.hpp"
#include "stakepool/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace stakepool::verify {

namespace {

using Rng = std::mt19937_64;

std::string fmt(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

// Rational in (lo, hi) on a grid of 1/den.
Scalar rational_between(Rng& rng, const Scalar& lo, const Scalar& hi, long den) {
    long a = static_cast<long>(floor_int(lo * Scalar(den))) + 1;
    long b = static_cast<long>(ceil_int(hi * Scalar(den))) - 1;
    if (b < a) throw std::logic_error("empty rational range");
    return Scalar::ratio(uniform(rng, a, b), den);
}

double max_pool_stake(const Partition& partition, const GameSpec& game) {
    double m = 0;
    for (const auto& pool : partition.pools) m = std::max(m, pool_stake(pool, game).to_double());
    return m;
}

CriterionResult c1(const VerifyOptions&) {
    CriterionResult r{1, "atomic Shapley (3,1) and (3,1,1,1,1) at h=4", false, {}};
    Scalar x = shapley_atomic_exact({{3, 1}, 0}, 4).member[0];
    Scalar y = shapley_atomic_exact({{3, 1, 1, 1, 1}, 0}, 4).member[0];
    r.pass = x.is_exact() && y.is_exact() && x == Scalar::ratio(1, 2) && y == Scalar::ratio(3, 5);
    r.measured = "large=" + x.str() + ", " + y.str();
    return r;
}

CriterionResult c2(const VerifyOptions& opt) {
    CriterionResult r{2, "oceanic closed forms vs Monte Carlo and quadrature", false, {}};
    Rng rng(opt.seed);
    int mc_fail = 0, quad_fail = 0;
    double worst_sigma = 0, worst_quad = 0;
    for (int c = 0; c < 50; ++c) {
        Scalar h = Scalar(uniform(rng, 2, 8));
        Composition pool;
        const bool two = c % 2 == 1;
        pool.atomic.push_back(rational_between(rng, 0, h, 100));
        if (two) pool.atomic.push_back(rational_between(rng, 0, h, 100));
        // winning pool; two members need k <= h
        Scalar need = max(Scalar(0), h - pool.atomic[0] - (two ? pool.atomic[1] : Scalar(0)));
        Scalar top = two ? h : 2 * h;
        pool.oceanic = min(top, rational_between(rng, need, top + Scalar::ratio(1, 100), 100));
        PoolRewards closed = shapley_oceanic_closed(pool, h);
        PoolRewards mc = shapley_oceanic_mc(pool, h, opt.samples, opt.seed);
        for (std::size_t i = 0; i < pool.atomic.size(); ++i) {
            double diff = std::abs(closed.member[i].to_double() - mc.member[i].to_double());
            double se = mc.uncertainty(i);
            double sigma = se > 0 ? diff / se : (diff > 1e-12 ? 1e9 : 0);
            worst_sigma = std::max(worst_sigma, sigma);
            if (diff > 3 * se + 1e-12) ++mc_fail;
            if (c < 20) {
                std::vector<double> st;
                for (const auto& a : pool.atomic) st.push_back(a.to_double());
                double q = oracle::shapley_oceanic_quadrature(st, pool.oceanic.to_double(), h.to_double(), i);
                double dq = std::abs(q - closed.member[i].to_double());
                worst_quad = std::max(worst_quad, dq);
                if (dq > 1e-3) ++quad_fail;
            }
        }
    }
    r.pass = mc_fail == 0 && quad_fail == 0;
    r.measured = "max |closed-mc|/se=" + fmt(worst_sigma) + ", max |closed-quad|=" + fmt(worst_quad) +
                 ", failures mc=" + std::to_string(mc_fail) + " quad=" + std::to_string(quad_fail);
    return r;
}

CriterionResult c3(const VerifyOptions& opt) {
    CriterionResult r{3, "Example partition h=3, a=2, k=2, l=4 is an equilibrium", false, {}};
    GameSpec game(3, {2, 2, 2}, 14);
    Partition p = oceanic_kl_partition(game, {2, 2, 2}, 4, 2);
    NashOptions nash;
    nash.rewards.samples = opt.samples;
    nash.rewards.seed = opt.seed;
    bool ne = check_nash(p, game, Scheme::shapley, nash).equilibrium;
    RewardAllocation alloc = allocate_rewards(p, game, Scheme::shapley, nash.rewards);
    bool rewards = true;
    for (const auto& x : alloc.atomic) rewards = rewards && near(x, Scalar::ratio(1, 2), 1e-9);
    for (const auto& x : alloc.oceanic_rate) rewards = rewards && near(x, Scalar::ratio(1, 4), 1e-9);
    r.pass = ne && rewards;
    r.measured = std::string(ne ? "NE" : "not NE") + ", large=" + alloc.atomic[0].str() +
                 ", rate=" + alloc.oceanic_rate[0].str();
    return r;
}

// Stakes in (h/4, h) with L = sum k_i + p * 4h/3, k_i = sqrt(4h/3 (h - a_i)).
GameSpec random_oceanic_game(Rng& rng, bool integer_friendly) {
    Scalar h = integer_friendly ? Scalar(3) : Scalar(uniform(rng, 2, 10));
    const long n = uniform(rng, 1, 3);
    const long pure = uniform(rng, 0, 3);
    const Scalar l = h * Scalar::ratio(4, 3);
    std::vector<Scalar> stakes;
    Scalar mass = Scalar(pure) * l;
    for (long i = 0; i < n; ++i) {
        Scalar a;
        if (integer_friendly) {
            static const Scalar choices[] = {Scalar::ratio(11, 4), Scalar::ratio(39, 16), Scalar(2), Scalar::ratio(23, 16)};
            a = choices[uniform(rng, 0, 3)];
        } else {
            a = rational_between(rng, h / 4, h, 1000);
        }
        stakes.push_back(a);
        mass += sqrt(l * (h - a));
    }
    return GameSpec(h, std::move(stakes), mass);
}

CriterionResult c4(const VerifyOptions& opt) {
    CriterionResult r{4, "oceanic construction: equilibrium, pools <= 4h/3, PoS bound <= 4/3", false, {}};
    Rng rng(opt.seed + 4);
    int failures = 0;
    double worst_excess = -1e9, worst_pos = 0;
    NashOptions nash;
    nash.rewards.samples = opt.samples;
    nash.rewards.seed = opt.seed;
    for (int g = 0; g < 20; ++g) {
        GameSpec game = random_oceanic_game(rng, false);
        OceanicConstruction built = construct_oceanic_equilibrium(game);
        bool ne = check_nash(built.partition, game, Scheme::shapley, nash).equilibrium;
        double excess = max_pool_stake(built.partition, game) - (game.threshold() * Scalar::ratio(4, 3)).to_double();
        worst_excess = std::max(worst_excess, excess);
        if (!ne || excess > 1e-9) ++failures;
    }
    for (int g = 0; g < 20; ++g) {
        GameSpec game = random_oceanic_game(rng, true);
        PoSReport pos = price_of_stability(game, Scheme::shapley, PoSMode::constructive, {10, 20, nash});
        double v = pos.pos ? pos.pos->to_double() : 1e9;
        worst_pos = std::max(worst_pos, v);
        if (v > 4.0 / 3.0 + 1e-6 || !pos.note.empty()) ++failures;
    }
    r.pass = failures == 0;
    r.measured = "max pool stake - 4h/3 = " + fmt(worst_excess) + ", max PoS bound = " + fmt(worst_pos) +
                 ", failures=" + std::to_string(failures);
    return r;
}

CriterionResult c5(const VerifyOptions&) {
    CriterionResult r{5, "one a=2 player, h=3, L=4t+2: OPT/W trend toward 4/3", false, {}};
    std::vector<double> ratios;
    std::string detail;
    bool base_ok = false;
    for (long t : {3L, 30L, 300L}) {
        GameSpec game(3, {2}, Scalar(4 * t + 2));
        OptResult best = opt_oceanic(game);
        OceanicConstruction built = construct_oceanic_equilibrium(game);
        std::size_t w = winning_count(built.partition, game);
        Scalar ratio = Scalar(best.value) / Scalar(static_cast<long>(w));
        ratios.push_back(ratio.to_double());
        if (t == 3) base_ok = best.value == 5 && w == 4;
        detail += "t=" + std::to_string(t) + ": " + std::to_string(best.value) + "/" + std::to_string(w) + " ";
    }
    const bool monotone = ratios[0] < ratios[1] && ratios[1] < ratios[2] && ratios[2] < 4.0 / 3.0;
    const double gap = 4.0 / 3.0 - ratios[2];
    r.pass = base_ok && monotone && gap <= 1e-3;
    r.measured = detail + "| 4/3 - ratio(300) = " + fmt(gap);
    return r;
}

CriterionResult c6(const VerifyOptions&) {
    CriterionResult r{6, "f on a 200x200 grid of (0,1]^2: minimum 0 near (2/3, 1)", false, {}};
    double best = 1e300, bx = 0, by = 0;
    for (int i = 1; i <= 200; ++i)
        for (int j = 1; j <= 200; ++j) {
            double x = i / 200.0, y = j / 200.0, v = f_function(x, y);
            if (v < best) {
                best = v;
                bx = x;
                by = y;
            }
        }
    const double at = f_function(2.0 / 3.0, 1.0);
    const bool located = std::abs(bx - 2.0 / 3.0) <= 1.0 / 200 && std::abs(by - 1.0) <= 1.0 / 200;
    r.pass = best >= -1e-12 && located && std::abs(at) <= 1e-12;
    r.measured = "grid min " + fmt(best) + " at (" + fmt(bx) + ", " + fmt(by) + "), f(2/3,1)=" + fmt(at);
    return r;
}

GameSpec two_valued_game(long a, long h, long nb, long ns) {
    std::vector<Scalar> stakes(static_cast<std::size_t>(nb), Scalar(a));
    stakes.insert(stakes.end(), static_cast<std::size_t>(ns), Scalar(1));
    return GameSpec(h, std::move(stakes));
}

CriterionResult c7(const VerifyOptions&) {
    CriterionResult r{7, "atomic (k,l) construction for five (a,h) pairs", false, {}};
    const long nb = 2;
    bool ok = true;
    for (auto [a, h] : std::vector<std::pair<long, long>>{{2, 4}, {3, 4}, {2, 5}, {3, 5}, {4, 5}}) {
        GameSpec game = two_valued_game(a, h, nb, (2 * h - 1) * (2 * h - 1) + nb * (h + 1));
        std::string entry = "(" + std::to_string(a) + "," + std::to_string(h) + ")";
        try {
            AtomicConstruction built = construct_atomic_kl_equilibrium(game);
            bool ne = check_nash(built.partition, game, Scheme::shapley, {{}, true}).equilibrium;
            bool small = max_pool_stake(built.partition, game) <= 2.0 * static_cast<double>(h);
            ok = ok && ne && small;
            entry += ":k=" + std::to_string(built.k) + ",l=" + std::to_string(built.l) + (ne ? ",NE" : ",not NE") +
                     (small ? "" : ",pool>2h");
        } catch (const PremiseError& e) {
            ok = false;
            entry += ":" + std::string(e.what());
        }
        r.measured += entry + " ";
    }
    r.pass = ok;
    return r;
}

CriterionResult c8(const VerifyOptions&) {
    CriterionResult r{8, "a=2, h=4: best (k,l)-equilibrium has l=6", false, {}};
    auto entries = search_kl_equilibria(2, 4, Scheme::shapley, 3, 10);
    long best_l = 0;
    std::string found;
    for (const auto& e : entries) {
        if (!e.equilibrium) continue;
        found += "(" + std::to_string(e.k) + "," + std::to_string(e.l) + ")";
        if (best_l == 0 || e.l < best_l) best_l = e.l;
    }
    Scalar ratio = Scalar(best_l) / Scalar(4);
    r.pass = best_l == 6 && ratio == Scalar::ratio(3, 2);
    r.measured = "equilibria " + found + ", min l=" + std::to_string(best_l) + ", ratio=" + ratio.str();
    return r;
}

CriterionResult c9(const VerifyOptions&) {
    CriterionResult r{9, "exhaustive PoS on (3,1,1,1,1,1), h=4", false, {}};
    GameSpec game(4, {3, 1, 1, 1, 1, 1});
    PoSReport s = price_of_stability(game, Scheme::shapley, PoSMode::exhaustive);
    PoSReport p = price_of_stability(game, Scheme::proportional, PoSMode::exhaustive);
    r.pass = s.pos && p.pos && *s.pos == Scalar(2) && *p.pos == Scalar(1);
    r.measured = "shapley PoS=" + (s.pos ? s.pos->str() : "undefined") +
                 ", proportional PoS=" + (p.pos ? p.pos->str() : "undefined");
    return r;
}

GameSpec random_atomic_game(Rng& rng, long n_min, long n_max) {
    const long h = uniform(rng, 3, 8);
    const long n = uniform(rng, n_min, n_max);
    std::vector<Scalar> stakes;
    for (long i = 0; i < n; ++i) stakes.push_back(Scalar(uniform(rng, 1, h - 1)));
    return GameSpec(h, std::move(stakes));
}

CriterionResult c10(const VerifyOptions& opt) {
    CriterionResult r{10, "proportional leximin construction is an optimal equilibrium", false, {}};
    Rng rng(opt.seed + 10);
    int failures = 0, games = 0;
    while (games < 50) {
        GameSpec game = random_atomic_game(rng, 2, 10);
        if (game.total_stake() < game.threshold()) continue;
        ++games;
        Partition p = construct_leximin_optimal(game);
        OptResult best = opt_atomic(game);
        bool ne = check_nash(p, game, Scheme::proportional, {{}, true}).equilibrium;
        if (!ne || static_cast<long>(winning_count(p, game)) != best.value) ++failures;
    }
    r.pass = failures == 0;
    r.measured = std::to_string(games) + " games, failures=" + std::to_string(failures);
    return r;
}

CriterionResult c11(const VerifyOptions& opt) {
    CriterionResult r{11, "water-filling vs grid and gradient oracles; split witness 6/11", false, {}};
    Rng rng(opt.seed + 11);
    double worst = 0;
    int failures = 0;
    for (int c = 0; c < 100; ++c) {
        const long m = uniform(rng, 1, 5);
        std::vector<Scalar> stakes;
        std::vector<double> md;
        for (long j = 0; j < m; ++j) {
            stakes.push_back(Scalar::ratio(uniform(rng, 100, 1000), 100));
            md.push_back(stakes.back().to_double());
        }
        Scalar budget = Scalar::ratio(uniform(rng, 1, 200), 100);
        double b = budget.to_double();
        double got = waterfill_proportional(stakes, budget).payoff.to_double();
        double grid = oracle::waterfill_grid(md, b, 1e-3);
        double reference = std::max(grid, oracle::waterfill_gradient(md, b));
        worst = std::max(worst, std::abs(got - reference));
        if (std::abs(got - reference) > 1e-6 || got < grid - 1e-9) ++failures;
    }
    GameSpec game(10, {6, 6, 6, 1, 1, 1, 1});
    Partition p{{Pool{{0, 1}, 0}, Pool{{2, 3, 4, 5, 6}, 0}}};
    Scalar witness = sybil_payoff(game, p, SybilStrategy{0, {{0, 5}, {1, 1}}}, Scheme::proportional).value;
    bool split = witness == Scalar::ratio(6, 11) && witness > Scalar::ratio(1, 2);
    r.pass = failures == 0 && split;
    r.measured = "max |waterfill-oracle|=" + fmt(worst) + ", failures=" + std::to_string(failures) +
                 ", witness payoff=" + witness.str();
    return r;
}

CriterionResult c12(const VerifyOptions& opt) {
    CriterionResult r{12, "Shapley oceanic equilibria resist Sybil splits", false, {}};
    Rng rng(opt.seed + 12);
    double worst = -1e9;
    int failures = 0;
    SybilOptions sybil;
    sybil.rewards.samples = opt.samples;
    sybil.rewards.seed = opt.seed;
    for (int g = 0; g < 20; ++g) {
        GameSpec game = random_oceanic_game(rng, false);
        OceanicConstruction built = construct_oceanic_equilibrium(game);
        for (const auto& audit : audit_sybil_proofness(game, built.partition, Scheme::shapley, sybil)) {
            double gain = (audit.best - audit.baseline).to_double();
            worst = std::max(worst, gain);
            if (gain > 1e-6) ++failures;
        }
    }
    r.pass = failures == 0;
    r.measured = "max gain=" + fmt(worst) + ", failures=" + std::to_string(failures);
    return r;
}

CriterionResult c13(const VerifyOptions& opt) {
    CriterionResult r{13, "proportional leximin equilibria are Sybil-vulnerable within the split bound", false, {}};
    Rng rng(opt.seed + 13);
    int games = 0, failures = 0, bound_violations = 0;
    while (games < 20) {
        GameSpec game = random_atomic_game(rng, 4, 10);
        const Scalar& h = game.threshold();
        if ((game.total_stake() / h).is_integer()) continue;
        if (opt_atomic(game).value < 2) continue;
        ++games;
        Partition p = construct_leximin_optimal(game);
        std::vector<Scalar> load;
        for (const auto& pool : p.pools) load.push_back(pool_stake(pool, game));
        const std::size_t top = std::max_element(load.begin(), load.end()) - load.begin();
        std::size_t low = top == 0 ? 1 : 0;
        for (std::size_t j = 0; j < load.size(); ++j)
            if (j != top && load[j] < load[low]) low = j;
        const Scalar& l1 = load[top];
        bool witnessed = false, audited = false;
        for (PlayerId i : p.pools[top].atomic) {
            const Scalar& a = game.stake(i);
            // two-pool witness: move x from the largest pool to the smallest
            Scalar l2 = load[low], delta = l1 - l2;
            Scalar bound = (l2 * (a + delta) + delta * delta) / (2 * l2 + 2 * delta - a);
            Scalar x = min(min(bound, l1 - h), a) / 2;
            Scalar baseline = a / l1;
            Scalar split = sybil_payoff(game, p, SybilStrategy{i, {{top, a - x}, {low, x}}}, Scheme::proportional).value;
            witnessed = witnessed || split > baseline;
            SybilAudit audit = sybil_best_response(game, p, i, Scheme::proportional);
            if (audit.verdict != SybilVerdict::vulnerable) continue;
            audited = true;
            for (const auto& [pool, s] : audit.strategy.allocations) {
                if (pool == top) continue;
                Scalar l2j = load[pool], dj = l1 - l2j;
                if (dj.sign() < 0) continue;
                Scalar bj = (l2j * (a + dj) + dj * dj) / (2 * l2j + 2 * dj - a);
                if (exceeds(s, bj, 1e-9)) ++bound_violations;
            }
        }
        if (!witnessed || !audited) ++failures;
    }
    r.pass = failures == 0 && bound_violations == 0;
    r.measured = std::to_string(games) + " games, failures=" + std::to_string(failures) +
                 ", allocations above bound=" + std::to_string(bound_violations);
    return r;
}

CriterionResult c14(const VerifyOptions&) {
    CriterionResult r{14, "prop-squares a=4, 17 unit players, h=5: PoS >= 2", false, {}};
    GameSpec game = two_valued_game(4, 5, 1, 17);
    PoSReport pos = price_of_stability(game, Scheme::prop_squares, PoSMode::exhaustive_by_type);
    r.pass = pos.best_equilibrium_w <= 2 && pos.best_equilibrium_w >= 1 && pos.opt.value == 4 && pos.pos &&
             *pos.pos >= Scalar(2);
    r.measured = "OPT=" + std::to_string(pos.opt.value) + ", best W=" + std::to_string(pos.best_equilibrium_w) +
                 ", equilibria=" + std::to_string(pos.equilibria) + ", PoS=" + (pos.pos ? pos.pos->str() : "undefined");
    return r;
}

CriterionResult c15(const VerifyOptions&) {
    CriterionResult r{15, "square-root scheme: construction and unit-split attack", false, {}};
    bool ok = true;
    for (auto [a, h] : std::vector<std::pair<long, long>>{{4, 6}, {4, 9}, {9, 12}}) {
        const long nb = a + 1;
        const long root = std::lround(std::sqrt(static_cast<double>(a)));
        std::string entry = "(" + std::to_string(a) + "," + std::to_string(h) + "):";
        // constructed equilibrium
        const long kc = static_cast<long>(ceil_int(Scalar(h) - sqrt(Scalar(a)) + 1));
        GameSpec game = two_valued_game(a, h, nb, h * h + nb * kc + h);
        try {
            AtomicConstruction built = construct_sqrt_kl_equilibrium(game);
            bool ne = check_nash(built.partition, game, Scheme::prop_sqrt, {{}, true}).equilibrium;
            bool small = max_pool_stake(built.partition, game) <= 2.0 * static_cast<double>(h);
            ok = ok && ne && small;
            entry += std::string(ne ? "NE" : "not NE") + (small ? "" : ",pool>2h");
        } catch (const PremiseError& e) {
            ok = false;
            entry += e.what();
        }
        // attack instance: type A pools of k = ceil(h - sqrt(a) - 1), small pools of exactly h
        const long k = static_cast<long>(ceil_int(Scalar(h) - sqrt(Scalar(a)) - 1));
        GameSpec attack = two_valued_game(a, h, nb, nb * k + h * h);
        Partition p = kl_partition(attack, k, h + 1);
        std::vector<std::pair<std::size_t, Scalar>> units;
        for (long j = 1; j <= a; ++j) units.emplace_back(static_cast<std::size_t>(j), Scalar(1));
        Scalar payoff = sybil_payoff(attack, p, SybilStrategy{0, units}, Scheme::prop_sqrt).value;
        Scalar expected = Scalar(a) / Scalar(root + h - root);
        Scalar baseline = allocate_rewards(p, attack, Scheme::prop_sqrt).atomic[0];
        Scalar claimed = Scalar(root) / Scalar(root + h - root - 1);
        bool attack_ok = near(payoff, expected, 1e-9) && near(baseline, claimed, 1e-9) && exceeds(payoff, baseline, 1e-9);
        ok = ok && attack_ok;
        entry += ",attack " + payoff.decimal(6) + " vs " + baseline.decimal(6) + " ";
        r.measured += entry;
    }
    r.pass = ok;
    return r;
}

CriterionResult c16(const VerifyOptions&) {
    CriterionResult r{16, "large player split into h-sized avatars never gains", false, {}};
    bool ok = true;
    for (long lambda : {2L, 3L}) {
        for (long m : {2L, 3L, 4L}) {
            SplitAnalysis s = big_player_split_analysis(Scalar(lambda), 1, Scalar::ratio(4, 3), m, 1e-9);
            const bool k_is_h = near(s.k, Scalar(1), 1e-9);
            const bool bounded = at_least(s.solo, s.split_shapley, 1e-9);
            ok = ok && bounded && (s.equality == k_is_h) && at_least(s.solo, s.split_proportional, 1e-9);
            r.measured += "L" + std::to_string(lambda) + "m" + std::to_string(m) + "=" + s.split_shapley.decimal(6) + " ";
        }
    }
    r.pass = ok;
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options, const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& progress) {
    using Fn = CriterionResult (*)(const VerifyOptions&);
    static const Fn all[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14, c15, c16};
    std::vector<CriterionResult> out;
    for (int id = 1; id <= 16; ++id) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
        CriterionResult r;
        try {
            r = all[id - 1](options);
        } catch (const std::exception& e) {
            r.id = id;
            r.pass = false;
            r.measured = std::string("error: ") + e.what();
        }
        if (progress) progress(r);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace stakepool::verify
