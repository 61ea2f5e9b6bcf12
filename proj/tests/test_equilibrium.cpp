#include "stakepool/equilibrium.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/welfare.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace stakepool;

namespace {

double max_pool_stake(const Partition& p, const GameSpec& game) {
    double m = 0;
    for (const auto& pool : p.pools) m = std::max(m, pool_stake(pool, game).to_double());
    return m;
}

GameSpec example_pos() { return GameSpec(4, {3, 1, 1, 1, 1, 1}); }

}  // namespace

TEST_CASE("large player leaves (3,1) for (1,1,1,1)") {
    GameSpec game = example_pos();
    Partition p{{Pool{{0, 1}, 0}, Pool{{2, 3, 4, 5}, 0}}};
    NashReport r = check_nash(p, game, Scheme::shapley);
    CHECK_FALSE(r.equilibrium);
    bool found = false;
    for (const auto& d : r.deviations)
        if (d.who.kind == Mover::Kind::atomic && d.who.id == 0 && d.to == std::optional<std::size_t>(1)) {
            CHECK(d.before == Scalar::ratio(1, 2));
            CHECK(d.after == Scalar::ratio(3, 5));
            found = true;
        }
    CHECK(found);
}

TEST_CASE("grand coalition is an equilibrium under every scheme") {
    GameSpec game = example_pos();
    for (Scheme s : {Scheme::shapley, Scheme::proportional, Scheme::prop_squares, Scheme::prop_sqrt})
        CHECK(check_nash(grand_coalition(game), game, s).equilibrium);
}

TEST_CASE("check_nash rejects losing pools") {
    GameSpec game = example_pos();
    Partition p{{Pool{{0}, 0}, Pool{{1, 2, 3, 4, 5}, 0}}};
    CHECK_THROWS_AS(check_nash(p, game, Scheme::shapley), PremiseError);
}

TEST_CASE("oceanic k-l conditions") {
    GameSpec game(3, {2, 2, 2}, 14);
    CHECK(oceanic_kl_conditions({2, 4, {2, 2, 2}}, game).pass());
    CHECK_FALSE(oceanic_kl_conditions({2, 5, {2, 2, 2}}, game).pass());
    Partition p = oceanic_kl_partition(game, {2, 2, 2}, 4, 2);
    CHECK(check_nash(p, game, Scheme::shapley).equilibrium);
    CHECK(winning_count(p, game) == 5);
}

TEST_CASE("oceanic constructor") {
    GameSpec game(3, {2, 2, 2}, 14);
    OceanicConstruction c = construct_oceanic_equilibrium(game, Scalar(4));
    for (const auto& k : c.params.per_player_k) CHECK(k == Scalar(2));
    CHECK(check_nash(c.partition, game, Scheme::shapley).equilibrium);

    GameSpec unit(1, {Scalar::ratio(2, 3)}, Scalar::ratio(2, 3) + Scalar::ratio(8, 3));
    OceanicConstruction u = construct_oceanic_equilibrium(unit, Scalar::ratio(4, 3));
    CHECK(u.params.per_player_k[0] == Scalar::ratio(2, 3));
    CHECK(pool_stake(u.partition.pools[0], unit) == Scalar::ratio(4, 3));

    GameSpec boundary(1, {Scalar::ratio(1, 4)}, 1);
    CHECK(construct_oceanic_equilibrium(boundary, Scalar::ratio(4, 3)).params.per_player_k[0] == Scalar(1));

    GameSpec small(5, {1}, 40);
    CHECK_THROWS_AS(construct_oceanic_equilibrium(small), PremiseError);
}

TEST_CASE("oceanic constructor output is an equilibrium with pools at most 4h/3 + slack") {
    std::mt19937_64 rng(3);
    const Scalar h = 3;
    const Scalar choices[] = {Scalar::ratio(11, 4), Scalar::ratio(39, 16), Scalar(2), Scalar::ratio(23, 16)};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Scalar> stakes;
        Scalar mass = Scalar(std::uniform_int_distribution<long>(0, 3)(rng)) * 4;
        const long n = std::uniform_int_distribution<long>(1, 3)(rng);
        for (long i = 0; i < n; ++i) {
            stakes.push_back(choices[std::uniform_int_distribution<long>(0, 3)(rng)]);
            mass += sqrt(Scalar(4) * (h - stakes.back()));
        }
        GameSpec game(h, stakes, mass);
        OceanicConstruction c = construct_oceanic_equilibrium(game);
        CHECK(check_nash(c.partition, game, Scheme::shapley).equilibrium);
        CHECK(oceanic_kl_conditions(c.params, game).pass());
        CHECK(max_pool_stake(c.partition, game) <= 4.0 + 1e-9);
    }
}

TEST_CASE("f_function, premium and kstar") {
    CHECK(f_function(2.0 / 3, 1) == doctest::Approx(0).epsilon(1e-12).scale(1));
    for (int i = 1; i <= 200; i += 7)
        for (int j = 1; j <= 200; j += 7) CHECK(f_function(i / 200.0, j / 200.0) >= -1e-12);
    CHECK(shapley_premium(2.0 / 3) == doctest::Approx(0).scale(1));
    CHECK(shapley_premium(1) == doctest::Approx(0.05));
    CHECK(kstar(3, 4) == doctest::Approx(std::sqrt(3.0)));
    CHECK(kstar(2, 4) == doctest::Approx((1 + std::sqrt(17.0)) / 2));
    for (int h = 3; h <= 20; ++h)
        for (int a = 2; a < h; ++a)
            if (h <= a * a - 2 * a + 2) CHECK(kstar(a, h) <= h - 2 + 1e-12);
}

TEST_CASE("atomic k-l conditions") {
    CHECK(atomic_kl_conditions(2, 6, 2, 4).pass());
    CHECK_FALSE(atomic_kl_conditions(2, 5, 2, 4).pass());
    CHECK(atomic_kl_conditions(3, 6, 2, 4).pass());
    CHECK(atomic_kl_conditions(2, 6, 2, 4).verdict == "sufficient-pass");
}

TEST_CASE("atomic constructor") {
    GameSpec case2(4, [] {
        std::vector<Scalar> s{2};
        s.resize(80, Scalar(1));
        return s;
    }());
    AtomicConstruction c = construct_atomic_kl_equilibrium(case2);
    CHECK(c.k == 3);
    CHECK(c.l == 6);
    CHECK(check_nash(c.partition, case2, Scheme::shapley).equilibrium);
    CHECK(max_pool_stake(c.partition, case2) <= 8);

    GameSpec case1(4, [] {
        std::vector<Scalar> s{3};
        s.resize(80, Scalar(1));
        return s;
    }());
    AtomicConstruction d = construct_atomic_kl_equilibrium(case1);
    CHECK(d.k == 2);
    CHECK(d.l == 7);
    CHECK(check_nash(d.partition, case1, Scheme::shapley).equilibrium);
}

TEST_CASE("search finds l = 3h/2 for h=4, a=2") {
    auto entries = search_kl_equilibria(2, 4, Scheme::shapley, 3, 10);
    long best = 100;
    for (const auto& e : entries)
        if (e.equilibrium) best = std::min(best, e.l);
    CHECK(best == 6);
}

TEST_CASE("sqrt k-l conditions and constructor") {
    CHECK_FALSE(sqrt_kl_conditions(4, 5, 2, 4).pass());
    CHECK(sqrt_kl_conditions(4, 6, 2, 4).pass());
    CHECK(sqrt_kl_conditions(4, 6, 4, 5).pass());  // k = l - sqrt(a) exactly
    GameSpec game(4, [] {
        std::vector<Scalar> s{2, 2};
        s.resize(80, Scalar(1));
        return s;
    }());
    AtomicConstruction c = construct_sqrt_kl_equilibrium(game);
    CHECK(c.l == 6);
    CHECK(c.k == 4);
    CHECK(check_nash(c.partition, game, Scheme::prop_sqrt).equilibrium);
    CHECK(max_pool_stake(c.partition, game) <= 8);
}

TEST_CASE("leximin construction") {
    GameSpec game = example_pos();
    Partition p = construct_leximin_optimal(game);
    CHECK(winning_count(p, game) == 2);
    CHECK(check_nash(p, game, Scheme::proportional).equilibrium);

    GameSpec ocean(3, {2}, 14);
    Partition q = construct_leximin_optimal(ocean);
    CHECK(winning_count(q, ocean) == 5);
    CHECK(check_nash(q, ocean, Scheme::proportional).equilibrium);
}

TEST_CASE("enumerate_equilibria on the PoS example") {
    GameSpec game = example_pos();
    auto shapley = enumerate_equilibria(game, Scheme::shapley);
    REQUIRE(shapley.size() == 1);
    CHECK(shapley[0].winning == 1);
    auto prop = enumerate_equilibria(game, Scheme::proportional);
    CHECK(prop.front().winning == 2);
    CHECK(enumerate_equilibria(GameSpec(4, {1, 1}), Scheme::shapley).empty());
}

TEST_CASE("equilibria by type agree with labelled enumeration") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        const long h = std::uniform_int_distribution<long>(3, 5)(rng);
        const long n = std::uniform_int_distribution<long>(4, 8)(rng);
        std::vector<Scalar> stakes;
        for (long i = 0; i < n; ++i)
            stakes.push_back(Scalar(std::uniform_int_distribution<long>(1, 2)(rng) == 1 ? 1 : h - 1));
        GameSpec game(h, stakes);
        for (Scheme s : {Scheme::shapley, Scheme::proportional}) {
            std::multiset<std::size_t> a, b;
            for (const auto& e : enumerate_equilibria(game, s)) a.insert(e.winning);
            for (const auto& e : enumerate_equilibria_by_type(game, s)) b.insert(e.winning);
            // labelled enumeration contains every type representative, possibly repeated
            CHECK(std::set<std::size_t>(a.begin(), a.end()) == std::set<std::size_t>(b.begin(), b.end()));
            CHECK(a.size() >= b.size());
        }
    }
}

TEST_CASE("oceanic conditions agree with check_nash") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const Scalar h = 3;
        const Scalar l = Scalar::ratio(std::uniform_int_distribution<long>(13, 24)(rng), 4);
        const Scalar a = Scalar::ratio(std::uniform_int_distribution<long>(5, 11)(rng), 4);
        Scalar k = min(h, max(h - a, Scalar::ratio(std::uniform_int_distribution<long>(1, 16)(rng), 4)));
        if (trial % 3 == 0) k = sqrt(l * (h - a));  // on the equality curve when exact
        if (!k.is_exact() || k > h) continue;
        GameSpec game(h, {a}, k + 2 * l);
        KLParams params{k, l, {k}};
        Partition p = oceanic_kl_partition(game, {k}, l, 2);
        CHECK(oceanic_kl_conditions(params, game).pass() == check_nash(p, game, Scheme::shapley).equilibrium);
    }
}
