#include "stakepool/errors.hpp"
#include "stakepool/verify.hpp"
#include "stakepool/welfare.hpp"

#include <doctest.h>

#include <random>

using namespace stakepool;
namespace oracle = stakepool::verify::oracle;

TEST_CASE("opt examples") {
    CHECK(opt_atomic(GameSpec(4, {3, 1, 1, 1, 1, 1})).value == 2);
    CHECK(opt_atomic(GameSpec(4, {1, 1})).value == 0);
    std::vector<Scalar> squares{4};
    squares.resize(17, Scalar(1));
    CHECK(opt_atomic(GameSpec(5, squares)).value == 4);
    CHECK(opt_oceanic(GameSpec(3, {2}, 14)).value == 5);
    CHECK(opt_oceanic(GameSpec(3, {}, 10)).value == 3);
    CHECK(opt_oceanic(GameSpec(3, {2}, Scalar::ratio(1, 2))).value == 0);
    CHECK(opt(GameSpec(3, {2}, 14)).value == 5);
}

TEST_CASE("opt witness is feasible and bounded by total / h") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const long h = std::uniform_int_distribution<long>(2, 8)(rng);
        const long n = std::uniform_int_distribution<long>(1, 10)(rng);
        std::vector<Scalar> stakes;
        Scalar total = 0;
        for (long i = 0; i < n; ++i) {
            stakes.push_back(Scalar::ratio(std::uniform_int_distribution<long>(1, 2 * h - 1)(rng), 2));
            total += stakes.back();
        }
        GameSpec game(h, stakes);
        OptResult r = opt_atomic(game);
        CHECK(r.value == oracle::opt_partitions(stakes, h));
        CHECK(r.value <= floor_int(total / Scalar(h)));
        if (r.value == 0) continue;
        REQUIRE(r.witness);
        CHECK(validate_partition(*r.witness, game).valid());
        CHECK(winning_count(*r.witness, game) == static_cast<std::size_t>(r.value));
    }
}

TEST_CASE("opt_oceanic equals opt_atomic with the ocean as unit players") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 30; ++trial) {
        const long h = std::uniform_int_distribution<long>(2, 6)(rng);
        const long n = std::uniform_int_distribution<long>(0, 4)(rng);
        const long ocean = std::uniform_int_distribution<long>(0, 6)(rng);
        std::vector<Scalar> stakes;
        for (long i = 0; i < n; ++i) stakes.push_back(Scalar(std::uniform_int_distribution<long>(1, h - 1)(rng)));
        std::vector<Scalar> units = stakes;
        units.resize(static_cast<std::size_t>(n + ocean), Scalar(1));
        if (units.empty()) continue;
        CHECK(opt_oceanic(GameSpec(h, stakes, ocean)).value == opt_atomic(GameSpec(h, units)).value);
    }
}

TEST_CASE("winning_count") {
    GameSpec game(4, {3, 1, 1, 1, 1, 1});
    CHECK(winning_count(grand_coalition(game), game) == 1);
    Partition losing{{Pool{{0}, 0}, Pool{{1}, 0}, Pool{{2}, 0}, Pool{{3}, 0}, Pool{{4}, 0}, Pool{{5}, 0}}};
    CHECK(winning_count(losing, game) == 0);
}

TEST_CASE("price of stability examples") {
    GameSpec game(4, {3, 1, 1, 1, 1, 1});
    PoSReport s = price_of_stability(game, Scheme::shapley, PoSMode::exhaustive);
    REQUIRE(s.pos);
    CHECK(*s.pos == Scalar(2));
    PoSReport p = price_of_stability(game, Scheme::proportional, PoSMode::exhaustive);
    CHECK(*p.pos == Scalar(1));
    CHECK(parse_pos_mode("constructive") == PoSMode::constructive);
    CHECK_THROWS_AS(parse_pos_mode("fast"), InputError);
}

TEST_CASE("squares lower-bound instance") {
    std::vector<Scalar> stakes{4};
    stakes.resize(17, Scalar(1));
    PoSReport r = price_of_stability(GameSpec(5, stakes), Scheme::prop_squares, PoSMode::exhaustive_by_type);
    REQUIRE(r.pos);
    CHECK(*r.pos >= Scalar(2));
}

TEST_CASE("PoS of proportional is 1 and exhaustive never exceeds the constructive bound") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 15; ++trial) {
        const long h = std::uniform_int_distribution<long>(3, 5)(rng);
        const long n = std::uniform_int_distribution<long>(3, 8)(rng);
        std::vector<Scalar> stakes;
        for (long i = 0; i < n; ++i) stakes.push_back(Scalar(std::uniform_int_distribution<long>(1, h - 1)(rng)));
        GameSpec game(h, stakes);
        PoSReport p = price_of_stability(game, Scheme::proportional, PoSMode::exhaustive);
        if (!p.pos) continue;
        CHECK(*p.pos == Scalar(1));
        PoSReport c = price_of_stability(game, Scheme::proportional, PoSMode::constructive);
        REQUIRE(c.pos);
        CHECK(c.upper_bound);
        CHECK(*p.pos <= *c.pos);
    }
}
