#include "stakepool/errors.hpp"
#include "stakepool/model.hpp"
#include "stakepool/scenario.hpp"

#include <doctest.h>

using namespace stakepool;

TEST_CASE("GameSpec validates its inputs") {
    CHECK_NOTHROW(GameSpec(4, {3, 1, 1, 1, 1, 1}));
    CHECK_THROWS_AS(GameSpec(0, {1}), InputError);
    CHECK_THROWS_AS(GameSpec(4, {0}), InputError);
    CHECK_THROWS_AS(GameSpec(4, {1}, -1), InputError);
    try {
        GameSpec(4, {5});
        FAIL("stake above h accepted");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("big_player_split_analysis") != std::string::npos);
    }
}

TEST_CASE("pool stake, winning and rho") {
    GameSpec game(3, {2, 2}, 6);
    Pool pool{{0}, 2};
    CHECK(pool_stake(pool, game) == Scalar(4));
    CHECK(rho(pool, game) == 1);
    CHECK(rho(Pool{{}, Scalar::ratio(5, 2)}, game) == 0);
    CHECK(is_winning(Scalar(3), Scalar(3), 1e-9));
}

TEST_CASE("validate_partition reports every problem") {
    GameSpec game(3, {2, 2}, 6);
    Partition ok{{Pool{{0}, 2}, Pool{{1}, 2}, Pool{{}, 2}}};
    CHECK(validate_partition(ok, game).valid());
    CHECK(validate_partition(ok, game).losing_pools == std::vector<std::size_t>{2});

    Partition overlap{{Pool{{0}, 3}, Pool{{0}, 3}}};
    ValidationReport r = validate_partition(overlap, game);
    CHECK_FALSE(r.valid());
    CHECK(r.problems.size() >= 2);  // player 1 twice, player 2 missing

    Partition unknown{{Pool{{0, 1, 7}, 6}}};
    CHECK_FALSE(validate_partition(unknown, game).valid());

    Partition short_mass{{Pool{{0, 1}, 5}}};
    CHECK_FALSE(validate_partition(short_mass, game).valid());
    CHECK_THROWS_AS(require_valid(short_mass, game), InputError);
}

TEST_CASE("grand coalition and describe") {
    GameSpec game(4, {3, 1}, Scalar::ratio(1, 2));
    Partition g = grand_coalition(game);
    CHECK(g.pools.size() == 1);
    CHECK(describe(g) == "[{1,2}+1/2]");
}

TEST_CASE("scenario parsing") {
    Scenario s = parse_scenario(R"({"threshold": 4, "atomic_stakes": [3, 1, 1, 1, 1, 1], "scheme": "shapley",
                                    "partition": [{"atomic": [1, 2]}, {"atomic": [3, 4, 5, 6]}]})");
    CHECK(s.game.player_count() == 6);
    CHECK(s.game.oceanic_mass().is_zero());
    REQUIRE(s.partition);
    CHECK(s.partition->pools[0].atomic == std::vector<PlayerId>{0, 1});
    CHECK(*s.scheme == Scheme::shapley);
}

TEST_CASE("scenario numbers: decimals are exact, p/q strings accepted, float mode") {
    Scenario s = parse_scenario(R"({"threshold": "10/3", "atomic_stakes": [0.1, "1/3"], "oceanic_mass": 4})");
    CHECK(s.game.threshold() == Scalar::ratio(10, 3));
    CHECK(s.game.stake(0) == Scalar::ratio(1, 10));
    CHECK(s.game.stake(1) == Scalar::ratio(1, 3));
    Scenario f = parse_scenario(R"({"threshold": 3, "atomic_stakes": [0.1], "arithmetic": "float"})");
    CHECK_FALSE(f.game.stake(0).is_exact());
    CHECK(f.game.arithmetic() == Arithmetic::floating);
}

TEST_CASE("scenario errors") {
    CHECK_THROWS_AS(parse_scenario(R"({"threshold": 3, "atomic_stakes": [1], "bogus": 1})"), InputError);
    CHECK_THROWS_AS(parse_scenario(R"({"atomic_stakes": [1]})"), InputError);
    CHECK_THROWS_AS(parse_scenario(R"({"threshold": 3, "atomic_stakes": [1], "scheme": "nope"})"), InputError);
    try {
        parse_scenario("{\n  \"threshold\": 3,\n  oops\n}");
        FAIL("syntax error accepted");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("scenario round trip") {
    const char* text = R"({"threshold": 3, "atomic_stakes": [2, "5/2"], "oceanic_mass": "7/2",
                           "partition": [{"atomic": [1], "oceanic": 2}, {"atomic": [2], "oceanic": "3/2"}]})";
    Scenario s = parse_scenario(text);
    Scenario back = parse_scenario(serialize_scenario(s));
    CHECK(back.game.stakes() == s.game.stakes());
    CHECK(back.game.oceanic_mass() == s.game.oceanic_mass());
    CHECK(describe(*back.partition) == describe(*s.partition));
    CHECK(serialize_scenario(back) == serialize_scenario(s));
}
