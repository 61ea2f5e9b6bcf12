#include "stakepool/equilibrium.hpp"
#include "stakepool/errors.hpp"
#include "stakepool/sybil.hpp"
#include "stakepool/verify.hpp"

#include <doctest.h>

#include <random>

using namespace stakepool;
namespace oracle = stakepool::verify::oracle;

namespace {

std::vector<double> to_doubles(const std::vector<Scalar>& xs) {
    std::vector<double> out;
    for (const auto& x : xs) out.push_back(x.to_double());
    return out;
}

Scalar own_payoff(const GameSpec& game, const Partition& p, PlayerId i, Scheme s) {
    return allocate_rewards(p, game, s).atomic[i];
}

}  // namespace

TEST_CASE("waterfill small cases") {
    Waterfill zero = waterfill_proportional({4, 5, 7}, 0);
    for (const auto& x : zero.allocation) CHECK(x == Scalar(0));
    CHECK(zero.payoff == Scalar(0));
    Waterfill one = waterfill_proportional({5}, 2);
    CHECK(one.allocation[0] == Scalar(2));
    CHECK(one.payoff == Scalar::ratio(2, 7));
    CHECK(one.payoff.is_exact());
    Waterfill w = waterfill_proportional({4, 5, 7}, 3);
    CHECK(w.payoff.to_double() == doctest::Approx(oracle::waterfill_gradient({4, 5, 7}, 3, 20000)).epsilon(1e-9));
    CHECK(w.payoff.to_double() > 0.5);  // beats the split (2,1,0)
}

TEST_CASE("waterfill matches the grid and gradient oracles") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const long m = std::uniform_int_distribution<long>(1, 4)(rng);
        std::vector<Scalar> pools;
        for (long j = 0; j < m; ++j) pools.push_back(Scalar::ratio(std::uniform_int_distribution<long>(10, 80)(rng), 10));
        const Scalar budget = Scalar::ratio(std::uniform_int_distribution<long>(0, 60)(rng), 10);
        Waterfill w = waterfill_proportional(pools, budget);
        const double value = w.payoff.to_double();
        const auto md = to_doubles(pools);
        CHECK(value >= oracle::waterfill_grid(md, budget.to_double(), 1e-2) - 1e-12);
        CHECK(value == doctest::Approx(oracle::waterfill_gradient(md, budget.to_double(), 20000)).epsilon(1e-6));
        // no single pool does better
        for (const auto& mj : pools) CHECK(w.payoff.to_double() >= (budget / (mj + budget)).to_double() - 1e-12);
        // common level on funded pools, the rest at or above it
        Scalar total = 0;
        for (std::size_t j = 0; j < pools.size(); ++j) {
            total += w.allocation[j];
            const double level = (pools[j] + w.allocation[j]).to_double() / std::sqrt(md[j]);
            if (w.allocation[j] > Scalar(0)) CHECK(level == doctest::Approx(w.level.to_double()).epsilon(1e-9));
            else CHECK(level >= w.level.to_double() - 1e-9);
        }
        CHECK(near(total, budget, 1e-9));
    }
}

TEST_CASE("identity strategy returns the partition payoff exactly") {
    GameSpec game(4, {3, 1, 1, 1, 1, 1});
    Partition p{{Pool{{0, 1}, 0}, Pool{{2, 3, 4, 5}, 0}}};
    for (Scheme s : {Scheme::shapley, Scheme::proportional, Scheme::prop_squares, Scheme::prop_sqrt})
        for (PlayerId i = 0; i < 6; ++i) {
            const std::size_t home = i < 2 ? 0 : 1;
            SybilStrategy id{i, {{home, game.stake(i)}}};
            CHECK(sybil_payoff(game, p, id, s).value == own_payoff(game, p, i, s));
        }
}

TEST_CASE("proportional split into a second pool") {
    GameSpec game(10, {6, 6, 6, 1, 1, 1, 1});
    Partition p{{Pool{{0, 1}, 0}, Pool{{2, 3, 4, 5, 6}, 0}}};
    SybilStrategy s{0, {{0, 5}, {1, 1}}};
    CHECK(sybil_payoff(game, p, s, Scheme::proportional).value == Scalar::ratio(6, 11));
    SybilAudit a = sybil_best_response(game, p, 0, Scheme::proportional);
    CHECK(a.verdict == SybilVerdict::vulnerable);
    CHECK(a.method == "exact-waterfill");
    CHECK(a.best > Scalar::ratio(1, 2));
}

TEST_CASE("sybil_payoff errors") {
    GameSpec game(4, {3, 1, 1, 1, 1, 1});
    Partition p{{Pool{{0, 1}, 0}, Pool{{2, 3, 4, 5}, 0}}};
    CHECK_THROWS_AS(sybil_payoff(game, p, SybilStrategy{0, {{7, 1}}}, Scheme::proportional), InputError);
    CHECK_THROWS_AS(sybil_payoff(game, p, SybilStrategy{0, {{1, -1}}}, Scheme::proportional), InputError);
    CHECK_THROWS_AS(sybil_payoff(game, p, SybilStrategy{0, {{1, 4}}}, Scheme::proportional), InputError);
}

TEST_CASE("threshold for moving x into the lighter pool") {
    std::mt19937_64 rng(41);
    const Scalar h = 10;
    for (int trial = 0; trial < 40; ++trial) {
        const Scalar l2 = Scalar::ratio(std::uniform_int_distribution<long>(100, 190)(rng), 10);
        const Scalar delta = Scalar::ratio(std::uniform_int_distribution<long>(1, 40)(rng), 10);
        const Scalar l1 = l2 + delta;
        const Scalar a = Scalar::ratio(std::uniform_int_distribution<long>(5, 95)(rng), 10);
        const Scalar filler = (l1 - a) / 2;
        if (filler >= h) continue;
        GameSpec game(h, {a, filler, filler, l2 / 2, l2 / 2});
        Partition p{{Pool{{0, 1, 2}, 0}, Pool{{3, 4}, 0}}};
        const Scalar baseline = a / l1;
        const Scalar bound = (l2 * (a + delta) + delta * delta) / (2 * l2 + 2 * delta - a);
        auto payoff = [&](const Scalar& x) {
            return sybil_payoff(game, p, SybilStrategy{0, {{0, a - x}, {1, x}}}, Scheme::proportional).value;
        };
        for (int step = 1; step <= 4; ++step) {
            Scalar x = min(a, bound) * Scalar::ratio(step, 4);
            if (l1 - x < h) continue;
            CHECK(payoff(x) >= baseline);
        }
        Scalar above = bound * Scalar::ratio(101, 100);
        if (above < a && l1 - above >= h) CHECK(payoff(above) < baseline);
    }
}

TEST_CASE("oceanic equilibrium resists sybil attacks") {
    GameSpec game(3, {2, 2, 2}, 14);
    Partition p = oceanic_kl_partition(game, {2, 2, 2}, 4, 2);
    for (const auto& audit : audit_sybil_proofness(game, p, Scheme::shapley)) {
        CHECK(audit.verdict == SybilVerdict::sybil_proof);
        CHECK(audit.best <= audit.baseline + Scalar::real(1e-6));
    }
}

TEST_CASE("two heavy players sharing a pool next to a pure ocean pool") {
    const Scalar h = 4;
    GameSpec game(h, {3, 3}, h);
    Partition p{{Pool{{0, 1}, 0}, Pool{{}, h}}};
    SybilAudit a = sybil_best_response(game, p, 0, Scheme::shapley);
    CHECK(a.verdict == SybilVerdict::vulnerable);
    SybilStrategy half{0, {{0, h / 2}, {1, 3 - h / 2}}};
    CHECK(sybil_payoff(game, p, half, Scheme::shapley).value > a.baseline);
}

TEST_CASE("concavity probe") {
    ConcavityReport prop = concavity_probe(Scheme::proportional, {{6, 6}, 0}, 10, 40);
    REQUIRE(prop.witness);
    CHECK(prop.witness->verified);
    CHECK(prop.witness->split > prop.witness->whole);
    CHECK(prop.violations == 0);
}

TEST_CASE("big player split") {
    SplitAnalysis one = big_player_split_analysis(2, 1, Scalar::ratio(4, 3), 1);
    CHECK(one.split_shapley == Scalar(2));
    CHECK(one.solo == Scalar(2));
    for (long m = 2; m <= 6; ++m) {
        SplitAnalysis s = big_player_split_analysis(3, 1, Scalar::ratio(4, 3), m);
        CHECK(s.split_shapley.to_double() <= 3 + 1e-12);
        CHECK(s.split_proportional.to_double() <= 3 + 1e-12);
        CHECK(s.equality == (near(s.k, Scalar(1), 1e-12)));
        const double k = std::sqrt(4.0 / 3 * (1 - 1.0 / m));
        const double each = k <= 1 ? (k - 1 + 1.0 / m) / k : 1.0 / m / k;
        CHECK(s.split_shapley.to_double() == doctest::Approx(3 * m * each));
    }
    CHECK_THROWS_AS(big_player_split_analysis(Scalar::ratio(3, 2), 1, Scalar::ratio(4, 3), 2), PremiseError);
}
