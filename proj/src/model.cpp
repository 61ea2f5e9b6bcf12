#include "stakepool/model.hpp"

#include "stakepool/errors.hpp"

#include <algorithm>
#include <sstream>

namespace stakepool {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::shapley: return "shapley";
        case Scheme::proportional: return "proportional";
        case Scheme::prop_squares: return "prop_squares";
        case Scheme::prop_sqrt: return "prop_sqrt";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::shapley, Scheme::proportional, Scheme::prop_squares, Scheme::prop_sqrt})
        if (to_string(s) == name) return s;
    throw InputError("unknown scheme '" + std::string(name) +
                     "' (expected shapley, proportional, prop_squares or prop_sqrt)");
}

bool atomic_only(Scheme s) { return s == Scheme::prop_squares || s == Scheme::prop_sqrt; }

GameSpec::GameSpec(Scalar threshold, std::vector<Scalar> atomic_stakes, Scalar oceanic_mass,
                   double tolerance)
    : threshold_(std::move(threshold)),
      stakes_(std::move(atomic_stakes)),
      oceanic_(std::move(oceanic_mass)),
      tolerance_(tolerance) {
    if (threshold_.sign() <= 0) throw InputError("threshold must be positive");
    if (oceanic_.sign() < 0) throw InputError("oceanic mass must be nonnegative");
    if (!(tolerance_ >= 0)) throw InputError("tolerance must be nonnegative");
    bool exact = threshold_.is_exact() && oceanic_.is_exact();
    for (std::size_t i = 0; i < stakes_.size(); ++i) {
        const Scalar& a = stakes_[i];
        if (a.sign() <= 0)
            throw InputError("stake of player " + std::to_string(i + 1) + " must be positive");
        if (a >= threshold_)
            throw InputError("stake of player " + std::to_string(i + 1) + " (" + a.str() +
                             ") is not below the threshold " + threshold_.str() +
                             "; see big_player_split_analysis for players who can run pools alone");
        exact = exact && a.is_exact();
    }
    arithmetic_ = exact ? Arithmetic::exact : Arithmetic::floating;
}

const Scalar& GameSpec::stake(PlayerId i) const {
    if (i >= stakes_.size()) throw InputError("unknown player id " + std::to_string(i + 1));
    return stakes_[i];
}

Scalar GameSpec::total_stake() const {
    Scalar total = oceanic_;
    for (const auto& a : stakes_) total += a;
    return total;
}

Scalar Composition::stake() const {
    Scalar total = oceanic;
    for (const auto& a : atomic) total += a;
    return total;
}

Composition composition(const Pool& pool, const GameSpec& game) {
    Composition c;
    c.atomic.reserve(pool.atomic.size());
    for (PlayerId i : pool.atomic) c.atomic.push_back(game.stake(i));
    c.oceanic = pool.oceanic;
    return c;
}

Scalar pool_stake(const Pool& pool, const GameSpec& game) { return composition(pool, game).stake(); }

bool is_winning(const Scalar& stake, const Scalar& threshold, double tol) {
    return at_least(stake, threshold, tol);
}

int rho(const Pool& pool, const GameSpec& game) {
    return is_winning(pool_stake(pool, game), game.threshold(), game.tolerance()) ? 1 : 0;
}

ValidationReport validate_partition(const Partition& partition, const GameSpec& game) {
    ValidationReport report;
    std::vector<int> seen(game.player_count(), -1);
    Scalar ocean = 0;
    for (std::size_t p = 0; p < partition.pools.size(); ++p) {
        const Pool& pool = partition.pools[p];
        bool known = true;
        for (PlayerId i : pool.atomic) {
            if (i >= game.player_count()) {
                report.problems.push_back("pool " + std::to_string(p + 1) + ": unknown player id " +
                                          std::to_string(i + 1));
                known = false;
                continue;
            }
            if (seen[i] >= 0)
                report.problems.push_back("overlap: player " + std::to_string(i + 1) + " in pools " +
                                          std::to_string(seen[i] + 1) + " and " +
                                          std::to_string(p + 1));
            else
                seen[i] = static_cast<int>(p);
        }
        if (pool.oceanic.sign() < 0)
            report.problems.push_back("pool " + std::to_string(p + 1) + ": negative oceanic share");
        ocean += pool.oceanic;
        if (known && !rho(pool, game)) report.losing_pools.push_back(p);
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i] < 0)
            report.problems.push_back("coverage: player " + std::to_string(i + 1) + " is in no pool");
    if (!near(ocean, game.oceanic_mass(), game.tolerance()))
        report.problems.push_back("mass: oceanic shares sum to " + ocean.str() + ", expected " +
                                  game.oceanic_mass().str());
    return report;
}

void require_valid(const Partition& partition, const GameSpec& game) {
    auto report = validate_partition(partition, game);
    if (!report.valid()) {
        std::string msg = "invalid partition:";
        for (const auto& p : report.problems) msg += " " + p + ";";
        throw InputError(msg);
    }
}

Partition grand_coalition(const GameSpec& game) {
    Pool pool;
    for (PlayerId i = 0; i < game.player_count(); ++i) pool.atomic.push_back(i);
    pool.oceanic = game.oceanic_mass();
    return Partition{{pool}};
}

std::string describe(const Partition& partition) {
    std::ostringstream out;
    out << '[';
    for (std::size_t p = 0; p < partition.pools.size(); ++p) {
        const Pool& pool = partition.pools[p];
        if (p) out << ", ";
        out << '{';
        for (std::size_t j = 0; j < pool.atomic.size(); ++j) out << (j ? "," : "") << pool.atomic[j] + 1;
        out << '}';
        if (!pool.oceanic.is_zero()) out << '+' << pool.oceanic.str();
    }
    out << ']';
    return out.str();
}

}  // namespace stakepool
