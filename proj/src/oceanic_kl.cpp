#include "stakepool/equilibrium.hpp"

#include "stakepool/errors.hpp"

#include <cmath>

namespace stakepool {

namespace {

std::string player_tag(std::size_t i) { return "player " + std::to_string(i + 1); }

std::vector<Scalar> k_values(const KLParams& params, const GameSpec& game) {
    if (params.per_player_k.empty()) return std::vector<Scalar>(game.player_count(), params.k);
    if (params.per_player_k.size() != game.player_count())
        throw InputError("per-player k must list one value per atomic player");
    return params.per_player_k;
}

}  // namespace

ConditionReport oceanic_kl_conditions(const KLParams& params, const GameSpec& game) {
    const Scalar& h = game.threshold();
    const double tol = game.tolerance();
    const Scalar& l = params.l;
    std::vector<Scalar> k = k_values(params, game);
    if (!at_least(l, h, tol)) throw PremiseError("pure-ocean pool size l must be at least h");
    for (std::size_t i = 0; i < k.size(); ++i) {
        const Scalar& a = game.stake(i);
        if (k[i].sign() <= 0 || !at_least(h, k[i], tol))
            throw PremiseError(player_tag(i) + ": k_i must lie in (0, h]");
        if (!at_least(a + k[i], h, tol)) throw PremiseError(player_tag(i) + ": a_i + k_i must reach h");
    }

    ConditionReport report;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const Scalar& a = game.stake(i);
        // h normalized to 1: (1 - a/h) / (k/h)^2 = 1 / (l/h)
        Scalar lhs = h * (h - a) / (k[i] * k[i]);
        Scalar rhs = h / l;
        report.conditions.push_back({"(6) " + player_tag(i), near(lhs, rhs, tol),
                                     "h(h-a)/k^2=" + lhs.decimal() + " h/l=" + rhs.decimal()});
        Scalar own = (k[i] + a - h) / k[i];
        report.conditions.push_back({"(7) " + player_tag(i), at_least(own, a / l, tol),
                                     "own=" + own.decimal() + " a/l=" + (a / l).decimal()});
    }
    for (std::size_t i = 0; i < k.size(); ++i) {
        Scalar own = (k[i] + game.stake(i) - h) / k[i];
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (i == j) continue;
            Composition joined{{game.stake(i), game.stake(j)}, k[j]};
            Scalar there = shapley_oceanic_closed(joined, h, tol).member[0];
            report.conditions.push_back({"(8) " + player_tag(i) + " into pool of " + player_tag(j),
                                         at_least(own, there, tol),
                                         "own=" + own.decimal() + " deviation=" + there.decimal()});
        }
    }
    report.verdict = report.pass() ? "pass" : "fail";
    return report;
}

Partition oceanic_kl_partition(const GameSpec& game, const std::vector<Scalar>& k, const Scalar& l,
                               std::size_t pure_pools) {
    if (k.size() != game.player_count()) throw InputError("need one k_i per atomic player");
    Partition partition;
    Scalar used = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        partition.pools.push_back(Pool{{i}, k[i]});
        used += k[i];
    }
    for (std::size_t p = 0; p < pure_pools; ++p) {
        partition.pools.push_back(Pool{{}, l});
        used += l;
    }
    // absorb float rounding so the shares add up to L exactly
    if (!used.is_exact() && !partition.pools.empty() && near(used, game.oceanic_mass(), game.tolerance()))
        partition.pools.back().oceanic += game.oceanic_mass() - used;
    return partition;
}

OceanicConstruction construct_oceanic_equilibrium(const GameSpec& game, std::optional<Scalar> l_opt,
                                                  double slack) {
    const Scalar& h = game.threshold();
    const double tol = game.tolerance();
    const bool default_l = !l_opt;
    const Scalar l = l_opt ? *l_opt : h * Scalar::ratio(4, 3);
    if (!at_least(l, h, tol)) throw PremiseError("pool size l must be at least h");
    const std::size_t n = game.player_count();

    auto ks_for = [&](const Scalar& size) {
        std::vector<Scalar> ks;
        for (std::size_t i = 0; i < n; ++i) {
            Scalar k = sqrt(size * (h - game.stake(i)));
            if (!at_least(h, k, tol)) {
                if (default_l)
                    throw PremiseError(player_tag(i) + ": stakes must lie in (h/4, h), got " + game.stake(i).str());
                throw PremiseError(player_tag(i) + ": needs a_i >= h - h^2/l for k_i <= h");
            }
            ks.push_back(k);
        }
        return ks;
    };
    auto sum = [](const std::vector<Scalar>& v) {
        Scalar s = 0;
        for (const auto& x : v) s += x;
        return s;
    };

    std::vector<Scalar> ks = ks_for(l);
    const Scalar& L = game.oceanic_mass();
    Scalar needed = sum(ks);
    if (n == 0) needed = h;
    if (!at_least(L, needed, tol))
        throw PremiseError("insufficient oceanic mass: need at least " + needed.decimal() + ", have " + L.decimal());

    Scalar residue = max(Scalar(0), L - sum(ks));
    long long pure = floor_int(residue / l + Scalar::real(tol));
    if (pure < 0) pure = 0;
    Scalar achieved = l;
    if (!near(Scalar(pure) * l, residue, tol)) {
        if (n == 0) {
            achieved = pure > 0 ? L / Scalar(pure) : L;
            if (pure == 0) pure = 1;
        } else {
            // grow l until p*l' + sum_i sqrt(l'(h - a_i)) = L
            auto g = [&](double x) {
                double s = static_cast<double>(pure) * x;
                for (std::size_t i = 0; i < n; ++i) s += std::sqrt(x * (h - game.stake(i)).to_double());
                return s;
            };
            const double target = L.to_double();
            double lo = l.to_double(), hi = lo;
            while (g(hi) < target) hi *= 2;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                double mid = 0.5 * (lo + hi);
                (g(mid) < target ? lo : hi) = mid;
            }
            achieved = Scalar::real(0.5 * (lo + hi));
        }
        double excess = (achieved - l).to_double();
        if (excess > slack + tol)
            throw PremiseError("oceanic mass does not split into pools of size l=" + l.decimal() +
                               "; the nearest construction uses l=" + achieved.decimal() + " (slack " +
                               Scalar::real(excess).decimal() + ")");
        ks = ks_for(achieved);
    }

    OceanicConstruction out;
    out.requested_l = l;
    out.pure_pools = static_cast<std::size_t>(pure);
    out.params.l = achieved;
    out.params.per_player_k = ks;
    out.params.k = ks.empty() ? Scalar(0) : ks.front();
    out.partition = oceanic_kl_partition(game, ks, achieved, out.pure_pools);
    return out;
}

double f_function(double ki, double kj) {
    if (!(ki > 0 && ki <= 1 && kj > 0 && kj <= 1)) throw PremiseError("f is defined on (0,1]^2");
    double v = 1 - 0.75 * ki - 9.0 / 32.0 * kj * kj;
    if (3 * ki * ki + 3 * kj * kj >= 4) {
        double t = 3 * ki * ki + 3 * kj * kj - 4;
        v += t * t / (32 * kj * kj);
    }
    if (3 * ki * ki <= 4 * kj) {
        double t = 3 * ki * ki - 4 * kj;
        v -= t * t / (32 * kj * kj);
    }
    return v;
}

double shapley_premium(double ki) {
    if (!(ki > 0 && ki <= 1)) throw PremiseError("shapley_premium needs k in (0, 1]");
    double t = 3 * ki - 2;
    return ki * t * t / (4 * (2 - ki) * (3 * ki + 2));
}

double kstar(double a, double h) {
    if (!(a >= 2 && a <= h - 1)) throw PremiseError("kstar needs 2 <= a <= h-1");
    double d = -3 * a * a + h * h + 2 * a * h - 2 * h + 2 * a + 1;
    if (d < 0) throw std::logic_error("negative discriminant on the kstar domain");
    return 0.5 * (std::sqrt(d) - a + h - 1);
}

}  // namespace stakepool
