#include "stakepool/verify.hpp"

#include "stakepool/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stakepool::verify::oracle {

std::vector<Scalar> shapley_subsets(const std::vector<Scalar>& stakes, const Scalar& h) {
    const std::size_t n = stakes.size();
    if (n > 16) throw CapacityError("subset oracle supports at most 16 members");
    std::vector<BigInt> fact(n + 1, 1);
    for (std::size_t i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    std::vector<Scalar> out(n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (mask >> i & 1u) continue;
            Scalar s = 0;
            std::size_t size = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (mask >> j & 1u) {
                    s += stakes[j];
                    ++size;
                }
            if (s < h && s + stakes[i] >= h)
                out[i] += Scalar(Rational(fact[size] * fact[n - size - 1], fact[n]));
        }
    }
    return out;
}

double shapley_oceanic_quadrature(const std::vector<double>& stakes, double k, double h, std::size_t i) {
    const std::size_t n = stakes.size();
    if (i >= n || n > 16) throw InputError("bad member index or too many members");
    const double a = stakes[i];
    double total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (mask >> i & 1u) continue;
        double s = 0;
        int before = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && (mask >> j & 1u)) {
                s += stakes[j];
                ++before;
            }
        const int after = static_cast<int>(n) - 1 - before;
        // pivotal when h - a <= s + k t < h
        double lo = std::clamp((h - a - s) / k, 0.0, 1.0);
        double hi = std::clamp((h - s) / k, 0.0, 1.0);
        if (hi <= lo) continue;
        auto density = [&](double t) { return std::pow(t, before) * std::pow(1 - t, after); };
        total += boost::math::quadrature::gauss<double, 20>::integrate(density, lo, hi);
    }
    return total;
}

long opt_partitions(const std::vector<Scalar>& stakes, const Scalar& h) {
    const std::size_t n = stakes.size();
    if (n > 12) throw CapacityError("partition oracle supports at most 12 players");
    if (n == 0) return 0;
    std::vector<std::size_t> rgs(n, 0), peak(n, 0);
    long best = 0;
    while (true) {
        std::size_t blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<Scalar> load(blocks, Scalar(0));
        for (std::size_t i = 0; i < n; ++i) load[rgs[i]] += stakes[i];
        long w = 0;
        for (const auto& x : load) w += x >= h ? 1 : 0;
        best = std::max(best, w);
        // next restricted growth string
        std::size_t i = n - 1;
        while (i > 0 && rgs[i] > peak[i - 1]) --i;
        if (i == 0) break;
        ++rgs[i];
        for (std::size_t j = i + 1; j < n; ++j) rgs[j] = 0;
        for (std::size_t j = i; j < n; ++j) peak[j] = std::max(peak[j - 1], rgs[j]);
    }
    return best;
}

namespace {

double payoff(const std::vector<double>& m, const std::vector<double>& s) {
    double v = 0;
    for (std::size_t j = 0; j < m.size(); ++j) v += s[j] / (m[j] + s[j]);
    return v;
}

// Euclidean projection onto {s >= 0, sum s = budget}.
std::vector<double> project(std::vector<double> v, double budget) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0, theta = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cumulative += u[j];
        double t = (cumulative - budget) / static_cast<double>(j + 1);
        if (u[j] - t > 0) theta = t;
    }
    for (auto& x : v) x = std::max(0.0, x - theta);
    return v;
}

}  // namespace

double waterfill_grid(const std::vector<double>& m, double budget, double step) {
    const std::size_t units = static_cast<std::size_t>(std::floor(budget / step + 1e-9));
    std::vector<double> best(units + 1, 0.0);
    for (double mj : m) {
        std::vector<double> next(units + 1, 0.0);
        for (std::size_t b = 0; b <= units; ++b)
            for (std::size_t u = 0; u <= b; ++u) {
                double s = static_cast<double>(u) * step;
                next[b] = std::max(next[b], best[b - u] + s / (mj + s));
            }
        best = std::move(next);
    }
    return best[units];
}

double waterfill_gradient(const std::vector<double>& m, double budget, int iterations) {
    const std::size_t n = m.size();
    std::vector<double> s(n, budget / static_cast<double>(n));
    double smallest = *std::min_element(m.begin(), m.end());
    double eta = smallest / 2;  // gradient is Lipschitz with constant 2 / min m
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> g(n);
        for (std::size_t j = 0; j < n; ++j) g[j] = s[j] + eta * m[j] / ((m[j] + s[j]) * (m[j] + s[j]));
        s = project(std::move(g), budget);
    }
    return payoff(m, s);
}

}  // namespace stakepool::verify::oracle
