#pragma once

#include "stakepool/model.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stakepool::verify {

// Reference computations kept independent of the library's solvers.
namespace oracle {

// Shapley value of every member by summing over subsets of the others.
std::vector<Scalar> shapley_subsets(const std::vector<Scalar>& stakes, const Scalar& h);

// Shapley value of atomic member i in a pool with oceanic share k: integrates
// over the arrival time of i, with the others preceding independently.
double shapley_oceanic_quadrature(const std::vector<double>& stakes, double k, double h, std::size_t i);

// Largest number of pools of stake >= h over all set partitions (n <= 12).
long opt_partitions(const std::vector<Scalar>& stakes, const Scalar& h);

// Best proportional split of `budget` over pools of the given stakes: grid
// search with the given step, polished by projected gradient ascent.
double waterfill_grid(const std::vector<double>& stakes, double budget, double step);
double waterfill_gradient(const std::vector<double>& stakes, double budget, int iterations = 20000);

}  // namespace oracle

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string measured;
};

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::uint64_t samples = 1'000'000;
};

// Runs criteria in `ids` (all when empty), calling `progress` after each.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& options, const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& progress = {});

}  // namespace stakepool::verify
