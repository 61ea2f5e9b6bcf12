#pragma once

#include "stakepool/model.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace stakepool {

// JSON scenario:
//   { "threshold": 4, "atomic_stakes": [3, 1, 1], "oceanic_mass": 0,
//     "scheme": "shapley", "partition": [{"atomic": [1, 2], "oceanic": 0}] }
// Numbers may also be given as strings "p/q". "arithmetic": "float" keeps
// every number as a double instead of its exact decimal value.
struct Scenario {
    GameSpec game;
    std::optional<Partition> partition;
    std::optional<Scheme> scheme;
};

Scenario parse_scenario(std::string_view text, double tolerance = default_tolerance);
std::string serialize_scenario(const Scenario& scenario);

}  // namespace stakepool
