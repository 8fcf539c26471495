#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "locc/report.hpp"
#include "locc/types.hpp"

namespace locc {

/// Knobs shared by the built-in scenarios; each scenario reads the subset
/// it cares about.
struct ScenarioOptions {
  double p = 0.1;                             // appendix-b
  std::array<double, 3> lambdas{0.7, 0.65, 0.6};  // explore-existence
  double l2 = 0.5;                            // nosol
  double l3 = 0.5;
  int dim = 4;                                // sweeps
  int q = 2;                                  // fan-sweep
  int trials = 100;
  int iters = 500;                            // explore-existence
  std::uint64_t seed = 1;
};

struct Scenario {
  std::string name;
  std::string summary;
  Json (*run)(const ScenarioOptions&, const Tolerances&);
};

/// Built-in scenarios runnable by name from the CLI.
const std::vector<Scenario>& scenario_registry();

/// nullptr when the name is unknown.
const Scenario* find_scenario(const std::string& name);

}  // namespace locc
