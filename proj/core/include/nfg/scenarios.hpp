#ifndef NFG_SCENARIOS_HPP
#define NFG_SCENARIOS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nfg/graph.hpp"

namespace nfg {

// Seeded synthetic SLAM problems. Measurements are simulated from ground
// truth with the declared noise; the same seed always produces the same
// world and the same measurement draws, and truncating with `steps` keeps
// the shared prefix of measurements intact.
struct ScenarioSpec {
  enum class Family { kPoseGraph, kRangeOnly, kMultiRobotRange, kAmbiguousRange };

  Family family = Family::kPoseGraph;
  std::uint64_t seed = 0;

  // Counts; 0 / -1 pick the family default.
  int poses = 0;   // per robot for the multi-robot family
  int robots = 0;
  int loops = -1;
  int steps = -1;  // emit the graph truncated at this time step; -1 = full

  // Noise scales. Zero is allowed: the measurement draw uses the requested
  // value while the declared sigma in the emitted file is floored at 1e-9.
  double odom_sigma_xy = 0.05;
  double odom_sigma_theta = 0.01;
  double range_sigma = 0.5;
};

ScenarioSpec::Family parse_family(const std::string& name);
std::string family_name(ScenarioSpec::Family family);

struct GeneratedScenario {
  FactorGraph graph;
  // All materialized defaults and world geometry, for the JSON sidecar.
  std::vector<std::pair<std::string, std::string>> metadata;
};

GeneratedScenario generate_scenario(const ScenarioSpec& spec);

}  // namespace nfg

#endif  // NFG_SCENARIOS_HPP
