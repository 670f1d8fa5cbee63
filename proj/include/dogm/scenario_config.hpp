#ifndef DOGM_SCENARIO_CONFIG_HPP_
#define DOGM_SCENARIO_CONFIG_HPP_

#include "dogm/dynamic_grid_filter.hpp"
#include "dogm/evaluation.hpp"
#include "dogm/simulator.hpp"

#include <string>

namespace dogm
{

/// Reads a scenario description (YAML). Unknown or malformed keys throw
/// ConfigError naming the key. Sensors default to default_radar_rig().
ScenarioSpec load_scenario(const std::string & path);
ScenarioSpec parse_scenario(const std::string & yaml_text);

/// Optional parameter overrides for a run.
struct ParameterOverrides
{
  FilterConfig filter;
  ClusteringParams clustering;
};

/// Applies the keys present in `yaml_text` on top of `base`.
/// Recognised sections: grid, filter, measurement, clustering, threads.
ParameterOverrides parse_overrides(const std::string & yaml_text, ParameterOverrides base);
ParameterOverrides load_overrides(const std::string & path, ParameterOverrides base);

}  // namespace dogm

#endif  // DOGM_SCENARIO_CONFIG_HPP_
