#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ictrl/config.hpp"
#include "ictrl/neutral.hpp"
#include "ictrl/quadrature.hpp"
#include "ictrl/synthesis.hpp"
#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Everything a subcommand needs, assembled from a validated config.
struct BuildResult {
  ImpulsiveSystem system;
  std::optional<NeutralSystem> neutral;
  QuadratureGrid grid;
  Vector target;
  ControlFn simulate_control;
  std::vector<Vector> simulate_impulse_controls;
  std::vector<std::string> warnings;
};

BuildResult build_from_config(const RunConfig& config);

/// Executes one subcommand (simulate | gramian | synthesize | verify |
/// sweep | figures), writing CSV outputs into the configured directory.
/// `jobs` parallelizes sweep rows.  Throws on failure; callers map
/// exception types to exit codes.
void run_command(const std::string& command, const RunConfig& config,
                 int jobs = 1);

}  // namespace ictrl
