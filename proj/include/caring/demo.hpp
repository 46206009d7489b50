#pragma once

#include "caring/instructions.hpp"
#include "caring/session.hpp"

namespace caring {

/// Walking speed used for synthetic scan timestamps.
inline constexpr double kDemoWalkSpeed = 1.2;

/**
 * Synthetic scan for a scenario: a gently curving walk of `step_length_m`
 * per step, sampled every 0.25 m at kDemoWalkSpeed, and one final snapshot.
 * Each scenario object sits 0.2 m beside the path where the first step
 * mentioning it ends.
 */
ScanLog demo_scan_log(const Scenario& scenario, double step_length_m = 1.5);

/// Project with the scenario refined by the mock client, all steps in one
/// group and the demo scan ingested.
Project demo_project(const Scenario& scenario, const std::string& project_id = "demo");

}  // namespace caring
