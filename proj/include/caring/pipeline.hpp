#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caring/generator/denoiser.hpp"
#include "caring/generator/train.hpp"
#include "caring/guidance.hpp"
#include "caring/metrics.hpp"
#include "caring/session.hpp"
#include "caring/smoothing.hpp"

namespace caring {

struct GenerationOptions {
  std::uint64_t seed = 0;
  std::size_t blend_length = kDefaultBlendLength;
  double guidance_scale = 2.5;
  StrengthSchedule schedule = StrengthSchedule::ramp;
};

struct GenerationResult {
  /// Step clips concatenated as sampled and guided.
  MotionClip naive;
  /// Final motion: the same clips stitched with sigmoid transitions.
  MotionClip motion;
  MetricsReport report;
  std::vector<std::string> warnings;
};

/// Sampling seed for one plan step; distinct steps get unrelated streams.
std::uint64_t step_seed(std::uint64_t seed, std::size_t step_index);

/// Last frame of each step that carries a target keypoint.
std::optional<SpatialSpec> plan_spatial_spec(const GenerationPlan& plan);

/**
 * Generates every plan step independently, pulls each root onto its path
 * (previous step's end, the step's trajectory slice, then its target object),
 * stitches the steps, re-pins target keypoints and scores naive against
 * the result.
 *
 * Hands-only steps keep the root fixed at the end of that path. Steps with
 * neither path nor target start where the previous one ended, unguided.
 * Deterministic for a given plan, denoiser and options.
 */
GenerationResult run_generation(const GenerationPlan& plan, const gen::Denoiser& denoiser,
                                const GenerationOptions& options = {});

/// Training recipe for the service's humanoid model.
gen::TrainConfig humanoid_train_config(int steps = 600, std::uint64_t seed = 11);
gen::SyntheticOptions humanoid_data_options();
gen::Denoiser train_humanoid_denoiser(int steps = 600, std::uint64_t seed = 11);

}  // namespace caring
