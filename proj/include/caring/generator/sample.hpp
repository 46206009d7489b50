#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "caring/generator/assignment.hpp"
#include "caring/generator/denoiser.hpp"
#include "caring/generator/schedule.hpp"
#include "caring/motion.hpp"

namespace caring::gen {

inline constexpr double kDefaultGuidanceScale = 2.5;

/// Reported to SampleOptions::observer for every denoiser evaluation.
struct DenoiserCall {
  int t = 0;
  /// False for the null-embedding pass of classifier-free guidance.
  bool conditional = false;
  /// Exactly the condition matrix handed to the network.
  const Eigen::MatrixXd& conditions;
};

struct SampleOptions {
  double guidance_scale = kDefaultGuidanceScale;
  std::uint64_t seed = 0;
  /// Ground-plane start of the integrated root path.
  Vec2 origin{};
  std::function<void(const DenoiserCall&)> observer;
  std::size_t hard_cap = kHardFrameCap;
};

/// Ancestral DDPM sampling with per-frame conditions and classifier-free
/// guidance x0 = uncond + s * (cond - uncond). Requires a per_frame denoiser
/// whose schedule length matches `schedule`.
MotionClip sample(const ConditionAssignment& assignment, const Denoiser& denoiser,
                  const NoiseSchedule& schedule, const SampleOptions& options = {});

/// Single prefix-token baseline: only the first segment's text conditions
/// the whole sequence. Requires a prefix-mode denoiser.
MotionClip sample_prefix_mode(const ConditionAssignment& assignment, const Denoiser& denoiser,
                              const NoiseSchedule& schedule, const SampleOptions& options = {});

/// Null-embedding sampling over `frames` frames (either mode).
MotionClip sample_unconditional(std::size_t frames, const Denoiser& denoiser,
                                const NoiseSchedule& schedule, const SampleOptions& options = {});

/// Mean root X displacement per frame over [begin, end), skipping frame 0.
double mean_root_velocity_x(const MotionClip& clip, std::size_t begin, std::size_t end);

}  // namespace caring::gen
