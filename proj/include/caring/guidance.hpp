#pragma once

#include <cstddef>
#include <vector>

#include "caring/metrics.hpp"
#include "caring/motion.hpp"

namespace caring {

enum class StrengthSchedule {
  /// 0 on the first frame rising linearly to 1 on the last.
  ramp,
  /// 1 on every frame (hard guidance).
  constant,
};

/// Per-frame root targets and correction strengths for one clip.
struct GuidanceTargets {
  std::vector<Vec2> per_frame_xy;
  std::vector<double> strength;

  std::size_t size() const { return per_frame_xy.size(); }
  void validate() const;
};

/// Point at arc length `s` along the piecewise-linear path (clamped).
Vec2 point_at_arc_length(const Trajectory& trajectory, double s);

/// Sub-path between arc lengths [from_m, to_m] with interpolated end samples
/// and timestamps. Always holds at least two samples.
Trajectory trajectory_between(const Trajectory& trajectory, double from_m, double to_m);

/// `n_frames` points spaced uniformly by arc length; the first and last equal
/// the trajectory endpoints. A zero-length path yields constant targets.
GuidanceTargets resample_trajectory(const Trajectory& trajectory, std::size_t n_frames,
                                    StrengthSchedule schedule = StrengthSchedule::ramp);

/// Adds strength_t * (target_t - root_t) to the X/Y of every joint of frame t.
/// Limb offsets and Z are untouched.
MotionClip apply_root_guidance(const MotionClip& clip, const GuidanceTargets& targets);

/// Moves each target frame's root onto its target and spreads the same XY
/// shift over neighbouring frames with weight 0.5 (1 + cos(pi k / w)) for
/// |k| < w. The half-width w shrinks to the smallest gap between target
/// frames, so every target frame is hit exactly. Used to restore keypoints
/// after stitching re-times the frames around each seam.
MotionClip pin_root_targets(const MotionClip& clip, const std::vector<SpatialTarget>& targets,
                            std::size_t half_width);

}  // namespace caring
