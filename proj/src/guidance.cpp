#include "caring/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "caring/errors.hpp"

namespace caring {

namespace {

std::vector<double> cumulative_lengths(const Trajectory& trajectory) {
  std::vector<double> acc(trajectory.samples.size(), 0.0);
  for (std::size_t i = 1; i < acc.size(); ++i) {
    acc[i] = acc[i - 1] + (trajectory.samples[i].xy() - trajectory.samples[i - 1].xy()).norm();
  }
  return acc;
}

// Interpolated sample at arc length s; acc must come from cumulative_lengths.
TrajectorySample sample_at(const Trajectory& trajectory, const std::vector<double>& acc, double s) {
  const auto& samples = trajectory.samples;
  if (s <= 0.0 || acc.back() == 0.0) return samples.front();
  if (s >= acc.back()) return samples.back();
  const auto it = std::upper_bound(acc.begin(), acc.end(), s);
  const auto hi = static_cast<std::size_t>(it - acc.begin());
  const auto lo = hi - 1;
  const double seg = acc[hi] - acc[lo];
  const double u = seg > 0.0 ? (s - acc[lo]) / seg : 0.0;
  const auto& a = samples[lo];
  const auto& b = samples[hi];
  return {a.t_s + u * (b.t_s - a.t_s), a.x_m + u * (b.x_m - a.x_m), a.y_m + u * (b.y_m - a.y_m)};
}

void require_path(const Trajectory& trajectory) {
  trajectory.validate();
  if (trajectory.samples.size() < 2) {
    throw ValidationError("samples", "guidance needs a trajectory with at least 2 samples");
  }
}

}  // namespace

void GuidanceTargets::validate() const {
  if (strength.size() != per_frame_xy.size()) {
    throw ValidationError("strength", "one strength value per target frame is required");
  }
  for (std::size_t i = 0; i < per_frame_xy.size(); ++i) {
    if (!std::isfinite(per_frame_xy[i].x) || !std::isfinite(per_frame_xy[i].y)) {
      throw ValidationError("per_frame_xy[" + std::to_string(i) + "]", "non-finite target");
    }
    if (!(strength[i] >= 0.0 && strength[i] <= 1.0)) {
      throw ValidationError("strength[" + std::to_string(i) + "]", "strength must lie in [0, 1]");
    }
  }
}

Vec2 point_at_arc_length(const Trajectory& trajectory, double s) {
  require_path(trajectory);
  return sample_at(trajectory, cumulative_lengths(trajectory), s).xy();
}

Trajectory trajectory_between(const Trajectory& trajectory, double from_m, double to_m) {
  require_path(trajectory);
  const auto acc = cumulative_lengths(trajectory);
  const double total = acc.back();
  from_m = std::clamp(from_m, 0.0, total);
  to_m = std::clamp(to_m, from_m, total);

  Trajectory out;
  out.frame_of_reference = trajectory.frame_of_reference;
  if (total == 0.0) {
    // No distance to split; fall back to the time axis so the slice keeps
    // two strictly increasing samples.
    const auto& a = trajectory.samples.front();
    const auto& b = trajectory.samples.back();
    out.samples = {a, {b.t_s, a.x_m, a.y_m}};
    return out;
  }
  out.samples.push_back(sample_at(trajectory, acc, from_m));
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] > from_m && acc[i] < to_m && trajectory.samples[i].t_s > out.samples.back().t_s) {
      out.samples.push_back(trajectory.samples[i]);
    }
  }
  auto last = sample_at(trajectory, acc, to_m);
  if (last.t_s <= out.samples.back().t_s) {
    // Zero-length slice: keep the point but give it a later timestamp.
    last.t_s = std::nextafter(out.samples.back().t_s, std::numeric_limits<double>::infinity());
  }
  out.samples.push_back(last);
  return out;
}

GuidanceTargets resample_trajectory(const Trajectory& trajectory, std::size_t n_frames,
                                    StrengthSchedule schedule) {
  require_path(trajectory);
  if (n_frames < 2) {
    throw ValidationError("n_frames", "resampling needs at least 2 frames");
  }
  const auto acc = cumulative_lengths(trajectory);
  const double total = acc.back();
  GuidanceTargets targets;
  targets.per_frame_xy.reserve(n_frames);
  targets.strength.reserve(n_frames);
  const double denom = static_cast<double>(n_frames - 1);
  for (std::size_t k = 0; k < n_frames; ++k) {
    const double u = static_cast<double>(k) / denom;
    targets.per_frame_xy.push_back(sample_at(trajectory, acc, u * total).xy());
    targets.strength.push_back(schedule == StrengthSchedule::ramp ? u : 1.0);
  }
  if (total > 0.0) {
    targets.per_frame_xy.front() = trajectory.samples.front().xy();
    targets.per_frame_xy.back() = trajectory.samples.back().xy();
  }
  return targets;
}

MotionClip apply_root_guidance(const MotionClip& clip, const GuidanceTargets& targets) {
  targets.validate();
  if (targets.size() != clip.size()) {
    throw ValidationError("targets", "expected " + std::to_string(clip.size()) +
                                         " targets, got " + std::to_string(targets.size()));
  }
  std::vector<Frame> frames = clip.frames();
  const auto root = clip.skeleton().root_index;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto r = frames[t][root];
    const double dx = targets.strength[t] * (targets.per_frame_xy[t].x - r.x);
    const double dy = targets.strength[t] * (targets.per_frame_xy[t].y - r.y);
    for (auto& p : frames[t]) {
      p.x += dx;
      p.y += dy;
    }
  }
  return MotionClip(clip.skeleton(), clip.fps(), std::move(frames), clip.label(), clip.boundaries());
}

MotionClip pin_root_targets(const MotionClip& clip, const std::vector<SpatialTarget>& targets,
                            std::size_t half_width) {
  if (half_width == 0) throw ValidationError("half_width", "must be positive");
  std::vector<SpatialTarget> sorted = targets;
  std::sort(sorted.begin(), sorted.end(),
            [](const SpatialTarget& a, const SpatialTarget& b) { return a.frame < b.frame; });
  std::size_t w = half_width;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].frame >= clip.size()) {
      throw ValidationError("targets[" + std::to_string(i) + "].frame", "frame index outside the clip");
    }
    if (!std::isfinite(sorted[i].target.x) || !std::isfinite(sorted[i].target.y)) {
      throw ValidationError("targets[" + std::to_string(i) + "].target", "non-finite target");
    }
    if (i > 0) {
      const auto gap = sorted[i].frame - sorted[i - 1].frame;
      if (gap == 0) throw ValidationError("targets", "two targets on one frame");
      w = std::min(w, gap);
    }
  }
  std::vector<Frame> frames = clip.frames();
  const auto root = clip.skeleton().root_index;
  const auto n = static_cast<long long>(frames.size());
  const auto wl = static_cast<long long>(w);
  for (const auto& t : sorted) {
    const auto r = frames[t.frame][root];
    const double dx = t.target.x - r.x;
    const double dy = t.target.y - r.y;
    const auto f = static_cast<long long>(t.frame);
    for (long long k = -wl + 1; k < wl; ++k) {
      if (f + k < 0 || f + k >= n) continue;
      const double weight =
          k == 0 ? 1.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(wl)));
      for (auto& p : frames[static_cast<std::size_t>(f + k)]) {
        p.x += weight * dx;
        p.y += weight * dy;
      }
    }
  }
  return MotionClip(clip.skeleton(), clip.fps(), std::move(frames), clip.label(), clip.boundaries());
}

}  // namespace caring
