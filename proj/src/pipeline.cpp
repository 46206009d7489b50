#include "caring/pipeline.hpp"

#include <cmath>

#include "caring/errors.hpp"
#include "caring/frame_budget.hpp"
#include "caring/generator/sample.hpp"

namespace caring {

namespace {

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-frame targets along a polyline of XY points. Timestamps are synthetic;
// only arc length matters for resampling.
GuidanceTargets targets_along(const std::vector<Vec2>& points, std::size_t frames,
                              StrengthSchedule schedule) {
  Trajectory path;
  for (const auto& p : points) {
    if (!path.samples.empty() && path.samples.back().xy() == p) continue;
    path.samples.push_back({static_cast<double>(path.samples.size()), p.x, p.y});
  }
  if (path.samples.size() == 1) {
    path.samples.push_back({1.0, path.samples[0].x_m, path.samples[0].y_m});
  }
  return resample_trajectory(path, frames, schedule);
}

GuidanceTargets hold_at(Vec2 point, std::size_t frames) {
  GuidanceTargets g;
  g.per_frame_xy.assign(frames, point);
  g.strength.assign(frames, 1.0);
  return g;
}

}  // namespace

std::uint64_t step_seed(std::uint64_t seed, std::size_t step_index) {
  return mix(seed ^ mix(static_cast<std::uint64_t>(step_index)));
}

std::optional<SpatialSpec> plan_spatial_spec(const GenerationPlan& plan) {
  SpatialSpec spec;
  for (const auto& s : plan.steps) {
    if (s.target) spec.targets.push_back({s.end - 1, s.target->xy()});
  }
  if (spec.targets.empty()) return std::nullopt;
  return spec;
}

GenerationResult run_generation(const GenerationPlan& plan, const gen::Denoiser& denoiser,
                                const GenerationOptions& options) {
  plan.validate();
  if (plan.steps.empty()) throw ValidationError("steps", "plan has no steps");
  if (denoiser.config().mode != gen::ConditioningMode::per_frame) {
    throw ValidationError("denoiser", "plan generation needs a per-frame conditioned model");
  }
  if (!(denoiser.skeleton() == plan.skeleton) || denoiser.fps() != plan.fps) {
    throw ValidationError("denoiser", "model skeleton/fps differ from the plan's");
  }
  if (!std::isfinite(options.guidance_scale) || options.guidance_scale < 0.0) {
    throw ValidationError("guidance_scale", "must be finite and non-negative");
  }
  const BlendConfig blend{options.blend_length};
  blend.validate();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (plan.steps[i].frames() < 2 * blend.length) {
      throw ValidationError("steps[" + std::to_string(i) + "]",
                            "step has " + std::to_string(plan.steps[i].frames()) +
                                " frames; blending needs at least 2 * blend_len = " +
                                std::to_string(2 * blend.length));
    }
  }
  require_within_hard_cap(plan.total_frames(), kPlanFrameCap);

  GenerationResult result{MotionClip(plan.skeleton, plan.fps, {Frame(plan.skeleton.joint_count())}),
                          MotionClip(plan.skeleton, plan.fps, {Frame(plan.skeleton.joint_count())}),
                          {},
                          plan.warnings};

  std::vector<MotionClip> clips;
  std::optional<Vec2> prev_end;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    const auto n = step.frames();

    std::vector<Vec2> path;
    if (prev_end) path.push_back(*prev_end);
    if (step.trajectory) {
      for (const auto& s : step.trajectory->samples) path.push_back(s.xy());
    }
    if (step.target) path.push_back(step.target->xy());

    gen::SampleOptions so;
    so.guidance_scale = options.guidance_scale;
    so.seed = step_seed(options.seed, i);
    so.origin = path.empty() ? Vec2{} : path.front();
    const auto assignment = gen::ConditionAssignment::consecutive({step.condition_text}, {n});
    auto clip = gen::sample(assignment, denoiser, denoiser.schedule(), so);

    const bool guided = step.trajectory.has_value() || step.target.has_value();
    if (step.scale == StepScale::hands_only && !path.empty()) {
      clip = apply_root_guidance(clip, hold_at(path.back(), n));
    } else if (guided) {
      clip = apply_root_guidance(clip, targets_along(path, n, options.schedule));
    }
    const auto last = clip.root(n - 1);
    prev_end = Vec2{last.x, last.y};
    clips.push_back(clip.with_label(step.condition_text));
  }

  result.naive = concat(clips);
  const auto spatial = plan_spatial_spec(plan);
  result.motion = stitch(clips, blend);
  // Stitching re-times the frames around each seam; put keypoints back.
  if (spatial) result.motion = pin_root_targets(result.motion, spatial->targets, blend.length);
  if (clips.size() > 1) {
    result.report = report(result.naive, result.motion,
                           TransitionSpec::from_first_frames(result.naive.boundaries()), spatial);
  } else {
    // No transitions to score; still report spatial error.
    result.report.before.transition_m = 0.0;
    result.report.after.transition_m = 0.0;
    if (spatial) {
      result.report.before.spatial_m = spatial_distance(result.naive, *spatial);
      result.report.after.spatial_m = spatial_distance(result.motion, *spatial);
      result.report.plausible = *result.report.after.spatial_m < kPlausibilityThresholdM;
    }
  }
  return result;
}

gen::SyntheticOptions humanoid_data_options() {
  gen::SyntheticOptions o;
  o.count = 300;
  o.seed = 7;
  o.frames = 60;
  o.max_segments = 2;
  return o;
}

gen::TrainConfig humanoid_train_config(int steps, std::uint64_t seed) {
  gen::TrainConfig c;
  c.steps = steps;
  c.batch = 8;
  c.seed = seed;
  c.hidden = 64;
  c.eval_batch = 16;
  return c;
}

gen::Denoiser train_humanoid_denoiser(int steps, std::uint64_t seed) {
  const auto ds = gen::make_humanoid_dataset(humanoid_data_options());
  return gen::train(ds, humanoid_train_config(steps, seed)).denoiser;
}

}  // namespace caring
