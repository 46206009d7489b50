#include "caring/generator/sample.hpp"

#include <cmath>
#include <random>
#include <string>

#include "caring/errors.hpp"
#include "caring/generator/features.hpp"

namespace caring::gen {

namespace {

void check_compatible(const Denoiser& denoiser, const NoiseSchedule& schedule, std::size_t frames,
                      const SampleOptions& options) {
  if (schedule.steps() != denoiser.schedule().steps()) {
    throw ValidationError("schedule", "sampling schedule has " + std::to_string(schedule.steps()) +
                                          " steps but the denoiser was trained with " +
                                          std::to_string(denoiser.schedule().steps()));
  }
  if (frames == 0) throw ValidationError("frames", "nothing to sample");
  require_within_hard_cap(frames, options.hard_cap);
  if (!(options.guidance_scale >= 0.0)) {
    throw ValidationError("guidance_scale", "must be non-negative");
  }
}

// conditional may be empty (cols() == 0) for pure unconditional sampling.
MotionClip reverse_process(std::size_t frames, const Denoiser& denoiser,
                           const NoiseSchedule& schedule, const SampleOptions& options,
                           const Eigen::MatrixXd& conditional, const Eigen::MatrixXd& null_cond,
                           std::string label) {
  const auto d = denoiser.config().feature_dim;
  const auto n = static_cast<Eigen::Index>(frames);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  auto draw = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  };

  const bool guided = conditional.cols() > 0 && options.guidance_scale != 0.0;
  Eigen::MatrixXd x(d, n);
  draw(x);
  Eigen::MatrixXd z(d, n);
  for (int t = schedule.steps(); t >= 1; --t) {
    Eigen::MatrixXd x0 = denoiser.predict(x, t, null_cond);
    if (options.observer) options.observer({t, false, null_cond});
    if (guided) {
      const Eigen::MatrixXd cond = denoiser.predict(x, t, conditional);
      if (options.observer) options.observer({t, true, conditional});
      x0 += options.guidance_scale * (cond - x0);
    }
    const double ab = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t - 1);
    const double beta = schedule.beta(t);
    const double c0 = std::sqrt(ab_prev) * beta / (1.0 - ab);
    const double ct = std::sqrt(schedule.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab);
    x = c0 * x0 + ct * x;
    if (t > 1) {
      const double var = beta * (1.0 - ab_prev) / (1.0 - ab);
      draw(z);
      x += std::sqrt(var) * z;
    }
  }
  return decode_features(denoiser.norm().denormalize(x), denoiser.skeleton(), denoiser.fps(),
                         options.origin, std::move(label));
}

std::string joined_label(const ConditionAssignment& a) {
  std::string label;
  for (const auto& s : a.segments) label += label.empty() ? s.text : " | " + s.text;
  return label;
}

}  // namespace

MotionClip sample(const ConditionAssignment& assignment, const Denoiser& denoiser,
                  const NoiseSchedule& schedule, const SampleOptions& options) {
  assignment.validate();
  if (denoiser.config().mode != ConditioningMode::per_frame) {
    throw ValidationError("denoiser", "per-frame sampling needs a per_frame denoiser");
  }
  const auto frames = assignment.total_frames();
  check_compatible(denoiser, schedule, frames, options);
  const Eigen::MatrixXd cond = assignment.condition_map(denoiser.embedder());
  const Eigen::MatrixXd null = Eigen::MatrixXd::Zero(cond.rows(), cond.cols());
  return reverse_process(frames, denoiser, schedule, options, cond, null, joined_label(assignment));
}

MotionClip sample_prefix_mode(const ConditionAssignment& assignment, const Denoiser& denoiser,
                              const NoiseSchedule& schedule, const SampleOptions& options) {
  assignment.validate();
  if (denoiser.config().mode != ConditioningMode::prefix) {
    throw ValidationError("denoiser", "prefix sampling needs a prefix-mode denoiser");
  }
  const auto frames = assignment.total_frames();
  check_compatible(denoiser, schedule, frames, options);
  const Eigen::MatrixXd cond = denoiser.embedder().embed(assignment.segments.front().text);
  const Eigen::MatrixXd null = Eigen::MatrixXd::Zero(cond.rows(), 1);
  return reverse_process(frames, denoiser, schedule, options, cond, null, joined_label(assignment));
}

MotionClip sample_unconditional(std::size_t frames, const Denoiser& denoiser,
                                const NoiseSchedule& schedule, const SampleOptions& options) {
  check_compatible(denoiser, schedule, frames, options);
  const Eigen::Index cols =
      denoiser.config().mode == ConditioningMode::per_frame ? static_cast<Eigen::Index>(frames) : 1;
  const Eigen::MatrixXd null = Eigen::MatrixXd::Zero(denoiser.config().embedding_dim, cols);
  return reverse_process(frames, denoiser, schedule, options, Eigen::MatrixXd(), null, {});
}

double mean_root_velocity_x(const MotionClip& clip, std::size_t begin, std::size_t end) {
  begin = std::max<std::size_t>(begin, 1);
  end = std::min(end, clip.size());
  if (begin >= end) throw ValidationError("range", "segment has no frame-to-frame steps");
  double sum = 0.0;
  for (auto f = begin; f < end; ++f) sum += clip.root(f).x - clip.root(f - 1).x;
  return sum / static_cast<double>(end - begin);
}

}  // namespace caring::gen
