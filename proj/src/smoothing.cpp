#include "caring/smoothing.hpp"

#include <cmath>
#include <string>

#include "caring/errors.hpp"

namespace caring {

void BlendConfig::validate() const {
  if (length < 2) {
    throw ValidationError("blend_len", "blend length must be at least 2 frames");
  }
}

double blend_weight(std::size_t t, std::size_t length) {
  if (length == 0 || t >= length) {
    throw ValidationError("t", "frame index " + std::to_string(t) + " outside [0, " +
                                   std::to_string(length) + ")");
  }
  const double shifted = static_cast<double>(t) - static_cast<double>(length) / 2.0;
  return 1.0 / (1.0 + std::exp(-shifted));
}

std::vector<Frame> blend_transition(const TransitionSegment& preceding_tail,
                                    const TransitionSegment& following_head,
                                    const BlendConfig& cfg) {
  cfg.validate();
  const auto L = cfg.length;
  if (preceding_tail.length() != L || following_head.length() != L) {
    throw ValidationError("transition segments must both have " + std::to_string(L) + " frames");
  }
  const auto joints = preceding_tail.frames().front().size();
  if (following_head.frames().front().size() != joints) {
    throw ValidationError("transition segments disagree on joint count");
  }
  std::vector<Frame> out(L, Frame(joints));
  for (std::size_t t = 0; t < L; ++t) {
    const double a = blend_weight(t, L);
    const auto& next = following_head.frames()[t];
    const auto& prev = preceding_tail.frames()[t];
    for (std::size_t j = 0; j < joints; ++j) {
      out[t][j] = a * next[j] + (1.0 - a) * prev[j];
    }
  }
  return out;
}

std::vector<Frame> upsample_linear(std::span<const Frame> blended) {
  const auto L = blended.size();
  if (L < 2) {
    throw ValidationError("blend_len", "upsampling needs at least 2 frames");
  }
  const auto joints = blended.front().size();
  const auto den = 2 * L - 1;
  std::vector<Frame> out;
  out.reserve(2 * L);
  for (std::size_t t = 0; t < 2 * L; ++t) {
    // Source position x = t (L-1) / (2L-1), kept as an exact fraction so
    // integral positions hit the x0 == x1 case without rounding noise.
    const auto num = t * (L - 1);
    const auto x0 = num / den;
    const auto rem = num % den;
    if (rem == 0) {
      out.push_back(blended[x0]);
      continue;
    }
    const double frac = static_cast<double>(rem) / static_cast<double>(den);
    const auto& lo = blended[x0];
    const auto& hi = blended[x0 + 1];
    Frame f(joints);
    for (std::size_t j = 0; j < joints; ++j) {
      f[j] = lo[j] + frac * (hi[j] - lo[j]);
    }
    out.push_back(std::move(f));
  }
  return out;
}

MotionClip stitch(std::span<const MotionClip> clips, const BlendConfig& cfg) {
  cfg.validate();
  require_compatible(clips);
  if (clips.size() == 1) {
    return clips.front();
  }
  const auto L = cfg.length;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    if (clips[i].size() < 2 * L) {
      throw ValidationError("clips[" + std::to_string(i) + "]",
                            "clip has " + std::to_string(clips[i].size()) +
                                " frames; stitching with blend length " + std::to_string(L) +
                                " needs at least " + std::to_string(2 * L));
    }
  }
  const MotionClip joined = concat(clips);
  std::vector<Frame> frames = joined.frames();
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < clips.size(); ++i) {
    offset += clips[i].size();
    const auto blended = blend_transition(TransitionSegment::tail(clips[i], L),
                                          TransitionSegment::head(clips[i + 1], L), cfg);
    auto window = upsample_linear(blended);
    for (std::size_t k = 0; k < window.size(); ++k) {
      frames[offset - L + k] = std::move(window[k]);
    }
  }
  return MotionClip(joined.skeleton(), joined.fps(), std::move(frames), joined.label(),
                    joined.boundaries());
}

}  // namespace caring
