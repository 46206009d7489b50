#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "caring/motion.hpp"

namespace caring {

inline constexpr std::size_t kDefaultBlendLength = 15;

struct BlendConfig {
  /// Transition window length L in frames; at least 2.
  std::size_t length = kDefaultBlendLength;

  void validate() const;
};

/// Shifted sigmoid 1 / (1 + exp(-(t - L/2))) for 0 <= t < L.
/// Throws ValidationError when t is outside the window.
double blend_weight(std::size_t t, std::size_t length);

/**
 * Sigmoid cross-fade of two equally long windows.
 *
 * `preceding_tail` is the last L frames of the earlier clip and
 * `following_head` the first L frames of the later one. Because the weight
 * grows with t, the head is weighted by alpha_t and the tail by 1 - alpha_t,
 * so the result flows from the earlier motion into the later one.
 */
std::vector<Frame> blend_transition(const TransitionSegment& preceding_tail,
                                    const TransitionSegment& following_head,
                                    const BlendConfig& cfg);

/// Stretches L frames to 2L by linear interpolation at source positions
/// t * (L - 1) / (2L - 1); both endpoints are reproduced exactly.
std::vector<Frame> upsample_linear(std::span<const Frame> blended);

/// Replaces the 2L frames around every interior boundary with the
/// upsampled blend of the two windows. Output length equals the summed
/// input length and boundaries are recorded as in concat(). Clips shorter
/// than 2L are rejected rather than clamped.
MotionClip stitch(std::span<const MotionClip> clips, const BlendConfig& cfg = {});

}  // namespace caring
