#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "caring/motion.hpp"

namespace caring {

/// Root-to-keypoint distances below this are treated as plausible motion.
inline constexpr double kPlausibilityThresholdM = 0.1;

/// Pairs (last frame of one action, first frame of the next).
struct TransitionSpec {
  std::vector<std::pair<std::size_t, std::size_t>> boundaries;

  /// Builds pairs (b - 1, b) from first-frame indices such as
  /// MotionClip::boundaries().
  static TransitionSpec from_first_frames(const std::vector<std::size_t>& first_frames);

  void validate(std::size_t clip_length) const;
};

struct SpatialTarget {
  std::size_t frame = 0;
  Vec2 target;
};

/// Target keypoints over the spatially conditioned frame set.
struct SpatialSpec {
  std::vector<SpatialTarget> targets;

  void validate(std::size_t clip_length) const;
};

/// Mean over boundaries and joints of the 3D distance between the paired frames.
double transition_distance(const MotionClip& clip, const TransitionSpec& spec);

/// Mean ground-plane (X, Y) distance between the root joint and its target.
double spatial_distance(const MotionClip& clip, const SpatialSpec& spec);

struct VariantMetrics {
  double transition_m = 0.0;
  std::optional<double> spatial_m;

  friend bool operator==(const VariantMetrics&, const VariantMetrics&) = default;
};

struct MetricsReport {
  VariantMetrics before;
  VariantMetrics after;
  /// before.transition_m / after.transition_m; 1 when both are zero and
  /// +infinity when only `after` is zero.
  double ratio = 1.0;
  /// after.spatial_m < threshold; empty without spatial targets.
  std::optional<bool> plausible;
  double threshold_m = kPlausibilityThresholdM;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Scores a naive and a smoothed variant of the same motion. Both clips must
/// have the same length and boundary metadata.
MetricsReport report(const MotionClip& before, const MotionClip& after,
                     const TransitionSpec& transitions,
                     const std::optional<SpatialSpec>& spatial = std::nullopt);

nlohmann::json to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::json& j);
std::string serialize_report(const MetricsReport& r);
MetricsReport parse_report(std::string_view text);

}  // namespace caring
