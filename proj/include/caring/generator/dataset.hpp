#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "caring/generator/assignment.hpp"
#include "caring/motion.hpp"

namespace caring::gen {

inline constexpr const char* kMoveRight = "move right";
inline constexpr const char* kMoveLeft = "move left";

struct LabeledSequence {
  MotionClip clip;
  std::vector<ConditionSegment> segments;
};

struct Dataset {
  std::string task;
  std::vector<LabeledSequence> sequences;

  /// Non-empty, shared skeleton/fps, segments covering each clip.
  void validate() const;
};

struct SyntheticOptions {
  std::size_t count = 500;
  std::uint64_t seed = 7;
  std::size_t frames = 40;
  /// Upper bound on labeled segments per sequence (1 or 2).
  std::size_t max_segments = 2;
};

/// Point-person clips whose segments move along +X ("move right") or -X
/// ("move left") at 0.6-1.4 m/s with small jitter.
Dataset make_two_class_dataset(const SyntheticOptions& options);

/// 22-joint stick-figure clips chaining walk / idle / pick-up / reach / turn
/// actions, labeled with varied phrasing.
Dataset make_humanoid_dataset(const SyntheticOptions& options);

/// Dispatches on "two-class" or "humanoid".
Dataset make_dataset(const std::string& task, const SyntheticOptions& options);

nlohmann::json to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& j);

}  // namespace caring::gen
