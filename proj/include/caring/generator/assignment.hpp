#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "caring/frame_budget.hpp"
#include "caring/generator/text_embedder.hpp"

namespace caring::gen {

using caring::kHardFrameCap;
using caring::kSoftFrameCap;

/// Text condition over the half-open frame range [begin, end).
struct ConditionSegment {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const ConditionSegment&, const ConditionSegment&) = default;
};

/// Segment texts laid over consecutive frame ranges.
struct ConditionAssignment {
  std::vector<ConditionSegment> segments;

  /// Builds contiguous segments of the given lengths starting at frame 0.
  static ConditionAssignment consecutive(const std::vector<std::string>& texts,
                                         const std::vector<std::size_t>& lengths);

  /// Ranges must be non-empty, contiguous and start at 0. Throws ValidationError.
  void validate() const;
  std::size_t total_frames() const;
  /// Index of the segment holding `frame`.
  std::size_t segment_of(std::size_t frame) const;

  /// embedding_dim x total_frames matrix whose column f embeds the text of
  /// the segment containing f.
  Eigen::MatrixXd condition_map(const TextEmbedder& embedder) const;
};

using caring::frame_budget_warning;
using caring::require_within_hard_cap;

}  // namespace caring::gen
