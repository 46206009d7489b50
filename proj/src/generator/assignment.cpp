#include "caring/generator/assignment.hpp"

#include "caring/errors.hpp"

namespace caring::gen {

ConditionAssignment ConditionAssignment::consecutive(const std::vector<std::string>& texts,
                                                     const std::vector<std::size_t>& lengths) {
  if (texts.size() != lengths.size()) {
    throw ValidationError("segments", "one length per text is required");
  }
  ConditionAssignment a;
  std::size_t at = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    a.segments.push_back({texts[i], at, at + lengths[i]});
    at += lengths[i];
  }
  a.validate();
  return a;
}

void ConditionAssignment::validate() const {
  if (segments.empty()) {
    throw ValidationError("segments", "an assignment needs at least one segment");
  }
  std::size_t expected = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const auto path = "segments[" + std::to_string(i) + "]";
    if (s.begin != expected) {
      throw ValidationError(path + ".begin", "ranges must be contiguous from frame 0");
    }
    if (s.end <= s.begin) {
      throw ValidationError(path + ".end", "range must hold at least one frame");
    }
    expected = s.end;
  }
}

std::size_t ConditionAssignment::total_frames() const {
  return segments.empty() ? 0 : segments.back().end;
}

std::size_t ConditionAssignment::segment_of(std::size_t frame) const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (frame >= segments[i].begin && frame < segments[i].end) return i;
  }
  throw ValidationError("frame", "frame " + std::to_string(frame) + " is outside the assignment");
}

Eigen::MatrixXd ConditionAssignment::condition_map(const TextEmbedder& embedder) const {
  validate();
  Eigen::MatrixXd map(embedder.dim(), static_cast<Eigen::Index>(total_frames()));
  for (const auto& s : segments) {
    const Eigen::VectorXd z = embedder.embed(s.text);
    for (auto f = s.begin; f < s.end; ++f) map.col(static_cast<Eigen::Index>(f)) = z;
  }
  return map;
}

}  // namespace caring::gen
