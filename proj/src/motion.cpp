#include "caring/motion.hpp"

#include <algorithm>

#include "caring/errors.hpp"

namespace caring {

void Skeleton::validate() const {
  if (joint_names.empty()) {
    throw ValidationError("skeleton.joint_names", "skeleton needs at least one joint");
  }
  if (root_index >= joint_names.size()) {
    throw ValidationError("skeleton.root_index", "root index " + std::to_string(root_index) +
                                                     " out of range for " +
                                                     std::to_string(joint_names.size()) + " joints");
  }
  if (!(height_m > 0.0) || !std::isfinite(height_m)) {
    throw ValidationError("skeleton.height_m", "height must be positive");
  }
}

Skeleton humanoid_skeleton() {
  return Skeleton{{"pelvis",         "left_hip",       "right_hip",   "spine1",      "left_knee",
                   "right_knee",     "spine2",         "left_ankle",  "right_ankle", "spine3",
                   "left_foot",      "right_foot",     "neck",        "left_collar", "right_collar",
                   "head",           "left_shoulder",  "right_shoulder", "left_elbow", "right_elbow",
                   "left_wrist",     "right_wrist"},
                  0,
                  kDefaultHeightM};
}

Skeleton point_skeleton(std::size_t joint_count) {
  Skeleton s;
  s.joint_names.reserve(joint_count);
  for (std::size_t i = 0; i < joint_count; ++i) {
    s.joint_names.push_back("j" + std::to_string(i));
  }
  return s;
}

MotionClip::MotionClip(Skeleton skeleton, double fps, std::vector<Frame> frames, std::string label,
                       std::vector<std::size_t> boundaries)
    : skeleton_(std::move(skeleton)),
      fps_(fps),
      frames_(std::move(frames)),
      label_(std::move(label)),
      boundaries_(std::move(boundaries)) {
  skeleton_.validate();
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    throw ValidationError("fps", "fps must be positive");
  }
  if (frames_.empty()) {
    throw ValidationError("frames", "a clip needs at least one frame");
  }
  const auto joints = skeleton_.joint_count();
  for (std::size_t f = 0; f < frames_.size(); ++f) {
    if (frames_[f].size() != joints) {
      throw ValidationError("frames[" + std::to_string(f) + "]",
                            "expected " + std::to_string(joints) + " joints, got " +
                                std::to_string(frames_[f].size()));
    }
    for (std::size_t j = 0; j < joints; ++j) {
      if (!frames_[f][j].finite()) {
        throw ValidationError("frames[" + std::to_string(f) + "][" + std::to_string(j) + "]",
                              "non-finite coordinate");
      }
    }
  }
  for (std::size_t i = 0; i < boundaries_.size(); ++i) {
    const auto b = boundaries_[i];
    if (b == 0 || b >= frames_.size() || (i > 0 && b <= boundaries_[i - 1])) {
      throw ValidationError("boundaries[" + std::to_string(i) + "]",
                            "boundary indices must increase strictly inside (0, frame count)");
    }
  }
}

MotionClip MotionClip::with_label(std::string label) const {
  MotionClip copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

MotionClip MotionClip::with_boundaries(std::vector<std::size_t> boundaries) const {
  return MotionClip(skeleton_, fps_, frames_, label_, std::move(boundaries));
}

TransitionSegment::TransitionSegment(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) {
    throw ValidationError("transition segment must hold at least one frame");
  }
  for (const auto& f : frames_) {
    if (f.size() != frames_.front().size()) {
      throw ValidationError("transition segment frames disagree on joint count");
    }
  }
}

TransitionSegment TransitionSegment::tail(const MotionClip& clip, std::size_t length) {
  if (length == 0 || length > clip.size()) {
    throw ValidationError("segment length " + std::to_string(length) + " exceeds clip of " +
                          std::to_string(clip.size()) + " frames");
  }
  return TransitionSegment({clip.frames().end() - static_cast<std::ptrdiff_t>(length),
                            clip.frames().end()});
}

TransitionSegment TransitionSegment::head(const MotionClip& clip, std::size_t length) {
  if (length == 0 || length > clip.size()) {
    throw ValidationError("segment length " + std::to_string(length) + " exceeds clip of " +
                          std::to_string(clip.size()) + " frames");
  }
  return TransitionSegment({clip.frames().begin(),
                            clip.frames().begin() + static_cast<std::ptrdiff_t>(length)});
}

void Trajectory::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!std::isfinite(s.t_s) || !std::isfinite(s.x_m) || !std::isfinite(s.y_m)) {
      throw ValidationError("samples[" + std::to_string(i) + "]", "non-finite value");
    }
    if (i > 0 && !(s.t_s > samples[i - 1].t_s)) {
      throw ValidationError("samples[" + std::to_string(i) + "].t_s",
                            "timestamps must be strictly increasing");
    }
  }
}

double Trajectory::arc_length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    total += (samples[i].xy() - samples[i - 1].xy()).norm();
  }
  return total;
}

void Keypoint::validate() const {
  if (!std::isfinite(x_m) || !std::isfinite(y_m)) {
    throw ValidationError("keypoint", "non-finite position");
  }
  if (pose_6dof) {
    const auto& q = pose_6dof->quaternion;
    const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    if (std::abs(n - 1.0) > 1e-6) {
      throw ValidationError("pose_6dof.quaternion", "quaternion must have unit norm");
    }
    if (!pose_6dof->position.finite()) {
      throw ValidationError("pose_6dof.position", "non-finite position");
    }
  }
}

void require_compatible(std::span<const MotionClip> clips) {
  if (clips.empty()) {
    throw ValidationError("clips", "need at least one clip");
  }
  for (std::size_t i = 1; i < clips.size(); ++i) {
    if (!(clips[i].skeleton() == clips[0].skeleton())) {
      throw ValidationError("clips[" + std::to_string(i) + "]", "skeleton differs from clips[0]");
    }
    if (clips[i].fps() != clips[0].fps()) {
      throw ValidationError("clips[" + std::to_string(i) + "]", "fps differs from clips[0]");
    }
  }
}

MotionClip concat(std::span<const MotionClip> clips) {
  require_compatible(clips);
  if (clips.size() == 1) {
    return clips.front();
  }
  std::vector<Frame> frames;
  std::vector<std::size_t> boundaries;
  std::string label;
  for (const auto& c : clips) {
    const auto offset = frames.size();
    if (offset > 0) {
      boundaries.push_back(offset);
    }
    for (auto b : c.boundaries()) {
      boundaries.push_back(offset + b);
    }
    frames.insert(frames.end(), c.frames().begin(), c.frames().end());
    if (!c.label().empty()) {
      label += label.empty() ? c.label() : " | " + c.label();
    }
  }
  return MotionClip(clips[0].skeleton(), clips[0].fps(), std::move(frames), std::move(label),
                    std::move(boundaries));
}

}  // namespace caring
