#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace caring {

// Positions are meters, Z-up, X/Y is the ground plane.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
};

/// One pose: joint positions indexed like Skeleton::joint_names.
using Frame = std::vector<Vec3>;

inline constexpr double kDefaultFps = 20.0;
inline constexpr double kDefaultHeightM = 1.75;

struct Skeleton {
  std::vector<std::string> joint_names;
  std::size_t root_index = 0;
  double height_m = kDefaultHeightM;

  std::size_t joint_count() const { return joint_names.size(); }

  /// Throws ValidationError when empty, root out of range or height <= 0.
  void validate() const;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

/// The 22-joint layout used by HumanML3D-style data.
Skeleton humanoid_skeleton();

/// Generic skeleton with joints named "j0".."jN-1"; N = 1 is a point person.
Skeleton point_skeleton(std::size_t joint_count = 1);

/**
 * A timed sequence of poses sharing one skeleton.
 *
 * Construction validates every invariant (non-empty, joint counts, finite
 * coordinates, boundary indices strictly increasing inside (0, size)), so a
 * MotionClip that exists is always well formed.
 */
class MotionClip {
 public:
  MotionClip(Skeleton skeleton, double fps, std::vector<Frame> frames, std::string label = {},
             std::vector<std::size_t> boundaries = {});

  const Skeleton& skeleton() const { return skeleton_; }
  double fps() const { return fps_; }
  const std::vector<Frame>& frames() const { return frames_; }
  const Frame& frame(std::size_t i) const { return frames_.at(i); }
  std::size_t size() const { return frames_.size(); }
  std::size_t joint_count() const { return skeleton_.joint_count(); }
  const std::string& label() const { return label_; }

  /// First-frame indices of every clip after the first, when this clip was
  /// assembled from several.
  const std::vector<std::size_t>& boundaries() const { return boundaries_; }

  double duration_s() const { return static_cast<double>(frames_.size()) / fps_; }
  Vec3 root(std::size_t i) const { return frames_.at(i)[skeleton_.root_index]; }

  MotionClip with_label(std::string label) const;
  MotionClip with_boundaries(std::vector<std::size_t> boundaries) const;

  friend bool operator==(const MotionClip&, const MotionClip&) = default;

 private:
  Skeleton skeleton_;
  double fps_;
  std::vector<Frame> frames_;
  std::string label_;
  std::vector<std::size_t> boundaries_;
};

/// Exactly `length` frames taken from a clip boundary region.
class TransitionSegment {
 public:
  explicit TransitionSegment(std::vector<Frame> frames);

  static TransitionSegment tail(const MotionClip& clip, std::size_t length);
  static TransitionSegment head(const MotionClip& clip, std::size_t length);

  std::size_t length() const { return frames_.size(); }
  const std::vector<Frame>& frames() const { return frames_; }

 private:
  std::vector<Frame> frames_;
};

struct TrajectorySample {
  double t_s = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;

  Vec2 xy() const { return {x_m, y_m}; }
  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Timestamped ground-plane path; timestamps strictly increase.
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::string frame_of_reference = "world";

  void validate() const;
  double arc_length() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct Pose6Dof {
  Vec3 position;
  /// Unit quaternion (w, x, y, z).
  std::array<double, 4> quaternion{1.0, 0.0, 0.0, 0.0};

  friend bool operator==(const Pose6Dof&, const Pose6Dof&) = default;
};

struct Keypoint {
  double x_m = 0.0;
  double y_m = 0.0;
  std::string object_id;
  std::optional<Pose6Dof> pose_6dof;

  Vec2 xy() const { return {x_m, y_m}; }
  void validate() const;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// Plain concatenation; boundaries are recorded at the cumulative lengths.
/// Throws ValidationError on empty input or skeleton/fps mismatch.
MotionClip concat(std::span<const MotionClip> clips);

/// Throws ValidationError unless all clips share skeleton and fps.
void require_compatible(std::span<const MotionClip> clips);

}  // namespace caring
