#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "caring/motion.hpp"

namespace caring {

/// Pose controls for the procedural 22-joint stick figure.
struct HumanoidState {
  Vec2 root_xy;
  /// Facing direction in radians; 0 faces +X.
  double heading = 0.0;
  /// Gait phase in radians.
  double phase = 0.0;
  /// 0 (legs still) .. 1 (full walking swing).
  double swing = 0.0;
  /// Pelvis drop in meters for crouching.
  double crouch = 0.0;
  /// 0..1 both hands reaching toward the floor in front.
  double reach_down = 0.0;
  /// 0..1 right hand reaching forward at chest height.
  double reach_forward = 0.0;
};

/// Joint positions for one state on humanoid_skeleton(), scaled to 1.75 m.
Frame humanoid_frame(const HumanoidState& state);

enum class HumanoidAction { walk, idle, pick_up, reach, turn };

/// Phrases used as condition text for each action in synthetic data.
const std::vector<std::string>& action_phrases(HumanoidAction action);

/// Synthesizes `frames` frames of one action starting from `state`. Returns the
/// frames and leaves `state` at the final pose so actions can be chained.
std::vector<Frame> synthesize_action(HumanoidAction action, std::size_t frames, double fps,
                                     HumanoidState& state, std::mt19937_64& rng);

}  // namespace caring
