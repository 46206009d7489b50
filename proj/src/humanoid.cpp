#include "caring/humanoid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace caring {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThigh = 0.425;
constexpr double kPelvisHeight = 0.95;

enum Joint : std::size_t {
  pelvis, left_hip, right_hip, spine1, left_knee, right_knee, spine2, left_ankle, right_ankle,
  spine3, left_foot, right_foot, neck, left_collar, right_collar, head, left_shoulder,
  right_shoulder, left_elbow, right_elbow, left_wrist, right_wrist, joint_count
};

Vec3 lerp(Vec3 a, Vec3 b, double u) { return a + u * (b - a); }

// Knee for a two-bone leg of equal segments, bending toward +X.
Vec3 knee_between(Vec3 hip, Vec3 ankle) {
  Vec3 v = ankle - hip;
  double d = v.norm();
  if (d < 1e-9) return hip;
  const double reach = 2.0 * kThigh - 1e-6;
  if (d > reach) {
    v = (reach / d) * v;
    d = reach;
  }
  const double out = std::sqrt(std::max(0.0, kThigh * kThigh - 0.25 * d * d));
  Vec3 n{-v.z, 0.0, v.x};
  const double nn = n.norm();
  if (nn > 1e-9) n = (1.0 / nn) * n;
  return hip + 0.5 * v + out * n;
}

double envelope(double u) {
  const double s = std::sin(kPi * std::clamp(u, 0.0, 1.0));
  return s * s;
}

double approach(double value, double target, double rate) { return value + rate * (target - value); }

}  // namespace

Frame humanoid_frame(const HumanoidState& s) {
  Frame f(joint_count);
  const double bob = 0.02 * s.swing * std::abs(std::sin(s.phase));
  const double pz = kPelvisHeight - s.crouch - bob;
  const double lean = 1.2 * s.crouch;
  auto trunk = [&](double h, double y, double forward = 0.0) {
    return Vec3{h * std::sin(lean) + forward, y, pz + h * std::cos(lean)};
  };
  f[pelvis] = {0.0, 0.0, pz};
  f[spine1] = trunk(0.12, 0.0);
  f[spine2] = trunk(0.25, 0.0);
  f[spine3] = trunk(0.31, 0.0);
  f[neck] = trunk(0.53, 0.0);
  f[left_collar] = trunk(0.47, 0.07);
  f[right_collar] = trunk(0.47, -0.07);
  f[head] = trunk(0.67, 0.0, 0.02);
  f[left_shoulder] = trunk(0.47, 0.18);
  f[right_shoulder] = trunk(0.47, -0.18);

  for (int side = 0; side < 2; ++side) {
    const double sy = side == 0 ? 1.0 : -1.0;
    const double offset = side == 0 ? 0.0 : kPi;
    const Vec3 hip{0.0, 0.09 * sy, pz - 0.07};
    const Vec3 ankle{0.3 * s.swing * std::sin(s.phase + offset), 0.11 * sy,
                     0.08 + 0.08 * s.swing * std::max(0.0, std::cos(s.phase + offset))};
    const std::size_t hip_j = side == 0 ? left_hip : right_hip;
    const std::size_t knee_j = side == 0 ? left_knee : right_knee;
    const std::size_t ankle_j = side == 0 ? left_ankle : right_ankle;
    const std::size_t foot_j = side == 0 ? left_foot : right_foot;
    f[hip_j] = hip;
    f[knee_j] = knee_between(hip, ankle);
    f[ankle_j] = ankle;
    f[foot_j] = ankle + Vec3{0.12, 0.0, -0.06};

    const std::size_t sh_j = side == 0 ? left_shoulder : right_shoulder;
    const std::size_t el_j = side == 0 ? left_elbow : right_elbow;
    const std::size_t wr_j = side == 0 ? left_wrist : right_wrist;
    const Vec3 shoulder = f[sh_j];
    const double psi = -0.35 * s.swing * std::sin(s.phase + offset);
    Vec3 elbow = shoulder + 0.27 * Vec3{std::sin(psi), 0.0, -std::cos(psi)};
    Vec3 wrist = elbow + 0.25 * Vec3{std::sin(psi + 0.15), 0.0, -std::cos(psi + 0.15)};

    const Vec3 down_target{0.45, 0.15 * sy, std::max(0.15, pz - 0.55)};
    const Vec3 forward_target{0.55, 0.15 * sy, 1.30 - s.crouch};
    const double forward_amount = side == 1 ? s.reach_forward : 0.0;
    for (const auto& [target, amount] :
         {std::pair{down_target, s.reach_down}, std::pair{forward_target, forward_amount}}) {
      if (amount <= 0.0) continue;
      const Vec3 w = lerp(wrist, target, amount);
      const Vec3 e = 0.5 * (shoulder + w) + Vec3{0.0, 0.05 * sy, -0.06};
      wrist = w;
      elbow = lerp(elbow, e, amount);
    }
    f[el_j] = elbow;
    f[wr_j] = wrist;
  }

  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  for (auto& p : f) {
    const double x = c * p.x - sn * p.y + s.root_xy.x;
    const double y = sn * p.x + c * p.y + s.root_xy.y;
    p = {x, y, p.z};
  }
  return f;
}

const std::vector<std::string>& action_phrases(HumanoidAction action) {
  static const std::vector<std::string> walk{"walk forward", "go to the table",
                                             "approach the object", "walk to the printer",
                                             "move to the location", "leave the room"};
  static const std::vector<std::string> idle{"stand still", "wait", "look at the screen"};
  static const std::vector<std::string> pick{"pick up the object", "grab the item",
                                             "take the cup", "pick the tool"};
  static const std::vector<std::string> reach{"press the button", "reach forward",
                                              "attach the part", "insert the cable",
                                              "start the machine", "point at the screen"};
  static const std::vector<std::string> turn{"turn around", "turn back"};
  switch (action) {
    case HumanoidAction::walk: return walk;
    case HumanoidAction::idle: return idle;
    case HumanoidAction::pick_up: return pick;
    case HumanoidAction::reach: return reach;
    case HumanoidAction::turn: return turn;
  }
  return idle;
}

std::vector<Frame> synthesize_action(HumanoidAction action, std::size_t frames, double fps,
                                     HumanoidState& state, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double speed = 1.0 + 0.5 * unit(rng);
  const double cadence = 2.0 * kPi * (0.8 + 0.2 * unit(rng)) / fps;
  const double turn_total = (unit(rng) < 0.5 ? -1.0 : 1.0) * kPi;
  const double depth = 0.25 + 0.1 * unit(rng);

  std::vector<Frame> out;
  out.reserve(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const double u = frames > 1 ? static_cast<double>(i) / static_cast<double>(frames - 1) : 1.0;
    switch (action) {
      case HumanoidAction::walk:
        state.swing = approach(state.swing, 1.0, 0.25);
        state.crouch = approach(state.crouch, 0.0, 0.3);
        state.reach_down = approach(state.reach_down, 0.0, 0.3);
        state.reach_forward = approach(state.reach_forward, 0.0, 0.3);
        state.phase += cadence;
        state.root_xy = state.root_xy + (state.swing * speed / fps) *
                                            Vec2{std::cos(state.heading), std::sin(state.heading)};
        break;
      case HumanoidAction::idle:
        state.swing = approach(state.swing, 0.0, 0.2);
        state.crouch = approach(state.crouch, 0.0, 0.2);
        state.reach_down = approach(state.reach_down, 0.0, 0.2);
        state.reach_forward = approach(state.reach_forward, 0.0, 0.2);
        state.phase += 0.25 * cadence;
        break;
      case HumanoidAction::pick_up:
        state.swing = approach(state.swing, 0.0, 0.3);
        state.crouch = depth * envelope(u);
        state.reach_down = envelope(u);
        state.reach_forward = approach(state.reach_forward, 0.0, 0.3);
        break;
      case HumanoidAction::reach:
        state.swing = approach(state.swing, 0.0, 0.3);
        state.crouch = approach(state.crouch, 0.0, 0.3);
        state.reach_down = approach(state.reach_down, 0.0, 0.3);
        state.reach_forward = envelope(u);
        break;
      case HumanoidAction::turn:
        state.swing = approach(state.swing, 0.3, 0.3);
        state.crouch = approach(state.crouch, 0.0, 0.3);
        state.reach_down = approach(state.reach_down, 0.0, 0.3);
        state.reach_forward = approach(state.reach_forward, 0.0, 0.3);
        state.phase += cadence;
        state.heading += turn_total / static_cast<double>(std::max<std::size_t>(frames, 1));
        break;
    }
    out.push_back(humanoid_frame(state));
  }
  return out;
}

}  // namespace caring
