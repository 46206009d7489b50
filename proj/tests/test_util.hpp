#pragma once

#include <algorithm>
#include <cctype>
#include <random>
#include <string>
#include <vector>

#include "caring/motion.hpp"

namespace caring::testkit {

inline MotionClip random_clip(std::mt19937_64& rng, std::size_t frames, std::size_t joints,
                              double scale = 1.0, std::vector<std::size_t> boundaries = {}) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<Frame> out(frames, Frame(joints));
  for (auto& f : out) {
    for (auto& p : f) p = {u(rng), u(rng), u(rng)};
  }
  return MotionClip(point_skeleton(joints), kDefaultFps, std::move(out), "random",
                    std::move(boundaries));
}

inline Trajectory line_trajectory(Vec2 from, Vec2 to, std::size_t samples) {
  Trajectory t;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(samples - 1);
    t.samples.push_back({a * 10.0, from.x + a * (to.x - from.x), from.y + a * (to.y - from.y)});
  }
  return t;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace caring::testkit
