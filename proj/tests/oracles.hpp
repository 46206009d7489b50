#pragma once

// Direct, loop-by-loop implementations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <vector>

#include "caring/metrics.hpp"
#include "caring/motion.hpp"

namespace caring::testkit {

inline double brute_transition(const MotionClip& c, const std::vector<std::size_t>& firsts) {
  double sum = 0.0;
  long count = 0;
  for (std::size_t j = 0; j < c.joint_count(); ++j) {
    for (auto b : firsts) {
      const auto& p = c.frames()[b - 1][j];
      const auto& q = c.frames()[b][j];
      sum += std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y) + (p.z - q.z) * (p.z - q.z));
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

inline double brute_spatial(const MotionClip& c, const SpatialSpec& s) {
  double sum = 0.0;
  for (const auto& t : s.targets) {
    const auto& r = c.frames()[t.frame][c.skeleton().root_index];
    sum += std::hypot(r.x - t.target.x, r.y - t.target.y);
  }
  return sum / static_cast<double>(s.targets.size());
}


inline double sigmoid_oracle(double t, double l) { return 1.0 / (1.0 + std::exp(-(t - l / 2.0))); }

// Stitch written straight from the definitions, frame by frame.
inline std::vector<Frame> stitch_oracle(const std::vector<MotionClip>& clips, std::size_t l) {
  std::vector<Frame> out;
  for (const auto& c : clips) out.insert(out.end(), c.frames().begin(), c.frames().end());
  std::size_t offset = 0;
  for (std::size_t c = 0; c + 1 < clips.size(); ++c) {
    offset += clips[c].size();
    const auto& a = clips[c].frames();
    const auto& b = clips[c + 1].frames();
    const auto joints = a[0].size();
    for (std::size_t k = 0; k < 2 * l; ++k) {
      const double x = static_cast<double>(k) * static_cast<double>(l - 1) / static_cast<double>(2 * l - 1);
      const auto i0 = static_cast<std::size_t>(std::floor(x));
      const auto i1 = std::min(i0 + 1, l - 1);
      const double fr = x - static_cast<double>(i0);
      Frame f(joints);
      for (std::size_t j = 0; j < joints; ++j) {
        auto blend = [&](std::size_t i) {
          const double w = sigmoid_oracle(static_cast<double>(i), static_cast<double>(l));
          const auto& p = b[i][j];
          const auto& q = a[a.size() - l + i][j];
          return Vec3{w * p.x + (1 - w) * q.x, w * p.y + (1 - w) * q.y, w * p.z + (1 - w) * q.z};
        };
        const auto k0 = blend(i0);
        const auto k1 = blend(i1);
        f[j] = {k0.x + fr * (k1.x - k0.x), k0.y + fr * (k1.y - k0.y), k0.z + fr * (k1.z - k0.z)};
      }
      out[offset - l + k] = f;
    }
  }
  return out;
}


}  // namespace caring::testkit
