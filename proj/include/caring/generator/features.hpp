#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "caring/motion.hpp"

namespace caring::gen {

/// Per-frame motion features, one column per frame:
///   [root vx, root vy, root z, (joint - root) xyz for every non-root joint].
/// Root velocity makes locomotion a per-frame quantity the denoiser can
/// condition on; positions are recovered by integrating from an origin.
int feature_dim(const Skeleton& skeleton);

Eigen::MatrixXd encode_features(const MotionClip& clip);

MotionClip decode_features(const Eigen::MatrixXd& features, const Skeleton& skeleton, double fps,
                           Vec2 origin, std::string label = {});

/// Per-feature mean and one global scale (RMS of the centered features).
struct FeatureNorm {
  Eigen::VectorXd mean;
  double scale = 1.0;

  static FeatureNorm fit(const std::vector<Eigen::MatrixXd>& sequences);

  Eigen::MatrixXd normalize(const Eigen::MatrixXd& features) const;
  Eigen::MatrixXd denormalize(const Eigen::MatrixXd& normalized) const;
};

}  // namespace caring::gen
