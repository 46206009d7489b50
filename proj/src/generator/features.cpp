#include "caring/generator/features.hpp"

#include <cmath>

#include "caring/errors.hpp"

namespace caring::gen {

int feature_dim(const Skeleton& skeleton) {
  return 3 + 3 * static_cast<int>(skeleton.joint_count() - 1);
}

Eigen::MatrixXd encode_features(const MotionClip& clip) {
  const auto& sk = clip.skeleton();
  const auto n = static_cast<Eigen::Index>(clip.size());
  Eigen::MatrixXd f(feature_dim(sk), n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto i = static_cast<std::size_t>(c);
    const auto root = clip.root(i);
    // The first frame has no predecessor; it repeats the next velocity.
    Vec3 vel{};
    if (clip.size() > 1) {
      const auto a = i == 0 ? 0 : i - 1;
      const auto b = i == 0 ? 1 : i;
      vel = clip.root(b) - clip.root(a);
    }
    f(0, c) = vel.x;
    f(1, c) = vel.y;
    f(2, c) = root.z;
    Eigen::Index row = 3;
    for (std::size_t j = 0; j < sk.joint_count(); ++j) {
      if (j == sk.root_index) continue;
      const auto d = clip.frame(i)[j] - root;
      f(row++, c) = d.x;
      f(row++, c) = d.y;
      f(row++, c) = d.z;
    }
  }
  return f;
}

MotionClip decode_features(const Eigen::MatrixXd& features, const Skeleton& skeleton, double fps,
                           Vec2 origin, std::string label) {
  if (features.rows() != feature_dim(skeleton)) {
    throw ValidationError("features", "feature rows do not match the skeleton");
  }
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(features.cols()));
  double x = origin.x;
  double y = origin.y;
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    if (c > 0) {
      x += features(0, c);
      y += features(1, c);
    }
    const Vec3 root{x, y, features(2, c)};
    Frame frame(skeleton.joint_count());
    Eigen::Index row = 3;
    for (std::size_t j = 0; j < skeleton.joint_count(); ++j) {
      if (j == skeleton.root_index) {
        frame[j] = root;
        continue;
      }
      frame[j] = root + Vec3{features(row, c), features(row + 1, c), features(row + 2, c)};
      row += 3;
    }
    frames.push_back(std::move(frame));
  }
  return MotionClip(skeleton, fps, std::move(frames), std::move(label));
}

FeatureNorm FeatureNorm::fit(const std::vector<Eigen::MatrixXd>& sequences) {
  if (sequences.empty()) {
    throw ValidationError("dataset", "cannot fit feature statistics on an empty dataset");
  }
  const auto d = sequences.front().rows();
  FeatureNorm norm;
  norm.mean = Eigen::VectorXd::Zero(d);
  double count = 0.0;
  for (const auto& s : sequences) {
    norm.mean += s.rowwise().sum();
    count += static_cast<double>(s.cols());
  }
  norm.mean /= count;
  double sq = 0.0;
  for (const auto& s : sequences) {
    sq += (s.colwise() - norm.mean).squaredNorm();
  }
  norm.scale = std::sqrt(sq / (count * static_cast<double>(d)));
  if (!(norm.scale > 1e-12)) norm.scale = 1.0;
  return norm;
}

Eigen::MatrixXd FeatureNorm::normalize(const Eigen::MatrixXd& features) const {
  return (features.colwise() - mean) / scale;
}

Eigen::MatrixXd FeatureNorm::denormalize(const Eigen::MatrixXd& normalized) const {
  return (normalized * scale).colwise() + mean;
}

}  // namespace caring::gen
