#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "caring/generator/denoiser.hpp"

namespace caring::testkit {

inline Eigen::MatrixXd gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

/// Small random denoiser and batch for derivative checks.
struct GradFixture {
  gen::Denoiser denoiser;
  std::vector<gen::DenoisingExample> batch;
};

inline GradFixture make_grad_fixture(gen::ConditioningMode mode, std::uint64_t seed, std::size_t joints = 2) {
  std::mt19937_64 rng(seed);
  const auto sk = point_skeleton(joints);
  gen::DenoiserConfig cfg;
  cfg.feature_dim = gen::feature_dim(sk);
  cfg.embedding_dim = 4;
  cfg.hidden = 6;
  cfg.time_dim = 4;
  cfg.mode = mode;
  gen::FeatureNorm norm{Eigen::VectorXd::Zero(cfg.feature_dim), 1.0};
  gen::Denoiser d(cfg, sk, 20.0, norm, gen::NoiseSchedule::scaled_linear(100), seed);
  // Non-zero biases so their gradients are exercised away from zero.
  auto& p = d.mutable_params();
  for (auto* t : p.tensors()) *t += 0.3 * gaussian(t->rows(), t->cols(), rng);
  std::vector<gen::DenoisingExample> batch;
  std::uniform_int_distribution<int> step(1, 100);
  for (int e = 0; e < 3; ++e) {
    const Eigen::Index n = 4 + e;
    const Eigen::Index cc = mode == gen::ConditioningMode::per_frame ? n : 1;
    batch.push_back({gaussian(cfg.feature_dim, n, rng), step(rng), gaussian(cfg.embedding_dim, cc, rng),
                     gaussian(cfg.feature_dim, n, rng)});
  }
  return {d, batch};
}

/// ||analytic - numeric|| / max(||analytic||, ||numeric||) over all parameters,
/// numeric by central differences with step h.
inline double gradient_relative_error(GradFixture f, double h = 1e-6) {
  gen::DenoiserParams grad;
  f.denoiser.loss_and_gradient(f.batch, grad);
  double diff2 = 0.0;
  double a2 = 0.0;
  double n2 = 0.0;
  auto params = f.denoiser.mutable_params().tensors();
  const auto grads = grad.tensors();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (Eigen::Index i = 0; i < params[k]->size(); ++i) {
      double& w = params[k]->data()[i];
      const double saved = w;
      w = saved + h;
      const double up = f.denoiser.loss(f.batch);
      w = saved - h;
      const double down = f.denoiser.loss(f.batch);
      w = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = grads[k]->data()[i];
      diff2 += (analytic - numeric) * (analytic - numeric);
      a2 += analytic * analytic;
      n2 += numeric * numeric;
    }
  }
  return std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-300});
}

}  // namespace caring::testkit
