#include "caring/generator/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "caring/errors.hpp"

namespace caring::gen {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  alpha_bars_.reserve(betas_.size());
  double acc = 1.0;
  for (double b : betas_) {
    acc *= 1.0 - b;
    alpha_bars_.push_back(acc);
  }
  validate();
}

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 2) {
    throw ValidationError("steps", "a schedule needs at least 2 steps");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    betas[static_cast<std::size_t>(i)] =
        beta_start + (beta_end - beta_start) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return NoiseSchedule(std::move(betas));
}

NoiseSchedule NoiseSchedule::scaled_linear(int steps) {
  const double scale = 1000.0 / static_cast<double>(steps);
  return linear(steps, scale * 1e-4, std::min(scale * 0.02, 0.999));
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  return alpha_bars_.at(static_cast<std::size_t>(t - 1));
}

void NoiseSchedule::validate() const {
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    const double b = betas_[i];
    if (!(b > 0.0 && b < 1.0)) {
      throw ValidationError("betas[" + std::to_string(i) + "]", "beta must lie in (0, 1)");
    }
    if (i > 0 && !(b > betas_[i - 1])) {
      throw ValidationError("betas[" + std::to_string(i) + "]", "betas must strictly increase");
    }
  }
  if (!(alpha_bars_.back() < 0.05)) {
    throw ValidationError("betas", "final cumulative alpha must be below 0.05; got " +
                                       std::to_string(alpha_bars_.back()));
  }
}

Eigen::MatrixXd forward_noise(const Eigen::MatrixXd& x0, int t, const NoiseSchedule& schedule,
                              const Eigen::MatrixXd& eps) {
  if (t < 1 || t > schedule.steps()) {
    throw ValidationError("t", "diffusion step " + std::to_string(t) + " outside [1, " +
                                   std::to_string(schedule.steps()) + "]");
  }
  if (eps.rows() != x0.rows() || eps.cols() != x0.cols()) {
    throw ValidationError("eps", "noise shape differs from x0");
  }
  const double ab = schedule.alpha_bar(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * eps;
}

Eigen::MatrixXd forward_noise(const Eigen::MatrixXd& x0, int t, const NoiseSchedule& schedule,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd eps(x0.rows(), x0.cols());
  for (Eigen::Index c = 0; c < eps.cols(); ++c) {
    for (Eigen::Index r = 0; r < eps.rows(); ++r) {
      eps(r, c) = normal(rng);
    }
  }
  return forward_noise(x0, t, schedule, eps);
}

}  // namespace caring::gen
