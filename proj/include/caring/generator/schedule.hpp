#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace caring::gen {

/// Linear DDPM beta schedule with cumulative products.
class NoiseSchedule {
 public:
  /// T steps with betas evenly spaced from beta_start to beta_end.
  /// Throws ValidationError unless 0 < beta_start < beta_end < 1, T >= 2 and
  /// the final cumulative alpha drops below 0.05.
  static NoiseSchedule linear(int steps, double beta_start, double beta_end);

  /// The 1e-4..0.02 range of a 1000-step schedule rescaled by 1000 / steps,
  /// so short schedules still end near pure noise. Default 100 steps.
  static NoiseSchedule scaled_linear(int steps = 100);

  /// Arbitrary betas, validated like the named schedules.
  static NoiseSchedule from_betas(std::vector<double> betas) { return NoiseSchedule(std::move(betas)); }

  const std::vector<double>& betas() const { return betas_; }
  int steps() const { return static_cast<int>(betas_.size()); }
  double beta_start() const { return betas_.front(); }
  double beta_end() const { return betas_.back(); }

  /// Step indices are 1-based, matching the usual t = 1..T notation.
  double beta(int t) const { return betas_.at(static_cast<std::size_t>(t - 1)); }
  double alpha(int t) const { return 1.0 - beta(t); }
  /// Cumulative product of alphas up to t; alpha_bar(0) == 1.
  double alpha_bar(int t) const;

  void validate() const;

 private:
  explicit NoiseSchedule(std::vector<double> betas);

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

/// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps with eps supplied.
Eigen::MatrixXd forward_noise(const Eigen::MatrixXd& x0, int t, const NoiseSchedule& schedule,
                              const Eigen::MatrixXd& eps);

/// As above with eps drawn from a standard normal seeded by `seed`.
Eigen::MatrixXd forward_noise(const Eigen::MatrixXd& x0, int t, const NoiseSchedule& schedule,
                              std::uint64_t seed);

}  // namespace caring::gen
