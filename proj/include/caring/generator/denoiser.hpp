#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "caring/generator/features.hpp"
#include "caring/generator/schedule.hpp"
#include "caring/generator/text_embedder.hpp"
#include "caring/motion.hpp"

namespace caring::gen {

enum class ConditioningMode {
  /// A condition vector is added to every frame embedding.
  per_frame,
  /// One condition token sits before the frames and reaches them only
  /// through sequence pooling (single-action baseline).
  prefix,
};

const char* to_string(ConditioningMode mode);
ConditioningMode conditioning_mode_from_string(std::string_view s);

struct DenoiserConfig {
  int feature_dim = 3;
  int embedding_dim = 16;
  int hidden = 64;
  int time_dim = 16;
  ConditioningMode mode = ConditioningMode::per_frame;

  void validate() const;
  friend bool operator==(const DenoiserConfig&, const DenoiserConfig&) = default;
};

/// Network weights. Vectors are stored as single-column matrices so every
/// tensor can be visited uniformly by the optimizer and gradient checks.
struct DenoiserParams {
  Eigen::MatrixXd w_in;      // hidden x 3*feature_dim (frames f-1, f, f+1)
  Eigen::MatrixXd w_cond;    // hidden x embedding_dim
  Eigen::MatrixXd w_time;    // hidden x time_dim
  Eigen::MatrixXd b_embed;   // hidden x 1
  Eigen::MatrixXd u_pool;    // hidden x hidden, applied to the mean token
  Eigen::MatrixXd w_hidden;  // hidden x hidden
  Eigen::MatrixXd b_hidden;  // hidden x 1
  Eigen::MatrixXd w_out;     // feature_dim x hidden
  Eigen::MatrixXd b_out;     // feature_dim x 1

  static constexpr std::size_t kTensorCount = 9;
  std::array<Eigen::MatrixXd*, kTensorCount> tensors();
  std::array<const Eigen::MatrixXd*, kTensorCount> tensors() const;
  static const std::array<const char*, kTensorCount>& names();

  static DenoiserParams zeros_like(const DenoiserParams& other);
  std::size_t parameter_count() const;
  bool all_finite() const;
};

/// One supervised denoising example in normalized feature space.
struct DenoisingExample {
  Eigen::MatrixXd x_t;         // feature_dim x frames
  int t = 1;
  Eigen::MatrixXd conditions;  // embedding_dim x frames (per_frame) or x 1 (prefix)
  Eigen::MatrixXd x0;          // target clean features
};

/**
 * Small feed-forward denoiser predicting clean features from noisy ones.
 *
 * Per token f:  a_f = W_in [x_{f-1}; x_f; x_{f+1}] + W_cond c_f + W_time tau(t) + b
 *               h_f = tanh(a_f + U mean(a)),  k_f = tanh(W_h h_f + b_h)
 *               y_f = W_out k_f + b_out
 * In prefix mode the frames get c_f = 0 and an extra token
 * a_p = W_cond z + W_time tau(t) + b joins the mean.
 */
class Denoiser {
 public:
  Denoiser(DenoiserConfig config, Skeleton skeleton, double fps, FeatureNorm norm,
           NoiseSchedule schedule, std::uint64_t init_seed, std::uint64_t embed_salt = 0);

  const DenoiserConfig& config() const { return config_; }
  const Skeleton& skeleton() const { return skeleton_; }
  double fps() const { return fps_; }
  const FeatureNorm& norm() const { return norm_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const TextEmbedder& embedder() const { return embedder_; }
  const DenoiserParams& params() const { return params_; }
  DenoiserParams& mutable_params() { return params_; }

  /// Predicted clean features (normalized) for noisy input at step t.
  Eigen::MatrixXd predict(const Eigen::MatrixXd& x_t, int t, const Eigen::MatrixXd& conditions) const;

  /// Mean over examples of the per-element squared error.
  double loss(const std::vector<DenoisingExample>& batch) const;
  /// Same loss; writes d loss / d params into `grad` (overwritten).
  double loss_and_gradient(const std::vector<DenoisingExample>& batch, DenoiserParams& grad) const;

  Eigen::VectorXd time_embedding(int t) const;

  nlohmann::json to_json() const;
  static Denoiser from_json(const nlohmann::json& j);

  friend bool operator==(const Denoiser& a, const Denoiser& b);

 private:
  struct Cache;
  void check_input(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& conditions) const;
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x_t, int t, const Eigen::MatrixXd& conditions,
                          Cache* cache) const;

  DenoiserConfig config_;
  Skeleton skeleton_;
  double fps_;
  FeatureNorm norm_;
  NoiseSchedule schedule_;
  TextEmbedder embedder_;
  DenoiserParams params_;
};

void save_denoiser(const Denoiser& denoiser, const std::filesystem::path& path);
Denoiser load_denoiser(const std::filesystem::path& path);

}  // namespace caring::gen
