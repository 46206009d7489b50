#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "caring/generator/dataset.hpp"
#include "caring/generator/denoiser.hpp"

namespace caring::gen {

struct TrainConfig {
  int steps = 2000;
  int batch = 16;
  double learning_rate = 2e-3;
  std::uint64_t seed = 0;
  /// Probability of replacing an example's conditions with the null embedding.
  double cfg_mask_prob = 0.1;
  int hidden = 64;
  int embedding_dim = 16;
  int time_dim = 16;
  int diffusion_steps = 100;
  ConditioningMode mode = ConditioningMode::per_frame;
  /// Fixed held-out batch used for initial/final loss.
  int eval_batch = 64;
};

struct TrainResult {
  Denoiser denoiser;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> step_losses;
};

/// Untrained network for the dataset (feature statistics fitted, weights
/// seeded from config.seed). train() starts from exactly this state.
Denoiser initial_denoiser(const Dataset& dataset, const TrainConfig& config);

/// Condition matrix for one sequence in the denoiser's mode; all zeros when
/// `masked`. Prefix mode uses only the first segment's text.
Eigen::MatrixXd training_conditions(const Denoiser& denoiser,
                                    const std::vector<ConditionSegment>& segments,
                                    std::size_t frames, bool masked);

/// Builds a seeded batch of noised examples (random t, noise and masking).
std::vector<DenoisingExample> make_batch(const Denoiser& denoiser, const Dataset& dataset,
                                         const std::vector<Eigen::MatrixXd>& normalized,
                                         int size, double mask_prob, std::mt19937_64& rng);

/// Adam on the clean-sample MSE. Deterministic per seed; throws Error when
/// the loss becomes non-finite, naming the step.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

}  // namespace caring::gen
