#include "caring/generator/train.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "caring/errors.hpp"
#include "caring/generator/features.hpp"

namespace caring::gen {

namespace {

std::vector<Eigen::MatrixXd> encode_all(const Dataset& dataset) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(dataset.sequences.size());
  for (const auto& s : dataset.sequences) out.push_back(encode_features(s.clip));
  return out;
}

struct AdamState {
  DenoiserParams m;
  DenoiserParams v;
  int step = 0;
};

void adam_update(DenoiserParams& params, const DenoiserParams& grad, AdamState& state, double lr) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  ++state.step;
  const double c1 = 1.0 - std::pow(beta1, state.step);
  const double c2 = 1.0 - std::pow(beta2, state.step);
  auto p = params.tensors();
  auto g = grad.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t i = 0; i < DenoiserParams::kTensorCount; ++i) {
    *m[i] = beta1 * *m[i] + (1.0 - beta1) * *g[i];
    *v[i] = beta2 * *v[i] + (1.0 - beta2) * g[i]->cwiseProduct(*g[i]);
    *p[i] -= (lr * (m[i]->array() / c1) / ((v[i]->array() / c2).sqrt() + eps)).matrix();
  }
}

}  // namespace

Denoiser initial_denoiser(const Dataset& dataset, const TrainConfig& config) {
  dataset.validate();
  const auto& first = dataset.sequences.front().clip;
  DenoiserConfig dc;
  dc.feature_dim = feature_dim(first.skeleton());
  dc.embedding_dim = config.embedding_dim;
  dc.hidden = config.hidden;
  dc.time_dim = config.time_dim;
  dc.mode = config.mode;
  return Denoiser(dc, first.skeleton(), first.fps(), FeatureNorm::fit(encode_all(dataset)),
                  NoiseSchedule::scaled_linear(config.diffusion_steps), config.seed);
}

Eigen::MatrixXd training_conditions(const Denoiser& denoiser,
                                    const std::vector<ConditionSegment>& segments,
                                    std::size_t frames, bool masked) {
  const auto& emb = denoiser.embedder();
  const bool prefix = denoiser.config().mode == ConditioningMode::prefix;
  const Eigen::Index cols = prefix ? 1 : static_cast<Eigen::Index>(frames);
  if (masked) return Eigen::MatrixXd::Zero(emb.dim(), cols);
  if (prefix) return emb.embed(segments.front().text);
  return ConditionAssignment{segments}.condition_map(emb);
}

std::vector<DenoisingExample> make_batch(const Denoiser& denoiser, const Dataset& dataset,
                                         const std::vector<Eigen::MatrixXd>& normalized,
                                         int size, double mask_prob, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, dataset.sequences.size() - 1);
  std::uniform_int_distribution<int> pick_t(1, denoiser.schedule().steps());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<DenoisingExample> batch;
  batch.reserve(static_cast<std::size_t>(size));
  for (int b = 0; b < size; ++b) {
    const auto idx = pick(rng);
    const auto& x0 = normalized[idx];
    const int t = pick_t(rng);
    Eigen::MatrixXd eps(x0.rows(), x0.cols());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = normal(rng);
    const bool masked = unit(rng) < mask_prob;
    batch.push_back({forward_noise(x0, t, denoiser.schedule(), eps), t,
                     training_conditions(denoiser, dataset.sequences[idx].segments,
                                         static_cast<std::size_t>(x0.cols()), masked),
                     x0});
  }
  return batch;
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  if (config.steps < 0 || config.batch < 1 || config.eval_batch < 1) {
    throw ValidationError("train", "steps must be >= 0 and batch sizes positive");
  }
  if (!(config.learning_rate > 0.0)) throw ValidationError("learning_rate", "must be positive");
  Denoiser denoiser = initial_denoiser(dataset, config);
  const auto d = denoiser.config().feature_dim;
  std::vector<Eigen::MatrixXd> normalized;
  for (const auto& f : encode_all(dataset)) {
    if (f.rows() != d) throw ValidationError("dataset", "feature dimension mismatch");
    normalized.push_back(denoiser.norm().normalize(f));
  }

  std::mt19937_64 eval_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto eval = make_batch(denoiser, dataset, normalized, config.eval_batch, config.cfg_mask_prob,
                               eval_rng);
  TrainResult result{denoiser, denoiser.loss(eval), 0.0, {}};

  std::mt19937_64 rng(config.seed + 1);
  AdamState adam{DenoiserParams::zeros_like(denoiser.params()),
                 DenoiserParams::zeros_like(denoiser.params()), 0};
  DenoiserParams grad;
  result.step_losses.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    const auto batch = make_batch(denoiser, dataset, normalized, config.batch, config.cfg_mask_prob, rng);
    const double loss = denoiser.loss_and_gradient(batch, grad);
    if (!std::isfinite(loss)) {
      throw Error("training loss became non-finite at step " + std::to_string(step));
    }
    result.step_losses.push_back(loss);
    // Cosine decay to 10% of the base rate.
    const double progress = static_cast<double>(step) / static_cast<double>(config.steps);
    const double lr = config.learning_rate *
                      (0.1 + 0.9 * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
    adam_update(denoiser.mutable_params(), grad, adam, lr);
  }
  result.denoiser = denoiser;
  result.final_loss = denoiser.loss(eval);
  return result;
}

}  // namespace caring::gen
