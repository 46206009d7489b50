#include "caring/generator/denoiser.hpp"

#include <cmath>
#include <random>
#include <string>

#include "caring/errors.hpp"
#include "caring/io.hpp"

namespace caring::gen {

const char* to_string(ConditioningMode mode) {
  return mode == ConditioningMode::per_frame ? "per_frame" : "prefix";
}

ConditioningMode conditioning_mode_from_string(std::string_view s) {
  if (s == "per_frame") return ConditioningMode::per_frame;
  if (s == "prefix") return ConditioningMode::prefix;
  throw ParseError("unknown conditioning mode '" + std::string(s) + "'");
}

void DenoiserConfig::validate() const {
  if (feature_dim < 1) throw ValidationError("feature_dim", "must be positive");
  if (embedding_dim < 1) throw ValidationError("embedding_dim", "must be positive");
  if (hidden < 1) throw ValidationError("hidden", "must be positive");
  if (time_dim < 2 || time_dim % 2 != 0) {
    throw ValidationError("time_dim", "must be a positive even number");
  }
}

std::array<Eigen::MatrixXd*, DenoiserParams::kTensorCount> DenoiserParams::tensors() {
  return {&w_in, &w_cond, &w_time, &b_embed, &u_pool, &w_hidden, &b_hidden, &w_out, &b_out};
}

std::array<const Eigen::MatrixXd*, DenoiserParams::kTensorCount> DenoiserParams::tensors() const {
  return {&w_in, &w_cond, &w_time, &b_embed, &u_pool, &w_hidden, &b_hidden, &w_out, &b_out};
}

const std::array<const char*, DenoiserParams::kTensorCount>& DenoiserParams::names() {
  static const std::array<const char*, kTensorCount> n{
      "w_in", "w_cond", "w_time", "b_embed", "u_pool", "w_hidden", "b_hidden", "w_out", "b_out"};
  return n;
}

DenoiserParams DenoiserParams::zeros_like(const DenoiserParams& other) {
  DenoiserParams p;
  auto dst = p.tensors();
  auto src = other.tensors();
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    *dst[i] = Eigen::MatrixXd::Zero(src[i]->rows(), src[i]->cols());
  }
  return p;
}

std::size_t DenoiserParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

bool DenoiserParams::all_finite() const {
  for (const auto* t : tensors()) {
    if (!t->allFinite()) return false;
  }
  return true;
}

struct Denoiser::Cache {
  Eigen::MatrixXd window;      // 3D x N
  Eigen::VectorXd tau;         // time embedding
  Eigen::VectorXd pooled;      // mean token g
  Eigen::MatrixXd h;           // tanh(a + U g)
  Eigen::MatrixXd k;           // tanh(W_h h + b_h)
  Eigen::Index tokens = 0;     // frames, plus one in prefix mode
};

namespace {

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng, double gain = 1.0) {
  const double a = gain * std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-a, a);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = u(rng);
  }
  return m;
}

// Stacks neighbouring frames [x_{f-1}; x_f; x_{f+1}] with zero padding.
Eigen::MatrixXd frame_window(const Eigen::MatrixXd& x) {
  const auto d = x.rows();
  const auto n = x.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3 * d, n);
  w.middleRows(d, d) = x;
  if (n > 1) {
    w.block(0, 1, d, n - 1) = x.leftCols(n - 1);
    w.block(2 * d, 0, d, n - 1) = x.rightCols(n - 1);
  }
  return w;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  std::vector<double> data(m.data(), m.data() + m.size());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ParseError("params." + name + ": expected {rows, cols, data}");
  }
  const auto rows = j["rows"].get<Eigen::Index>();
  const auto cols = j["cols"].get<Eigen::Index>();
  const auto& data = j["data"];
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw ParseError("params." + name + ": data length does not match rows x cols");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows * cols; ++i) {
    m.data()[i] = json_number(data[static_cast<std::size_t>(i)], "params." + name);
  }
  return m;
}

}  // namespace

Denoiser::Denoiser(DenoiserConfig config, Skeleton skeleton, double fps, FeatureNorm norm,
                   NoiseSchedule schedule, std::uint64_t init_seed, std::uint64_t embed_salt)
    : config_(config),
      skeleton_(std::move(skeleton)),
      fps_(fps),
      norm_(std::move(norm)),
      schedule_(std::move(schedule)),
      embedder_(config.embedding_dim, embed_salt) {
  config_.validate();
  skeleton_.validate();
  if (config_.feature_dim != feature_dim(skeleton_)) {
    throw ValidationError("feature_dim", "does not match the skeleton's feature layout");
  }
  if (norm_.mean.size() != config_.feature_dim) {
    throw ValidationError("norm.mean", "length differs from feature_dim");
  }
  std::mt19937_64 rng(init_seed);
  const auto d = config_.feature_dim;
  const auto h = config_.hidden;
  params_.w_in = glorot(h, 3 * d, rng);
  params_.w_cond = glorot(h, config_.embedding_dim, rng);
  params_.w_time = glorot(h, config_.time_dim, rng);
  params_.b_embed = Eigen::MatrixXd::Zero(h, 1);
  params_.u_pool = glorot(h, h, rng, 0.5);
  params_.w_hidden = glorot(h, h, rng);
  params_.b_hidden = Eigen::MatrixXd::Zero(h, 1);
  params_.w_out = glorot(d, h, rng, 0.5);
  params_.b_out = Eigen::MatrixXd::Zero(d, 1);
}

Eigen::VectorXd Denoiser::time_embedding(int t) const {
  const int half = config_.time_dim / 2;
  Eigen::VectorXd tau(config_.time_dim);
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(1000.0) * static_cast<double>(i) / static_cast<double>(half));
    tau[2 * i] = std::sin(static_cast<double>(t) * freq);
    tau[2 * i + 1] = std::cos(static_cast<double>(t) * freq);
  }
  return tau;
}

void Denoiser::check_input(const Eigen::MatrixXd& x_t, const Eigen::MatrixXd& conditions) const {
  if (x_t.rows() != config_.feature_dim || x_t.cols() < 1) {
    throw ValidationError("x_t", "expected " + std::to_string(config_.feature_dim) +
                                     " feature rows and at least one frame");
  }
  if (conditions.rows() != config_.embedding_dim) {
    throw ValidationError("conditions", "expected " + std::to_string(config_.embedding_dim) +
                                            " embedding rows");
  }
  const Eigen::Index want = config_.mode == ConditioningMode::per_frame ? x_t.cols() : 1;
  if (conditions.cols() != want) {
    throw ValidationError("conditions", std::string("expected ") + std::to_string(want) +
                                            " condition column(s) in " + to_string(config_.mode) +
                                            " mode");
  }
}

Eigen::MatrixXd Denoiser::forward(const Eigen::MatrixXd& x_t, int t,
                                  const Eigen::MatrixXd& conditions, Cache* cache) const {
  check_input(x_t, conditions);
  const auto& p = params_;
  const auto n = x_t.cols();
  Eigen::MatrixXd window = frame_window(x_t);
  Eigen::VectorXd tau = time_embedding(t);
  const Eigen::VectorXd shared = p.w_time * tau + p.b_embed.col(0);

  Eigen::MatrixXd a = p.w_in * window;
  a.colwise() += shared;
  Eigen::VectorXd token_sum = a.rowwise().sum();
  Eigen::Index tokens = n;
  if (config_.mode == ConditioningMode::per_frame) {
    const Eigen::MatrixXd cond = p.w_cond * conditions;
    a += cond;
    token_sum += cond.rowwise().sum();
  } else {
    token_sum += p.w_cond * conditions.col(0) + shared;
    tokens += 1;
  }
  const Eigen::VectorXd pooled = token_sum / static_cast<double>(tokens);

  Eigen::MatrixXd pre = a;
  pre.colwise() += p.u_pool * pooled;
  Eigen::MatrixXd h = pre.array().tanh().matrix();
  Eigen::MatrixXd z = p.w_hidden * h;
  z.colwise() += p.b_hidden.col(0);
  Eigen::MatrixXd k = z.array().tanh().matrix();
  Eigen::MatrixXd y = p.w_out * k;
  y.colwise() += p.b_out.col(0);

  if (cache) {
    cache->window = std::move(window);
    cache->tau = std::move(tau);
    cache->pooled = pooled;
    cache->h = std::move(h);
    cache->k = std::move(k);
    cache->tokens = tokens;
  }
  return y;
}

Eigen::MatrixXd Denoiser::predict(const Eigen::MatrixXd& x_t, int t,
                                  const Eigen::MatrixXd& conditions) const {
  return forward(x_t, t, conditions, nullptr);
}

double Denoiser::loss(const std::vector<DenoisingExample>& batch) const {
  if (batch.empty()) throw ValidationError("batch", "empty batch");
  double total = 0.0;
  for (const auto& ex : batch) {
    const Eigen::MatrixXd y = predict(ex.x_t, ex.t, ex.conditions);
    total += (y - ex.x0).squaredNorm() / static_cast<double>(y.size());
  }
  return total / static_cast<double>(batch.size());
}

double Denoiser::loss_and_gradient(const std::vector<DenoisingExample>& batch,
                                   DenoiserParams& grad) const {
  if (batch.empty()) throw ValidationError("batch", "empty batch");
  grad = DenoiserParams::zeros_like(params_);
  const auto& p = params_;
  const double b = static_cast<double>(batch.size());
  double total = 0.0;
  Cache c;
  for (const auto& ex : batch) {
    if (ex.x0.rows() != ex.x_t.rows() || ex.x0.cols() != ex.x_t.cols()) {
      throw ValidationError("x0", "target shape differs from x_t");
    }
    const Eigen::MatrixXd y = forward(ex.x_t, ex.t, ex.conditions, &c);
    const Eigen::MatrixXd diff = y - ex.x0;
    const double elems = static_cast<double>(y.size());
    total += diff.squaredNorm() / elems;

    const Eigen::MatrixXd dy = (2.0 / (elems * b)) * diff;
    grad.w_out += dy * c.k.transpose();
    grad.b_out += dy.rowwise().sum();

    const Eigen::MatrixXd dz =
        ((p.w_out.transpose() * dy).array() * (1.0 - c.k.array().square())).matrix();
    grad.w_hidden += dz * c.h.transpose();
    grad.b_hidden += dz.rowwise().sum();

    Eigen::MatrixXd da =
        ((p.w_hidden.transpose() * dz).array() * (1.0 - c.h.array().square())).matrix();
    const Eigen::VectorXd dpre_sum = da.rowwise().sum();
    grad.u_pool += dpre_sum * c.pooled.transpose();
    const Eigen::VectorXd dtoken = (p.u_pool.transpose() * dpre_sum) / static_cast<double>(c.tokens);
    da.colwise() += dtoken;

    grad.w_in += da * c.window.transpose();
    Eigen::VectorXd dshared = da.rowwise().sum();
    if (config_.mode == ConditioningMode::per_frame) {
      grad.w_cond += da * ex.conditions.transpose();
    } else {
      grad.w_cond += dtoken * ex.conditions.col(0).transpose();
      dshared += dtoken;
    }
    grad.w_time += dshared * c.tau.transpose();
    grad.b_embed += dshared;
  }
  return total / b;
}

nlohmann::json Denoiser::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  const auto& names = DenoiserParams::names();
  const auto tensors = params_.tensors();
  for (std::size_t i = 0; i < DenoiserParams::kTensorCount; ++i) {
    params[names[i]] = matrix_json(*tensors[i]);
  }
  return {
      {"format", "caring.denoiser"},
      {"version", 1},
      {"config",
       {{"feature_dim", config_.feature_dim},
        {"embedding_dim", config_.embedding_dim},
        {"hidden", config_.hidden},
        {"time_dim", config_.time_dim},
        {"mode", to_string(config_.mode)}}},
      {"skeleton", caring::to_json(skeleton_)},
      {"fps", fps_},
      {"norm",
       {{"mean", std::vector<double>(norm_.mean.data(), norm_.mean.data() + norm_.mean.size())},
        {"scale", norm_.scale}}},
      {"schedule", {{"betas", schedule_.betas()}}},
      {"embedder", {{"dim", embedder_.dim()}, {"salt", embedder_.salt()}}},
      {"params", std::move(params)},
  };
}

Denoiser Denoiser::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "caring.denoiser") {
      throw ParseError("not a denoiser checkpoint");
    }
    if (j.value("version", 0) != 1) throw ParseError("unsupported checkpoint version");
    const auto& jc = j.at("config");
    DenoiserConfig cfg;
    cfg.feature_dim = jc.at("feature_dim").get<int>();
    cfg.embedding_dim = jc.at("embedding_dim").get<int>();
    cfg.hidden = jc.at("hidden").get<int>();
    cfg.time_dim = jc.at("time_dim").get<int>();
    cfg.mode = conditioning_mode_from_string(jc.at("mode").get<std::string>());
    FeatureNorm norm;
    const auto mean = j.at("norm").at("mean").get<std::vector<double>>();
    norm.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    norm.scale = j.at("norm").at("scale").get<double>();
    auto schedule = NoiseSchedule::from_betas(j.at("schedule").at("betas").get<std::vector<double>>());
    Denoiser d(cfg, skeleton_from_json(j.at("skeleton")), j.at("fps").get<double>(), std::move(norm),
               std::move(schedule), 0, j.at("embedder").at("salt").get<std::uint64_t>());
    const auto& names = DenoiserParams::names();
    auto tensors = d.params_.tensors();
    for (std::size_t i = 0; i < DenoiserParams::kTensorCount; ++i) {
      Eigen::MatrixXd m = matrix_from_json(j.at("params").at(names[i]), names[i]);
      if (m.rows() != tensors[i]->rows() || m.cols() != tensors[i]->cols()) {
        throw ParseError(std::string("params.") + names[i] + ": shape does not match config");
      }
      *tensors[i] = std::move(m);
    }
    if (!d.params_.all_finite()) throw ValidationError("params", "non-finite parameter");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed denoiser checkpoint: ") + e.what());
  }
}

bool operator==(const Denoiser& a, const Denoiser& b) { return a.to_json() == b.to_json(); }

void save_denoiser(const Denoiser& denoiser, const std::filesystem::path& path) {
  write_text_file(path, denoiser.to_json().dump());
}

Denoiser load_denoiser(const std::filesystem::path& path) {
  return Denoiser::from_json(parse_json_text(read_text_file(path)));
}

}  // namespace caring::gen
