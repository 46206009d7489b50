#include "caring/generator/text_embedder.hpp"

#include <cctype>
#include <random>

#include "caring/errors.hpp"

namespace caring::gen {

namespace {

std::uint64_t fnv1a(std::string_view text, std::uint64_t salt) {
  std::uint64_t h = 1469598103934665603ULL ^ salt;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

TextEmbedder::TextEmbedder(int dim, std::uint64_t salt) : dim_(dim), salt_(salt) {
  if (dim_ < 1) {
    throw ValidationError("embedding_dim", "embedding dimension must be positive");
  }
}

std::vector<std::string> TextEmbedder::tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Eigen::VectorXd TextEmbedder::token_vector(std::string_view token) const {
  std::mt19937_64 rng(fnv1a(token, salt_));
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = normal(rng);
  return v;
}

Eigen::VectorXd TextEmbedder::embed(std::string_view text) const {
  const auto tokens = tokenize(text);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim_);
  if (tokens.empty()) {
    sum = token_vector(text);
  } else {
    for (const auto& t : tokens) sum += token_vector(t);
  }
  const double n = sum.norm();
  if (n == 0.0) {
    sum = Eigen::VectorXd::Zero(dim_);
    sum[0] = 1.0;
    return sum;
  }
  return sum / n;
}

}  // namespace caring::gen
