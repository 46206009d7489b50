#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace caring::gen {

/// Deterministic bag-of-words text embedding.
///
/// Each lower-cased alphanumeric token hashes to a seeded Gaussian vector;
/// a text embeds as the normalized sum of its token vectors, so phrases that
/// share words land near each other. Text without tokens hashes as a whole.
class TextEmbedder {
 public:
  explicit TextEmbedder(int dim = 16, std::uint64_t salt = 0);

  int dim() const { return dim_; }
  std::uint64_t salt() const { return salt_; }

  /// Unit vector of length dim().
  Eigen::VectorXd embed(std::string_view text) const;
  /// The zero vector used for classifier-free (unconditional) passes.
  Eigen::VectorXd null_embedding() const { return Eigen::VectorXd::Zero(dim_); }

  static std::vector<std::string> tokenize(std::string_view text);

 private:
  Eigen::VectorXd token_vector(std::string_view token) const;

  int dim_;
  std::uint64_t salt_;
};

}  // namespace caring::gen
