#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "goalex/errors.hpp"

namespace goalex::eval {

enum class Side { Generated, Reference };

struct EmbeddingSet {
  Side side = Side::Generated;
  std::vector<std::string> original;
  std::vector<std::string> preprocessed;  // the strings that were embedded
  Eigen::MatrixXd vectors;                // one row per item

  int size() const { return static_cast<int>(vectors.rows()); }
  int dimension() const { return static_cast<int>(vectors.cols()); }
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Eigen::MatrixXd embed(const std::vector<std::string>& texts) const = 0;
  virtual int dimension() const = 0;
};

/// Deterministic offline backend: token feature hashing into a fixed-width vector,
/// L2-normalised. Signed buckets keep unrelated texts from drifting toward cosine 1.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(int dimension = 256);
  Eigen::MatrixXd embed(const std::vector<std::string>& texts) const override;
  int dimension() const override { return dim_; }

 private:
  int dim_;
};

struct HttpEmbedderConfig {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::string path = "/v1/embeddings";
  int timeout_s = 60;
};

/// Transformer-backed embeddings over an OpenAI-compatible endpoint.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config);
  Eigen::MatrixXd embed(const std::vector<std::string>& texts) const override;
  int dimension() const override { return 0; }  // fixed by the service

 private:
  HttpEmbedderConfig config_;
};

EmbeddingSet embed(const std::vector<std::string>& texts, const Embedder& backend, Side side);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// entry(i, j) = cos(x_i, y_j), clamped to [-1, 1].
Eigen::MatrixXd similarity_matrix(const EmbeddingSet& x, const EmbeddingSet& y);

}  // namespace goalex::eval
