#include "goalex/embedding.hpp"

#include <httplib.h>

#include <json.hpp>

#include "goalex/textprep.hpp"
#include "goalex/util.hpp"

namespace goalex::eval {

HashingEmbedder::HashingEmbedder(int dimension) : dim_(dimension) {
  if (dim_ < 2) throw Error("embedding dimension must be at least 2");
}

Eigen::MatrixXd HashingEmbedder::embed(const std::vector<std::string>& texts) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(texts.size()), dim_);
  for (size_t row = 0; row < texts.size(); ++row) {
    for (const std::string& token : TextPreprocessor::tokenize(texts[row])) {
      const std::uint64_t h = fnv1a64(token);
      const int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dim_));
      const double sign = (h >> 63) ? -1.0 : 1.0;
      out(static_cast<Eigen::Index>(row), bucket) += sign;
    }
    const double norm = out.row(static_cast<Eigen::Index>(row)).norm();
    if (norm == 0.0) {
      // Tokenless text (or full sign cancellation) maps to a reserved bucket so the
      // not-all-zero invariant holds.
      out(static_cast<Eigen::Index>(row), 0) = 1.0;
    } else {
      out.row(static_cast<Eigen::Index>(row)) /= norm;
    }
  }
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("http embedder: base_url is required");
}

Eigen::MatrixXd HttpEmbedder::embed(const std::vector<std::string>& texts) const {
  if (texts.empty()) return Eigen::MatrixXd(0, 0);
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout_s);
  client.set_read_timeout(config_.timeout_s);

  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["input"] = texts;

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto result = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!result) throw BackendUnreachable("embedding backend unreachable: " + config_.base_url);
  if (result->status != 200)
    throw BackendUnreachable("embedding backend returned status " +
                             std::to_string(result->status));

  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendUnreachable(std::string("embedding backend: invalid JSON: ") + e.what());
  }
  if (!doc.contains("data") || !doc["data"].is_array() || doc["data"].size() != texts.size())
    throw BackendUnreachable("embedding backend: unexpected response shape");

  Eigen::MatrixXd out;
  for (size_t i = 0; i < texts.size(); ++i) {
    const auto& vec = doc["data"][i]["embedding"];
    if (!vec.is_array() || vec.empty())
      throw BackendUnreachable("embedding backend: missing embedding vector");
    if (i == 0) out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(texts.size()),
                                            static_cast<Eigen::Index>(vec.size()));
    if (static_cast<Eigen::Index>(vec.size()) != out.cols())
      throw DimensionMismatch("embedding backend: inconsistent dimensions");
    for (size_t d = 0; d < vec.size(); ++d)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = vec[d].get<double>();
  }
  return out;
}

EmbeddingSet embed(const std::vector<std::string>& texts, const Embedder& backend, Side side) {
  EmbeddingSet set;
  set.side = side;
  set.original = texts;
  set.preprocessed = texts;
  set.vectors = backend.embed(texts);
  return set;
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionMismatch("cosine: vectors differ in dimension");
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine: zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

Eigen::MatrixXd similarity_matrix(const EmbeddingSet& x, const EmbeddingSet& y) {
  if (x.size() == 0 || y.size() == 0) return Eigen::MatrixXd(x.size(), y.size());
  if (x.dimension() != y.dimension())
    throw DimensionMismatch("similarity_matrix: embedding dimensions differ (" +
                            std::to_string(x.dimension()) + " vs " +
                            std::to_string(y.dimension()) + ")");
  Eigen::MatrixXd xn = x.vectors;
  Eigen::MatrixXd yn = y.vectors;
  for (Eigen::Index i = 0; i < xn.rows(); ++i) {
    const double n = xn.row(i).norm();
    if (n == 0.0) throw ZeroVector("similarity_matrix: zero vector in generated set");
    xn.row(i) /= n;
  }
  for (Eigen::Index j = 0; j < yn.rows(); ++j) {
    const double n = yn.row(j).norm();
    if (n == 0.0) throw ZeroVector("similarity_matrix: zero vector in reference set");
    yn.row(j) /= n;
  }
  Eigen::MatrixXd sim = xn * yn.transpose();
  return sim.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace goalex::eval
