#pragma once

#include <optional>
#include <string>

#include "goalex/metrics.hpp"
#include "goalex/pipeline.hpp"

namespace goalex::cli {

struct ProviderConfig {
  std::string mode = "mock";  // mock | live
  std::string base_url;
  std::string model;
  std::string api_key_env;
  std::string chat_path = "/v1/chat/completions";
  int max_retries = 3;
  int backoff_ms = 1000;
  int timeout_s = 60;
};

struct EmbedderConfig {
  std::string backend = "hash";  // hash | http
  int dimension = 256;
  std::string base_url;
  std::string model;
  std::string api_key_env;
  std::string path = "/v1/embeddings";
  int timeout_s = 60;
};

struct PathsConfig {
  std::string templates;
  std::string shot_examples;
  std::string datasets;
  std::string projects;
  std::string apis;
  std::string stopwords;
};

struct RunnerConfig {
  pipeline::LoopConfig loop;
  eval::MetricConvention convention = eval::MetricConvention::Paper;
  ProviderConfig generator;
  ProviderConfig critic;
  std::optional<std::string> mock_script_file;  // overrides fixture-derived mock scripts
  EmbedderConfig embedder;
  PathsConfig paths;  // absolute after loading

  // Relative paths resolve against the config file's directory. ConfigError on
  // malformed or out-of-range values.
  static RunnerConfig load(const std::string& path);
};

}  // namespace goalex::cli
