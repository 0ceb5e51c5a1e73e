#include "goalex/config.hpp"

#include <filesystem>

#include "goalex/util.hpp"

namespace goalex::cli {

namespace {

namespace fs = std::filesystem;

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

ProviderConfig parse_provider(const Json& j, const ProviderConfig& defaults) {
  ProviderConfig p = defaults;
  if (j.contains("mode")) p.mode = j["mode"].get<std::string>();
  if (p.mode != "mock" && p.mode != "live")
    throw ConfigError("provider mode must be 'mock' or 'live', got '" + p.mode + "'");
  if (j.contains("base_url")) p.base_url = j["base_url"].get<std::string>();
  if (j.contains("model")) p.model = j["model"].get<std::string>();
  if (j.contains("api_key_env")) p.api_key_env = j["api_key_env"].get<std::string>();
  if (j.contains("chat_path")) p.chat_path = j["chat_path"].get<std::string>();
  if (j.contains("max_retries")) p.max_retries = j["max_retries"].get<int>();
  if (j.contains("backoff_ms")) p.backoff_ms = j["backoff_ms"].get<int>();
  if (j.contains("timeout_s")) p.timeout_s = j["timeout_s"].get<int>();
  if (p.mode == "live" && p.base_url.empty())
    throw ConfigError("live provider needs a base_url");
  return p;
}

}  // namespace

RunnerConfig RunnerConfig::load(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  RunnerConfig cfg;

  try {
    if (doc.contains("strategy"))
      cfg.loop.strategy = prompting::strategy_from_name(doc["strategy"].get<std::string>());
    if (doc.contains("critic_enabled")) cfg.loop.critic_enabled = doc["critic_enabled"].get<bool>();
    if (doc.contains("quality_threshold"))
      cfg.loop.quality_threshold = doc["quality_threshold"].get<double>();
    if (doc.contains("max_iterations")) cfg.loop.max_iterations = doc["max_iterations"].get<int>();
    if (doc.contains("keep")) {
      const std::string keep = doc["keep"].get<std::string>();
      if (keep == "last")
        cfg.loop.keep = pipeline::LoopConfig::Keep::Last;
      else if (keep == "best")
        cfg.loop.keep = pipeline::LoopConfig::Keep::Best;
      else
        throw ConfigError("keep must be 'last' or 'best'");
    }
    cfg.loop.validate();

    if (doc.contains("metric_convention")) {
      const std::string conv = doc["metric_convention"].get<std::string>();
      if (conv == "paper")
        cfg.convention = eval::MetricConvention::Paper;
      else if (conv == "bertscore")
        cfg.convention = eval::MetricConvention::BertScore;
      else
        throw ConfigError("metric_convention must be 'paper' or 'bertscore'");
    }

    if (doc.contains("providers")) {
      const Json& providers = doc["providers"];
      if (providers.contains("generator"))
        cfg.generator = parse_provider(providers["generator"], cfg.generator);
      if (providers.contains("critic")) cfg.critic = parse_provider(providers["critic"], cfg.critic);
    }
    if (doc.contains("mock") && doc["mock"].is_object() && doc["mock"].contains("script_file"))
      cfg.mock_script_file = resolve(base, doc["mock"]["script_file"].get<std::string>());

    if (doc.contains("embedder")) {
      const Json& e = doc["embedder"];
      if (e.contains("backend")) cfg.embedder.backend = e["backend"].get<std::string>();
      if (cfg.embedder.backend != "hash" && cfg.embedder.backend != "http")
        throw ConfigError("embedder backend must be 'hash' or 'http'");
      if (e.contains("dimension")) cfg.embedder.dimension = e["dimension"].get<int>();
      if (e.contains("base_url")) cfg.embedder.base_url = e["base_url"].get<std::string>();
      if (e.contains("model")) cfg.embedder.model = e["model"].get<std::string>();
      if (e.contains("api_key_env")) cfg.embedder.api_key_env = e["api_key_env"].get<std::string>();
      if (e.contains("path")) cfg.embedder.path = e["path"].get<std::string>();
      if (e.contains("timeout_s")) cfg.embedder.timeout_s = e["timeout_s"].get<int>();
      if (cfg.embedder.backend == "http" && cfg.embedder.base_url.empty())
        throw ConfigError("http embedder needs a base_url");
    }

    if (!doc.contains("paths") || !doc["paths"].is_object())
      throw ConfigError("config needs a 'paths' object");
    const Json& paths = doc["paths"];
    auto want = [&](const char* key) -> std::string {
      if (!paths.contains(key) || !paths[key].is_string())
        throw ConfigError(std::string("paths.") + key + " is required");
      return resolve(base, paths[key].get<std::string>());
    };
    cfg.paths.templates = want("templates");
    cfg.paths.shot_examples = want("shot_examples");
    cfg.paths.datasets = want("datasets");
    cfg.paths.projects = want("projects");
    cfg.paths.stopwords = want("stopwords");
    if (paths.contains("apis") && paths["apis"].is_string())
      cfg.paths.apis = resolve(base, paths["apis"].get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return cfg;
}

}  // namespace goalex::cli
