#include "goalex/gateway.hpp"

#include <httplib.h>

#include <cmath>
#include <regex>
#include <thread>

#include "goalex/util.hpp"

namespace goalex::gateway {

std::string role_name(Role role) { return role == Role::Generator ? "generator" : "critic"; }

Role role_from_name(const std::string& name) {
  if (name == "generator") return Role::Generator;
  if (name == "critic") return Role::Critic;
  throw ConfigError("unknown endpoint role: " + name);
}

std::string request_digest(const ChatRequest& request) {
  std::uint64_t h = fnv1a64(role_name(request.endpoint_role));
  for (const ChatMessage& m : request.messages) {
    h = fnv1a64("\x1e", h);
    h = fnv1a64(m.role, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(m.content, h);
  }
  return to_hex(h);
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (size_t i = 0; i < entries.size(); ++i) {
    const TranscriptEntry& e = entries[i];
    Json line;
    line["schema_version"] = 1;
    line["run_id"] = run_id;
    line["seq"] = i;
    line["role"] = role_name(e.request.endpoint_role);
    line["digest"] = e.digest;
    line["timestamp"] = e.timestamp;
    Json messages = Json::array();
    for (const ChatMessage& m : e.request.messages)
      messages.push_back({{"role", m.role}, {"content", m.content}});
    line["request"] = {{"messages", std::move(messages)},
                       {"temperature", e.request.temperature},
                       {"schema", e.request.response_schema_id}};
    Json metadata = Json::object();
    for (const auto& [k, v] : e.response.provider_metadata) metadata[k] = v;
    line["response"] = {{"raw_text", e.response.raw_text}, {"metadata", std::move(metadata)}};
    out += line.dump();
    out.push_back('\n');
  }
  return out;
}

Transcript Transcript::from_jsonl(const std::string& contents) {
  Transcript t;
  size_t pos = 0;
  int line_no = 0;
  while (pos < contents.size()) {
    size_t eol = contents.find('\n', pos);
    if (eol == std::string::npos) eol = contents.size();
    const std::string line = contents.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("transcript line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    TranscriptEntry entry;
    entry.request.endpoint_role = role_from_name(doc.at("role").get<std::string>());
    entry.digest = doc.at("digest").get<std::string>();
    entry.timestamp = doc.at("timestamp").get<std::string>();
    const Json& req = doc.at("request");
    entry.request.temperature = req.at("temperature").get<double>();
    entry.request.response_schema_id = req.at("schema").get<std::string>();
    for (const Json& m : req.at("messages"))
      entry.request.messages.push_back(
          {m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    const Json& resp = doc.at("response");
    entry.response.raw_text = resp.at("raw_text").get<std::string>();
    if (resp.contains("metadata"))
      for (auto it = resp.at("metadata").begin(); it != resp.at("metadata").end(); ++it)
        entry.response.provider_metadata[it.key()] = it.value().get<std::string>();
    if (t.run_id.empty() && doc.contains("run_id")) t.run_id = doc["run_id"].get<std::string>();
    t.entries.push_back(std::move(entry));
  }
  return t;
}

ScriptedProvider::ScriptedProvider(std::vector<std::string> responses, std::string model_name)
    : responses_(responses.begin(), responses.end()), model_name_(std::move(model_name)) {}

ProviderResult ScriptedProvider::complete(const ChatRequest& request) {
  if (responses_.empty())
    throw Error("scripted provider exhausted (role " + role_name(request.endpoint_role) + ")");
  ProviderResult result;
  result.response.raw_text = responses_.front();
  responses_.pop_front();
  result.response.provider_metadata["model"] = model_name_;
  return result;
}

HttpChatProvider::HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ConfigError("http provider: base_url is required");
  if (config_.max_retries < 1) throw ConfigError("http provider: max_retries must be >= 1");
}

ProviderResult HttpChatProvider::complete(const ChatRequest& request) {
  Json body;
  body["model"] = config_.model;
  Json messages = Json::array();
  for (const ChatMessage& m : request.messages)
    messages.push_back({{"role", m.role}, {"content", m.content}});
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string failure = "no attempt made";
  bool rate_limited = false;
  for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 1 && config_.backoff_ms > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_ms << (attempt - 2)));

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_s);
    client.set_read_timeout(config_.timeout_s);
    auto res = client.Post(config_.chat_path, headers, payload, "application/json");

    if (!res) {
      failure = "transport failure: " + httplib::to_string(res.error());
      rate_limited = false;
      continue;
    }
    if (res->status == 429) {
      failure = "rate limited (429)";
      rate_limited = true;
      continue;
    }
    if (res->status >= 500) {
      failure = "server error (" + std::to_string(res->status) + ")";
      rate_limited = false;
      continue;
    }
    if (res->status != 200)
      throw Error("provider returned status " + std::to_string(res->status) + ": " + res->body);

    Json doc;
    try {
      doc = Json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(std::string("provider returned invalid JSON: ") + e.what());
    }
    if (!doc.contains("choices") || doc["choices"].empty() ||
        !doc["choices"][0].contains("message"))
      throw Error("provider response missing choices[0].message");

    ProviderResult result;
    result.response.raw_text = doc["choices"][0]["message"].value("content", "");
    if (result.response.raw_text.empty()) throw Error("provider returned an empty completion");
    result.response.provider_metadata["model"] = doc.value("model", config_.model);
    if (doc.contains("usage")) {
      const Json& usage = doc["usage"];
      if (usage.contains("prompt_tokens"))
        result.response.provider_metadata["prompt_tokens"] =
            std::to_string(usage["prompt_tokens"].get<long long>());
      if (usage.contains("completion_tokens"))
        result.response.provider_metadata["completion_tokens"] =
            std::to_string(usage["completion_tokens"].get<long long>());
    }
    return result;
  }
  if (rate_limited)
    throw RateLimited("provider still rate limited after " + std::to_string(config_.max_retries) +
                      " attempts");
  throw ProviderUnreachable("provider unreachable after " + std::to_string(config_.max_retries) +
                            " attempts: " + failure);
}

ReplayProvider::ReplayProvider(const Transcript& recorded) {
  for (const TranscriptEntry& e : recorded.entries) by_digest_[e.digest].push_back(e);
}

ProviderResult ReplayProvider::complete(const ChatRequest& request) {
  const std::string digest = request_digest(request);
  auto it = by_digest_.find(digest);
  if (it == by_digest_.end() || it->second.empty())
    throw ReplayMiss("no recorded entry for digest " + digest + " (role " +
                     role_name(request.endpoint_role) + ")");
  ProviderResult result;
  result.response = it->second.front().response;
  result.recorded_timestamp = it->second.front().timestamp;
  it->second.pop_front();
  return result;
}

Gateway::Gateway(std::shared_ptr<ChatProvider> generator, std::shared_ptr<ChatProvider> critic,
                 std::string run_id)
    : generator_(std::move(generator)), critic_(std::move(critic)) {
  transcript_.run_id = std::move(run_id);
}

ChatResponse Gateway::chat(const ChatRequest& request) {
  if (request.temperature != 0.0)
    throw ConfigError("chat requests must carry temperature 0, got " +
                      std::to_string(request.temperature));
  ChatProvider* provider =
      request.endpoint_role == Role::Generator ? generator_.get() : critic_.get();
  if (!provider)
    throw ConfigError("no provider configured for role " + role_name(request.endpoint_role));

  ProviderResult result = provider->complete(request);

  std::lock_guard<std::mutex> lock(mutex_);
  TranscriptEntry entry;
  entry.request = request;
  entry.response = result.response;
  entry.digest = request_digest(request);
  entry.timestamp = result.recorded_timestamp.value_or(utc_timestamp_now());
  transcript_.entries.push_back(std::move(entry));
  if (request.endpoint_role == Role::Generator)
    ++generator_calls_;
  else
    ++critic_calls_;
  return result.response;
}

int Gateway::call_count(Role role) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return role == Role::Generator ? generator_calls_ : critic_calls_;
}

ChatRequest make_request(Role role, const prompting::PromptPayload& payload,
                         std::string response_schema_id) {
  ChatRequest request;
  request.endpoint_role = role;
  request.messages.push_back({"system", payload.system_text});
  request.messages.push_back({"user", payload.user_text});
  request.temperature = 0.0;
  request.response_schema_id = std::move(response_schema_id);
  return request;
}

std::vector<Json> extract_json_documents(const std::string& text) {
  std::vector<Json> docs;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (c != '{' && c != '[') {
      ++i;
      continue;
    }
    // find the balanced end, skipping quoted strings
    size_t j = i;
    int depth = 0;
    bool in_string = false, escaped = false, balanced = false;
    for (; j < n; ++j) {
      const char d = text[j];
      if (in_string) {
        if (escaped)
          escaped = false;
        else if (d == '\\')
          escaped = true;
        else if (d == '"')
          in_string = false;
        continue;
      }
      if (d == '"')
        in_string = true;
      else if (d == '{' || d == '[')
        ++depth;
      else if (d == '}' || d == ']') {
        --depth;
        if (depth == 0) {
          balanced = true;
          break;
        }
      }
    }
    if (!balanced) {
      ++i;
      continue;
    }
    const std::string span = text.substr(i, j - i + 1);
    Json parsed = Json::parse(span, nullptr, false);
    if (!parsed.is_discarded()) {
      bool duplicate = false;
      for (const Json& seen : docs)
        if (seen == parsed) duplicate = true;
      if (!duplicate) docs.push_back(std::move(parsed));
      i = j + 1;
    } else {
      ++i;
    }
  }
  return docs;
}

namespace {

bool conforms_actor_list(const Json& j) {
  if (!j.is_array()) return false;
  for (const Json& o : j) {
    if (!o.is_object()) return false;
    if (!o.contains("name") || !o["name"].is_string() ||
        trim(o["name"].get<std::string>()).empty())
      return false;
  }
  return true;
}

bool conforms_goal_list(const Json& j, GoalLevel level) {
  if (!j.is_array()) return false;
  for (const Json& o : j) {
    if (!o.is_object()) return false;
    if (!o.contains("text") || !o["text"].is_string() ||
        trim(o["text"].get<std::string>()).empty())
      return false;
    if (level == GoalLevel::High) {
      if (!o.contains("actor") || !o["actor"].is_string() ||
          trim(o["actor"].get<std::string>()).empty())
        return false;
    } else {
      if (!o.contains("parent") || !o["parent"].is_number_integer()) return false;
    }
  }
  return true;
}

bool conforms_goal_list_high(const Json& j) { return conforms_goal_list(j, GoalLevel::High); }
bool conforms_goal_list_low(const Json& j) { return conforms_goal_list(j, GoalLevel::Low); }

bool conforms_critique(const Json& j) {
  if (!j.is_object()) return false;
  if (!j.contains("score") || !j["score"].is_number()) return false;
  if (!j.contains("comment") || !j["comment"].is_string()) return false;
  return true;
}

bool conforms_api_mapping_list(const Json& j) {
  if (!j.is_array()) return false;
  for (const Json& o : j) {
    if (!o.is_object()) return false;
    for (const char* key : {"high_level_goal", "low_level_goal", "api_name"})
      if (!o.contains(key) || !o[key].is_string() || trim(o[key].get<std::string>()).empty())
        return false;
  }
  return true;
}

Json single_conforming_document(const std::string& raw_text, bool (*conforms)(const Json&),
                                const char* schema_id) {
  std::vector<Json> matches;
  for (Json& doc : extract_json_documents(raw_text))
    if (conforms(doc)) matches.push_back(std::move(doc));
  if (matches.empty())
    throw OutputParseFailure(std::string("no JSON document conforming to schema '") + schema_id +
                             "' found");
  if (matches.size() > 1)
    throw OutputParseFailure(std::string("multiple distinct documents conform to schema '") +
                             schema_id + "'");
  return matches.front();
}

}  // namespace

std::vector<Actor> parse_actor_list(const std::string& raw_text) {
  const Json doc = single_conforming_document(raw_text, conforms_actor_list, kSchemaActorList);
  return actors_from_json(doc);
}

std::vector<Goal> parse_goal_list(const std::string& raw_text, GoalLevel level) {
  const bool high = level == GoalLevel::High;
  const Json doc = single_conforming_document(
      raw_text, high ? conforms_goal_list_high : conforms_goal_list_low,
      high ? kSchemaGoalListHigh : kSchemaGoalListLow);
  return goals_from_json(doc, level);
}

std::vector<ApiMapping> parse_api_mapping_list(const std::string& raw_text) {
  const Json doc =
      single_conforming_document(raw_text, conforms_api_mapping_list, kSchemaApiMappingList);
  std::vector<ApiMapping> mappings;
  for (const Json& o : doc)
    mappings.push_back({o["high_level_goal"].get<std::string>(),
                        o["low_level_goal"].get<std::string>(),
                        o["api_name"].get<std::string>()});
  return mappings;
}

Critique parse_critique(const std::string& raw_text) {
  // JSON form first
  std::vector<Json> candidates;
  for (Json& doc : extract_json_documents(raw_text))
    if (conforms_critique(doc)) candidates.push_back(std::move(doc));
  if (candidates.size() == 1) {
    const double score = candidates.front()["score"].get<double>();
    if (score < 0.0 || score > 10.0 || !std::isfinite(score))
      throw CritiqueParseFailure("critique score " + std::to_string(score) +
                                 " outside [0, 10]");
    return Critique{score, candidates.front()["comment"].get<std::string>()};
  }
  if (candidates.size() > 1) throw CritiqueParseFailure("multiple critique documents found");

  // textual "Score: X/10 ... Comment: ..." form
  static const std::regex score_re(R"(\bscore\b[\s:*]*([0-9]+(?:\.[0-9]+)?)\s*(?:/\s*10)?)",
                                   std::regex::icase);
  std::smatch m;
  if (!std::regex_search(raw_text, m, score_re))
    throw CritiqueParseFailure("no parseable score found");
  const double score = std::stod(m[1].str());
  if (score < 0.0 || score > 10.0)
    throw CritiqueParseFailure("critique score " + std::to_string(score) + " outside [0, 10]");

  std::string comment;
  static const std::regex comment_re(R"(\bcomment\b[\s:*]*)", std::regex::icase);
  std::smatch cm;
  const std::string after_score = m.suffix().str();
  if (std::regex_search(after_score, cm, comment_re))
    comment = trim(cm.suffix().str());
  else
    comment = trim(after_score);
  return Critique{score, comment};
}

StructuredOutput parse_structured_output(const std::string& raw_text,
                                         const std::string& schema_id) {
  if (schema_id == kSchemaPlainText) {
    const std::string text = trim(raw_text);
    if (text.empty()) throw OutputParseFailure("empty plain-text response");
    return text;
  }
  if (schema_id == kSchemaActorList) return parse_actor_list(raw_text);
  if (schema_id == kSchemaGoalListHigh) return parse_goal_list(raw_text, GoalLevel::High);
  if (schema_id == kSchemaGoalListLow) return parse_goal_list(raw_text, GoalLevel::Low);
  if (schema_id == kSchemaApiMappingList) return parse_api_mapping_list(raw_text);
  if (schema_id == kSchemaCritique) {
    try {
      return parse_critique(raw_text);
    } catch (const CritiqueParseFailure& e) {
      throw OutputParseFailure(e.what());
    }
  }
  throw ConfigError("unregistered response schema: " + schema_id);
}

Json wire_actors(const std::vector<Actor>& actors) {
  Json arr = Json::array();
  for (const Actor& a : actors) arr.push_back({{"name", a.name}, {"descr", a.description}});
  return arr;
}

Json wire_goals(const std::vector<Goal>& goals) {
  Json arr = Json::array();
  for (const Goal& g : goals) {
    if (g.level == GoalLevel::High)
      arr.push_back({{"text", g.text}, {"actor", g.actor.value_or("")}});
    else
      arr.push_back({{"text", g.text}, {"parent", g.parent.value_or(-1)}});
  }
  return arr;
}

MockScript script_from_fixture(const GroundTruthDataset& dataset,
                               const std::vector<ApiEndpoint>& endpoints,
                               bool include_preprocess) {
  MockScript script;
  if (include_preprocess)
    script.generator.push_back("The project provides " + dataset.dataset_id +
                               ", a system supporting its stakeholders' day-to-day workflows.");
  script.generator.push_back(wire_actors(dataset.actors).dump());
  script.generator.push_back(wire_goals(dataset.high_level).dump());
  script.generator.push_back(wire_goals(dataset.low_level).dump());
  if (!endpoints.empty()) {
    Json mappings = Json::array();
    const size_t count = std::min<size_t>(2, dataset.low_level.size());
    for (size_t i = 0; i < count && i < endpoints.size(); ++i) {
      const Goal& ll = dataset.low_level[i];
      const int parent = ll.parent.value_or(0);
      mappings.push_back({{"high_level_goal", dataset.high_level[static_cast<size_t>(parent)].text},
                          {"low_level_goal", ll.text},
                          {"api_name", endpoints[i].name}});
    }
    script.generator.push_back(mappings.dump());
  }
  const Json critique = Json{{"score", 10.0}, {"comment", "Accurate and complete."}};
  for (int i = 0; i < 3; ++i) script.critic.push_back(critique.dump());
  return script;
}

}  // namespace goalex::gateway
