#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "goalex/domain.hpp"
#include "goalex/prompting.hpp"

namespace goalex::gateway {

enum class Role { Generator, Critic };

std::string role_name(Role role);
Role role_from_name(const std::string& name);

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  Role endpoint_role = Role::Generator;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::string response_schema_id;
};

struct ChatResponse {
  std::string raw_text;
  std::map<std::string, std::string> provider_metadata;
};

// Digest over (endpoint role, message roles, message texts); prompt edits invalidate
// stale transcripts loudly instead of replaying the wrong response.
std::string request_digest(const ChatRequest& request);

struct TranscriptEntry {
  ChatRequest request;
  ChatResponse response;
  std::string timestamp;
  std::string digest;
};

struct Transcript {
  std::string run_id;
  std::vector<TranscriptEntry> entries;

  std::string to_jsonl() const;
  static Transcript from_jsonl(const std::string& contents);
};

struct ProviderResult {
  ChatResponse response;
  std::optional<std::string> recorded_timestamp;  // set by replay only
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ProviderResult complete(const ChatRequest& request) = 0;
};

/// Canned responses consumed in order; drives offline runs and tests.
class ScriptedProvider final : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> responses, std::string model_name = "mock");
  ProviderResult complete(const ChatRequest& request) override;
  size_t remaining() const { return responses_.size(); }

 private:
  std::deque<std::string> responses_;
  std::string model_name_;
};

struct HttpProviderConfig {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::string chat_path = "/v1/chat/completions";
  int max_retries = 3;   // total attempts
  int backoff_ms = 1000; // doubled after each failed attempt
  int timeout_s = 60;
};

/// OpenAI-compatible chat-completions client with bounded retry/backoff.
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config);
  ProviderResult complete(const ChatRequest& request) override;

 private:
  HttpProviderConfig config_;
};

/// Serves recorded responses, matched by (endpoint role, message digest); repeated
/// digests are consumed in recorded order.
class ReplayProvider final : public ChatProvider {
 public:
  explicit ReplayProvider(const Transcript& recorded);
  ProviderResult complete(const ChatRequest& request) override;

 private:
  std::map<std::string, std::deque<TranscriptEntry>> by_digest_;
};

/// Single point of contact with the models: enforces temperature 0, appends every
/// exchange to the run transcript, counts calls per role.
class Gateway {
 public:
  Gateway(std::shared_ptr<ChatProvider> generator, std::shared_ptr<ChatProvider> critic,
          std::string run_id = "");

  ChatResponse chat(const ChatRequest& request);

  const Transcript& transcript() const { return transcript_; }
  int call_count(Role role) const;

 private:
  std::shared_ptr<ChatProvider> generator_;
  std::shared_ptr<ChatProvider> critic_;
  Transcript transcript_;
  int generator_calls_ = 0;
  int critic_calls_ = 0;
  mutable std::mutex mutex_;
};

ChatRequest make_request(Role role, const prompting::PromptPayload& payload,
                         std::string response_schema_id);

// Structured-output schemas.
inline constexpr const char* kSchemaPlainText = "plain_text";
inline constexpr const char* kSchemaActorList = "actor_list";
inline constexpr const char* kSchemaGoalListHigh = "goal_list_high";
inline constexpr const char* kSchemaGoalListLow = "goal_list_low";
inline constexpr const char* kSchemaCritique = "critique";
inline constexpr const char* kSchemaApiMappingList = "api_mapping_list";

using StructuredOutput =
    std::variant<std::string, std::vector<Actor>, std::vector<Goal>, Critique,
                 std::vector<ApiMapping>>;

// Requires exactly one JSON document conforming to the schema somewhere in the text;
// surrounding prose and code fences are tolerated.
StructuredOutput parse_structured_output(const std::string& raw_text,
                                         const std::string& schema_id);

std::vector<Actor> parse_actor_list(const std::string& raw_text);
std::vector<Goal> parse_goal_list(const std::string& raw_text, GoalLevel level);
std::vector<ApiMapping> parse_api_mapping_list(const std::string& raw_text);

// Accepts {"score": .., "comment": ".."} or the textual "Score: X/10 ... Comment: ..."
// form; the score must land in [0, 10].
Critique parse_critique(const std::string& raw_text);

// Every balanced JSON document found in the text, in order, deduplicated by value.
std::vector<Json> extract_json_documents(const std::string& text);

// Wire shapes used inside prompts and mock scripts.
Json wire_actors(const std::vector<Actor>& actors);          // [{"name","descr"}]
Json wire_goals(const std::vector<Goal>& goals);             // [{"text","actor"|"parent"}]

struct MockScript {
  std::vector<std::string> generator;
  std::vector<std::string> critic;
};

// Generator/critic response sequences that make a pipeline run reproduce the dataset
// exactly (critic always scores 10).
MockScript script_from_fixture(const GroundTruthDataset& dataset,
                               const std::vector<ApiEndpoint>& endpoints = {},
                               bool include_preprocess = false);

}  // namespace goalex::gateway
