#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "goalex/errors.hpp"

namespace goalex {

using Json = nlohmann::ordered_json;

enum class GoalLevel { High, Low };

struct Actor {
  std::string name;
  std::string description;

  bool operator==(const Actor&) const = default;
};

struct Goal {
  std::string text;
  GoalLevel level = GoalLevel::High;
  std::optional<std::string> actor;  // required when level == High
  std::optional<int> parent;         // required when level == Low; index into the high-level list

  bool operator==(const Goal&) const = default;
};

struct ProjectDescription {
  std::string project_id;
  std::optional<std::string> raw_readme;
  std::optional<std::string> description;

  // True when the run has to synthesize the description from the README first.
  bool needs_preprocessing() const;
};

struct GoalModel {
  std::string project_id;
  std::vector<Actor> actors;
  std::vector<Goal> high_level;
  std::vector<Goal> low_level;

  bool operator==(const GoalModel&) const = default;
};

struct GroundTruthDataset {
  std::string dataset_id;
  std::vector<Actor> actors;
  std::vector<Goal> high_level;
  std::vector<Goal> low_level;
};

struct ApiEndpoint {
  std::string name;
  std::string method;
  std::string path;
  std::string description;
};

struct ApiMapping {
  std::string high_level_goal;
  std::string low_level_goal;
  std::string api_name;

  bool operator==(const ApiMapping&) const = default;
};

struct Critique {
  double score = 0.0;
  std::string comment;

  bool operator==(const Critique&) const = default;
};

// Empty result means every invariant holds; otherwise one entry per violation.
std::vector<std::string> validate_goal_model(const GoalModel& model);

// Case-insensitive membership, matching the actor-name uniqueness rule.
bool contains_actor(const std::vector<Actor>& actors, const std::string& name);

// Throws SchemaError on a malformed document, IntegrityError on dangling references.
GroundTruthDataset parse_ground_truth(const std::string& file_bytes);
std::string serialize_ground_truth(const GroundTruthDataset& dataset);

ProjectDescription parse_project_description(const std::string& file_bytes);
std::vector<ApiEndpoint> parse_api_catalogue(const std::string& file_bytes);

// JSON shapes shared by fixtures, run artifacts and the structured-output schemas.
Json actors_to_json(const std::vector<Actor>& actors);
Json goals_to_json(const std::vector<Goal>& goals);
std::vector<Actor> actors_from_json(const Json& j);
std::vector<Goal> goals_from_json(const Json& j, GoalLevel level);

}  // namespace goalex
