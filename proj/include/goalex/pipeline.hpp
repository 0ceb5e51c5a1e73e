#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "goalex/domain.hpp"
#include "goalex/gateway.hpp"
#include "goalex/prompting.hpp"

namespace goalex::pipeline {

enum class Stage { Preprocess, Actors, HighLevel, LowLevel, ApiMapping };

std::string stage_name(Stage stage);

struct LoopConfig {
  double quality_threshold = 8.5;
  int max_iterations = 3;
  prompting::ShotStrategy strategy = prompting::ShotStrategy::ZeroShot;
  bool critic_enabled = true;
  double temperature = 0.0;  // fixed
  enum class Keep { Last, Best } keep = Keep::Last;

  void validate() const;  // ConfigError on out-of-range values
};

using StageOutput =
    std::variant<std::string, std::vector<Actor>, std::vector<Goal>, std::vector<ApiMapping>>;

// Compact JSON (or plain text) form of a stage output, as shown to the critic.
std::string render_stage_output(const StageOutput& output);

struct StageResult {
  Stage stage = Stage::Actors;
  StageOutput output;
  int iterations_used = 0;
  std::optional<double> final_score;  // score of the returned output; empty without critic
  bool converged = false;             // threshold reached, or critic disabled
  std::vector<Critique> critiques;    // one per iteration when the critic is on
};

struct StageFailed : Error {
  Stage stage;
  StageFailed(Stage s, const std::string& message)
      : Error("stage " + stage_name(s) + " failed: " + message), stage(s) {}
};

struct PipelineRun {
  GoalModel model;
  std::vector<ApiMapping> mappings;
  std::vector<StageResult> stages;
};

// Returns a violation description for a parsed stage output, or nothing when it is
// acceptable; violations trigger the same single re-prompt as a parse failure.
using OutputValidator = std::function<std::optional<std::string>(const StageOutput&)>;

/// Runs the five phases: plain generation for README preprocessing and API mapping,
/// the generator-critic feedback loop for actors and both goal levels.
class Orchestrator {
 public:
  Orchestrator(const prompting::PromptEngine& engine, gateway::Gateway& gw, LoopConfig config);

  // Single generator call, no critic loop. The README must be non-empty.
  std::string preprocess_readme(const std::string& raw_readme);

  // Iterates generate -> critique until the score reaches the threshold or the
  // iteration cap; returns the last (or best, per config) generation.
  StageResult run_feedback_loop(Stage stage, const prompting::Context& context,
                                const OutputValidator& validator = {});

  // Phases in fixed order 1..5; phase 1 only without a ready description, phase 5 only
  // with an endpoint catalogue. Partial results are announced via on_stage_complete.
  PipelineRun run_pipeline(const ProjectDescription& project,
                           const std::vector<ApiEndpoint>& endpoints = {});

  // Exploratory single-call mapping; returned api_name values are guaranteed to exist
  // in the catalogue, unknown ones are dropped with a warning.
  std::vector<ApiMapping> map_goals_to_apis(const std::vector<Goal>& low_level,
                                            const std::vector<ApiEndpoint>& endpoints,
                                            const std::vector<Goal>& high_level);

  std::function<void(const StageResult&)> on_stage_complete;

 private:
  StageOutput generate_once(Stage stage, const prompting::Context& context,
                            const std::optional<Critique>& prior_critique,
                            const OutputValidator& validator);

  const prompting::PromptEngine& engine_;
  gateway::Gateway& gateway_;
  LoopConfig config_;
};

}  // namespace goalex::pipeline
