#include "goalex/pipeline.hpp"

#include <set>

#include "goalex/util.hpp"

namespace goalex::pipeline {

using gateway::Role;
using prompting::ShotStrategy;
using prompting::Task;

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Preprocess: return "preprocess";
    case Stage::Actors: return "actors";
    case Stage::HighLevel: return "high_level";
    case Stage::LowLevel: return "low_level";
    case Stage::ApiMapping: return "api_mapping";
  }
  return "actors";
}

void LoopConfig::validate() const {
  if (quality_threshold < 0.0 || quality_threshold > 10.0)
    throw ConfigError("quality_threshold must be in [0, 10]");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (temperature != 0.0) throw ConfigError("temperature is fixed at 0");
}

namespace {

Task task_for(Stage stage) {
  switch (stage) {
    case Stage::Preprocess: return Task::Preprocess;
    case Stage::Actors: return Task::Actors;
    case Stage::HighLevel: return Task::HighLevel;
    case Stage::LowLevel: return Task::LowLevel;
    case Stage::ApiMapping: return Task::ApiMapping;
  }
  return Task::Actors;
}

std::string schema_for(Stage stage) {
  switch (stage) {
    case Stage::Preprocess: return gateway::kSchemaPlainText;
    case Stage::Actors: return gateway::kSchemaActorList;
    case Stage::HighLevel: return gateway::kSchemaGoalListHigh;
    case Stage::LowLevel: return gateway::kSchemaGoalListLow;
    case Stage::ApiMapping: return gateway::kSchemaApiMappingList;
  }
  return gateway::kSchemaPlainText;
}

StageOutput to_stage_output(gateway::StructuredOutput&& value) {
  return std::visit(
      [](auto&& v) -> StageOutput {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Critique>)
          throw Error("a critique is not a stage output");
        else
          return StageOutput(std::move(v));
      },
      std::move(value));
}

std::optional<std::string> check_actor_output(const StageOutput& output) {
  const auto& actors = std::get<std::vector<Actor>>(output);
  std::set<std::string> seen;
  for (const Actor& a : actors) {
    if (trim(a.name).empty()) return "actor with an empty name";
    if (!seen.insert(to_lower(a.name)).second) return "duplicate actor name '" + a.name + "'";
  }
  return std::nullopt;
}

}  // namespace

std::string render_stage_output(const StageOutput& output) {
  if (const auto* text = std::get_if<std::string>(&output)) return *text;
  if (const auto* actors = std::get_if<std::vector<Actor>>(&output))
    return gateway::wire_actors(*actors).dump();
  if (const auto* goals = std::get_if<std::vector<Goal>>(&output))
    return gateway::wire_goals(*goals).dump();
  const auto& mappings = std::get<std::vector<ApiMapping>>(output);
  Json arr = Json::array();
  for (const ApiMapping& m : mappings)
    arr.push_back({{"high_level_goal", m.high_level_goal},
                   {"low_level_goal", m.low_level_goal},
                   {"api_name", m.api_name}});
  return arr.dump();
}

Orchestrator::Orchestrator(const prompting::PromptEngine& engine, gateway::Gateway& gw,
                           LoopConfig config)
    : engine_(engine), gateway_(gw), config_(config) {
  config_.validate();
}

StageOutput Orchestrator::generate_once(Stage stage, const prompting::Context& context,
                                        const std::optional<Critique>& prior_critique,
                                        const OutputValidator& validator) {
  // Looped stages follow the configured shot strategy; README preprocessing and API
  // mapping stay zero-shot (no curated examples exist for them).
  const bool looped = stage == Stage::Actors || stage == Stage::HighLevel ||
                      stage == Stage::LowLevel;
  const ShotStrategy strategy = looped ? config_.strategy : ShotStrategy::ZeroShot;
  const std::string schema = schema_for(stage);

  prompting::PromptPayload payload =
      engine_.build_prompt(task_for(stage), strategy, context, prior_critique);

  auto attempt = [&](const prompting::PromptPayload& p) -> StageOutput {
    const gateway::ChatResponse response =
        gateway_.chat(gateway::make_request(Role::Generator, p, schema));
    StageOutput output = to_stage_output(gateway::parse_structured_output(response.raw_text, schema));
    std::optional<std::string> violation;
    if (stage == Stage::Actors) violation = check_actor_output(output);
    if (!violation && validator) violation = validator(output);
    if (violation) throw OutputParseFailure(*violation);
    return output;
  };

  try {
    return attempt(payload);
  } catch (const OutputParseFailure& first) {
    prompting::PromptPayload retry = payload;
    retry.user_text += "\n\nReturn only valid JSON matching the schema.";
    try {
      return attempt(retry);
    } catch (const OutputParseFailure& second) {
      throw StageFailed(stage, std::string("output rejected twice: ") + first.what() +
                                   "; then: " + second.what());
    }
  }
}

std::string Orchestrator::preprocess_readme(const std::string& raw_readme) {
  if (trim(raw_readme).empty())
    throw PreconditionViolation("preprocess_readme: README must be non-empty");
  prompting::Context context{{"readme", raw_readme}};
  const prompting::PromptPayload payload =
      engine_.build_prompt(Task::Preprocess, ShotStrategy::ZeroShot, context);
  const gateway::ChatResponse response = gateway_.chat(
      gateway::make_request(Role::Generator, payload, gateway::kSchemaPlainText));
  const std::string description = trim(response.raw_text);
  if (description.empty()) throw StageFailed(Stage::Preprocess, "provider returned no text");
  return description;
}

StageResult Orchestrator::run_feedback_loop(Stage stage, const prompting::Context& context,
                                            const OutputValidator& validator) {
  if (stage != Stage::Actors && stage != Stage::HighLevel && stage != Stage::LowLevel)
    throw PreconditionViolation("run_feedback_loop drives only the actor and goal stages");

  StageResult result;
  result.stage = stage;

  try {
    std::vector<StageOutput> outputs;
    std::optional<Critique> prior;
    while (true) {
      outputs.push_back(generate_once(stage, context, prior, validator));
      if (!config_.critic_enabled) {
        result.output = std::move(outputs.back());
        result.iterations_used = 1;
        result.converged = true;
        return result;
      }
      const std::string candidate = render_stage_output(outputs.back());
      const prompting::PromptPayload critic_payload =
          engine_.build_critic_prompt(task_for(stage), context, candidate);
      const gateway::ChatResponse critic_response = gateway_.chat(
          gateway::make_request(Role::Critic, critic_payload, gateway::kSchemaCritique));
      Critique critique;
      try {
        critique = gateway::parse_critique(critic_response.raw_text);
      } catch (const CritiqueParseFailure&) {
        // A broken critic must not destroy a good generation: score it 0 and iterate.
        critique = Critique{0.0, trim(critic_response.raw_text)};
      }
      result.critiques.push_back(critique);
      if (critique.score >= config_.quality_threshold ||
          static_cast<int>(outputs.size()) >= config_.max_iterations)
        break;
      prior = critique;
    }

    result.iterations_used = static_cast<int>(outputs.size());
    size_t kept = outputs.size() - 1;
    if (config_.keep == LoopConfig::Keep::Best) {
      for (size_t i = 0; i < result.critiques.size(); ++i)
        if (result.critiques[i].score > result.critiques[kept].score) kept = i;
    }
    result.output = std::move(outputs[kept]);
    result.final_score = result.critiques[kept].score;
    result.converged = result.critiques.back().score >= config_.quality_threshold;
    return result;
  } catch (const StageFailed&) {
    throw;
  } catch (const Error& e) {
    throw StageFailed(stage, e.what());
  }
}

PipelineRun Orchestrator::run_pipeline(const ProjectDescription& project,
                                       const std::vector<ApiEndpoint>& endpoints) {
  PipelineRun run;
  auto record = [&](StageResult result) {
    run.stages.push_back(result);
    if (on_stage_complete) on_stage_complete(run.stages.back());
  };

  std::string description = project.description ? trim(*project.description) : "";
  if (description.empty()) {
    if (!project.needs_preprocessing())
      throw StageFailed(Stage::Preprocess, "project has neither a description nor a README");
    try {
      description = preprocess_readme(*project.raw_readme);
    } catch (const StageFailed&) {
      throw;
    } catch (const Error& e) {
      throw StageFailed(Stage::Preprocess, e.what());
    }
    StageResult pre;
    pre.stage = Stage::Preprocess;
    pre.output = description;
    pre.iterations_used = 1;
    pre.converged = true;
    record(std::move(pre));
  }

  prompting::Context context;
  context["description"] = description;
  context["project_description"] = description;

  StageResult actors_result = run_feedback_loop(Stage::Actors, context);
  const auto actors = std::get<std::vector<Actor>>(actors_result.output);
  record(std::move(actors_result));
  context["actors"] = gateway::wire_actors(actors).dump();

  const OutputValidator hl_validator = [&actors](const StageOutput& output)
      -> std::optional<std::string> {
    for (const Goal& g : std::get<std::vector<Goal>>(output))
      if (!contains_actor(actors, g.actor.value_or("")))
        return "high-level goal references unknown actor '" + g.actor.value_or("") + "'";
    return std::nullopt;
  };
  StageResult hl_result = run_feedback_loop(Stage::HighLevel, context, hl_validator);
  const auto high_level = std::get<std::vector<Goal>>(hl_result.output);
  record(std::move(hl_result));
  context["highLevelGoals"] = gateway::wire_goals(high_level).dump();

  const int hl_count = static_cast<int>(high_level.size());
  const OutputValidator ll_validator = [hl_count](const StageOutput& output)
      -> std::optional<std::string> {
    for (const Goal& g : std::get<std::vector<Goal>>(output)) {
      const int parent = g.parent.value_or(-1);
      if (parent < 0 || parent >= hl_count)
        return "low-level goal has out-of-range parent index " + std::to_string(parent);
    }
    return std::nullopt;
  };
  StageResult ll_result = run_feedback_loop(Stage::LowLevel, context, ll_validator);
  const auto low_level = std::get<std::vector<Goal>>(ll_result.output);
  record(std::move(ll_result));

  run.model = GoalModel{project.project_id, actors, high_level, low_level};
  const std::vector<std::string> violations = validate_goal_model(run.model);
  if (!violations.empty())
    throw StageFailed(Stage::LowLevel, "assembled model failed validation: " + violations.front());

  if (!endpoints.empty()) {
    if (low_level.empty()) {
      log_warn("skipping API mapping: no low-level goals to map");
    } else {
      run.mappings = map_goals_to_apis(low_level, endpoints, high_level);
      StageResult map_result;
      map_result.stage = Stage::ApiMapping;
      map_result.output = run.mappings;
      map_result.iterations_used = 1;
      map_result.converged = true;
      record(std::move(map_result));
    }
  }
  return run;
}

std::vector<ApiMapping> Orchestrator::map_goals_to_apis(const std::vector<Goal>& low_level,
                                                        const std::vector<ApiEndpoint>& endpoints,
                                                        const std::vector<Goal>& high_level) {
  if (low_level.empty() || endpoints.empty())
    throw PreconditionViolation("map_goals_to_apis: goals and endpoints must be non-empty");

  Json goals = Json::array();
  for (const Goal& g : low_level) {
    const int parent = g.parent.value_or(-1);
    const std::string parent_text =
        parent >= 0 && parent < static_cast<int>(high_level.size())
            ? high_level[static_cast<size_t>(parent)].text
            : "";
    goals.push_back({{"low_level_goal", g.text}, {"high_level_goal", parent_text}});
  }
  Json catalogue = Json::array();
  for (const ApiEndpoint& e : endpoints)
    catalogue.push_back({{"name", e.name},
                         {"method", e.method},
                         {"path", e.path},
                         {"description", e.description}});

  prompting::Context context;
  context["lowLevelGoals"] = goals.dump();
  context["apiEndpoints"] = catalogue.dump();

  const StageOutput output = generate_once(Stage::ApiMapping, context, std::nullopt, {});
  const auto raw = std::get<std::vector<ApiMapping>>(output);

  std::set<std::string> known;
  for (const ApiEndpoint& e : endpoints) known.insert(e.name);
  std::vector<ApiMapping> mappings;
  for (const ApiMapping& m : raw) {
    if (known.contains(m.api_name)) {
      mappings.push_back(m);
    } else {
      log_warn("dropping mapping to unknown endpoint '" + m.api_name + "'");
    }
  }
  return mappings;
}

}  // namespace goalex::pipeline
