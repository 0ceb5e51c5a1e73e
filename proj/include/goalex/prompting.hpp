#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "goalex/domain.hpp"

namespace goalex::prompting {

enum class Task { Preprocess, Actors, HighLevel, LowLevel, ApiMapping, Critique };

std::string task_name(Task task);
Task task_from_name(const std::string& name);

enum class ShotStrategy { ZeroShot, OneShot, FewShot };

int shot_count(ShotStrategy strategy);  // 0 / 1 / 3
std::string strategy_name(ShotStrategy strategy);
ShotStrategy strategy_from_name(const std::string& name);

struct ShotExample {
  Task task = Task::Actors;
  std::string source_name;
  std::string input_payload;
  std::string expected_output;                 // generation tasks
  std::optional<Critique> score_and_comment;   // critique task only
};

struct PromptTemplate {
  std::string system_text;
  std::string user_text;
};

struct PromptPayload {
  std::string system_text;
  std::string user_text;
  int embedded_examples = 0;
  bool includes_prior_critique = false;
};

using Context = std::map<std::string, std::string>;

// {name} placeholders; "{{" and "}}" render literal braces. Unknown placeholder values
// raise MissingPlaceholder, malformed templates raise TemplateError.
std::string render_template(const std::string& text, const Context& context);

// "### system" / "### user" sections.
PromptTemplate parse_template_file(const std::string& contents);

class TemplateStore {
 public:
  static TemplateStore from_directory(const std::string& dir);  // <task_name>.prompt files
  static TemplateStore from_map(std::map<std::string, PromptTemplate> templates);
  const PromptTemplate& get(Task task) const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

class ShotStore {
 public:
  static ShotStore from_file(const std::string& path);
  static ShotStore from_json(const Json& doc);
  // Examples for a task in configuration-file order.
  const std::vector<ShotExample>& for_task(Task task) const;

 private:
  std::map<std::string, std::vector<ShotExample>> by_task_;
  std::vector<ShotExample> empty_;
};

class PromptEngine {
 public:
  PromptEngine(TemplateStore templates, ShotStore shots);

  // 0/1/3 examples for zero/one/few-shot, in store order. StoreIncomplete when the
  // store cannot satisfy the strategy.
  std::vector<ShotExample> select_shot_examples(Task task, ShotStrategy strategy) const;

  PromptPayload build_prompt(Task task, ShotStrategy strategy, const Context& context,
                             const std::optional<Critique>& prior_critique = {}) const;

  // The critic is few-shot only: always embeds the three critique examples. The stage
  // and candidate are injected into the template context.
  PromptPayload build_critic_prompt(Task stage, const Context& context,
                                    const std::string& candidate_output) const;

 private:
  TemplateStore templates_;
  ShotStore shots_;
};

}  // namespace goalex::prompting
