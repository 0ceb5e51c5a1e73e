#include "goalex/prompting.hpp"

#include <cctype>
#include <filesystem>

#include "goalex/util.hpp"

namespace goalex::prompting {

std::string task_name(Task task) {
  switch (task) {
    case Task::Preprocess: return "preprocess";
    case Task::Actors: return "actors";
    case Task::HighLevel: return "high_level";
    case Task::LowLevel: return "low_level";
    case Task::ApiMapping: return "api_mapping";
    case Task::Critique: return "critique";
  }
  return "actors";
}

Task task_from_name(const std::string& name) {
  if (name == "preprocess") return Task::Preprocess;
  if (name == "actors") return Task::Actors;
  if (name == "high_level") return Task::HighLevel;
  if (name == "low_level") return Task::LowLevel;
  if (name == "api_mapping") return Task::ApiMapping;
  if (name == "critique") return Task::Critique;
  throw ConfigError("unknown task name: " + name);
}

int shot_count(ShotStrategy strategy) {
  switch (strategy) {
    case ShotStrategy::ZeroShot: return 0;
    case ShotStrategy::OneShot: return 1;
    case ShotStrategy::FewShot: return 3;
  }
  return 0;
}

std::string strategy_name(ShotStrategy strategy) {
  switch (strategy) {
    case ShotStrategy::ZeroShot: return "zero-shot";
    case ShotStrategy::OneShot: return "one-shot";
    case ShotStrategy::FewShot: return "few-shot";
  }
  return "zero-shot";
}

ShotStrategy strategy_from_name(const std::string& name) {
  if (name == "zero-shot" || name == "zs") return ShotStrategy::ZeroShot;
  if (name == "one-shot" || name == "os") return ShotStrategy::OneShot;
  if (name == "few-shot" || name == "fs") return ShotStrategy::FewShot;
  throw ConfigError("unknown shot strategy: " + name);
}

std::string render_template(const std::string& text, const Context& context) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (c == '{') {
      if (i + 1 < n && text[i + 1] == '{') {
        out.push_back('{');
        i += 2;
        continue;
      }
      const size_t close = text.find('}', i + 1);
      if (close == std::string::npos) throw TemplateError("unterminated placeholder");
      const std::string name = text.substr(i + 1, close - i - 1);
      if (name.empty()) throw TemplateError("empty placeholder");
      for (char nc : name)
        if (!std::isalnum(static_cast<unsigned char>(nc)) && nc != '_')
          throw TemplateError("malformed placeholder '{" + name + "}'");
      auto it = context.find(name);
      if (it == context.end()) throw MissingPlaceholder("missing placeholder value '" + name + "'");
      out += it->second;
      i = close + 1;
    } else if (c == '}' && i + 1 < n && text[i + 1] == '}') {
      out.push_back('}');
      i += 2;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

PromptTemplate parse_template_file(const std::string& contents) {
  PromptTemplate tpl;
  std::string* current = nullptr;
  size_t pos = 0;
  bool any_section = false;
  while (pos <= contents.size()) {
    const size_t eol = contents.find('\n', pos);
    const std::string line =
        contents.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    const std::string t = trim(line);
    if (t == "### system") {
      current = &tpl.system_text;
      any_section = true;
    } else if (t == "### user") {
      current = &tpl.user_text;
      any_section = true;
    } else if (current) {
      current->append(line);
      current->push_back('\n');
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  if (!any_section) throw TemplateError("template has no '### system' / '### user' sections");
  tpl.system_text = trim(tpl.system_text);
  tpl.user_text = trim(tpl.user_text);
  if (tpl.user_text.empty()) throw TemplateError("template has an empty user section");
  return tpl;
}

TemplateStore TemplateStore::from_directory(const std::string& dir) {
  TemplateStore store;
  for (const char* name : {"preprocess", "actors", "high_level", "low_level", "api_mapping",
                           "critique"}) {
    const std::filesystem::path path = std::filesystem::path(dir) / (std::string(name) + ".prompt");
    if (!std::filesystem::exists(path)) throw TemplateError("missing template file: " + path.string());
    store.templates_[name] = parse_template_file(read_file(path.string()));
  }
  return store;
}

TemplateStore TemplateStore::from_map(std::map<std::string, PromptTemplate> templates) {
  TemplateStore store;
  store.templates_ = std::move(templates);
  return store;
}

const PromptTemplate& TemplateStore::get(Task task) const {
  auto it = templates_.find(task_name(task));
  if (it == templates_.end()) throw TemplateError("no template for task " + task_name(task));
  return it->second;
}

ShotStore ShotStore::from_file(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("shot store: invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

ShotStore ShotStore::from_json(const Json& doc) {
  if (!doc.is_array()) throw ConfigError("shot store: expected a JSON array");
  ShotStore store;
  for (size_t i = 0; i < doc.size(); ++i) {
    const Json& o = doc[i];
    const std::string where = "shot store entry " + std::to_string(i);
    if (!o.is_object() || !o.contains("task") || !o["task"].is_string())
      throw ConfigError(where + ": missing task");
    ShotExample ex;
    ex.task = task_from_name(o["task"].get<std::string>());
    if (o.contains("source") && o["source"].is_string()) ex.source_name = o["source"].get<std::string>();
    if (!o.contains("input") || !o["input"].is_string())
      throw ConfigError(where + ": missing input");
    ex.input_payload = o["input"].get<std::string>();
    if (ex.task == Task::Critique) {
      if (!o.contains("score") || !o["score"].is_number() || !o.contains("comment") ||
          !o["comment"].is_string())
        throw ConfigError(where + ": critique examples need score and comment");
      ex.score_and_comment = Critique{o["score"].get<double>(), o["comment"].get<std::string>()};
    } else {
      if (o.contains("score") || o.contains("comment"))
        throw ConfigError(where + ": generation examples must not carry score/comment");
      if (!o.contains("output") || !o["output"].is_string())
        throw ConfigError(where + ": missing output");
      ex.expected_output = o["output"].get<std::string>();
    }
    store.by_task_[task_name(ex.task)].push_back(std::move(ex));
  }
  return store;
}

const std::vector<ShotExample>& ShotStore::for_task(Task task) const {
  auto it = by_task_.find(task_name(task));
  return it == by_task_.end() ? empty_ : it->second;
}

PromptEngine::PromptEngine(TemplateStore templates, ShotStore shots)
    : templates_(std::move(templates)), shots_(std::move(shots)) {}

std::vector<ShotExample> PromptEngine::select_shot_examples(Task task,
                                                            ShotStrategy strategy) const {
  const int count = shot_count(strategy);
  if (count == 0) return {};
  const std::vector<ShotExample>& all = shots_.for_task(task);
  if (static_cast<int>(all.size()) < count)
    throw StoreIncomplete("shot store has " + std::to_string(all.size()) + " example(s) for " +
                          task_name(task) + ", " + std::to_string(count) + " required");
  return {all.begin(), all.begin() + count};
}

namespace {

std::string render_generator_examples(const std::vector<ShotExample>& examples) {
  std::string block = "Here are " + std::to_string(examples.size()) +
                      " worked example(s) for this task:\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    block += "\n### Example " + std::to_string(i + 1);
    if (!examples[i].source_name.empty()) block += " (" + examples[i].source_name + ")";
    block += "\n" + examples[i].input_payload + "\n\n***Output:*** " +
             examples[i].expected_output + "\n";
  }
  return block;
}

std::string render_critic_examples(const std::vector<ShotExample>& examples) {
  std::string block = "Here are " + std::to_string(examples.size()) +
                      " scored example(s) of this critique task:\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    const Critique& c = *examples[i].score_and_comment;
    block += "\n### Example " + std::to_string(i + 1);
    if (!examples[i].source_name.empty()) block += " (" + examples[i].source_name + ")";
    block += "\n" + examples[i].input_payload + "\n\n***Score:*** " + format_score(c.score) +
             "/10\n***Comment:*** " + c.comment + "\n";
  }
  return block;
}

std::string stage_label(Task task) {
  switch (task) {
    case Task::Actors: return "actors";
    case Task::HighLevel: return "high-level goals";
    case Task::LowLevel: return "low-level goals";
    default: return task_name(task);
  }
}

}  // namespace

PromptPayload PromptEngine::build_prompt(Task task, ShotStrategy strategy, const Context& context,
                                         const std::optional<Critique>& prior_critique) const {
  if (task == Task::Critique)
    throw PreconditionViolation("build_prompt is for generator tasks; use build_critic_prompt");
  const PromptTemplate& tpl = templates_.get(task);
  PromptPayload payload;
  payload.system_text = render_template(tpl.system_text, context);
  std::string user = render_template(tpl.user_text, context);

  const std::vector<ShotExample> examples = select_shot_examples(task, strategy);
  if (!examples.empty()) user = render_generator_examples(examples) + "\n" + user;
  payload.embedded_examples = static_cast<int>(examples.size());

  if (prior_critique) {
    user += "\n\n--- Previous attempt feedback ---\nScore: " +
            format_score(prior_critique->score) + "/10\n" + prior_critique->comment +
            "\n--- End of feedback ---";
    payload.includes_prior_critique = true;
  }
  payload.user_text = std::move(user);
  return payload;
}

PromptPayload PromptEngine::build_critic_prompt(Task stage, const Context& context,
                                                const std::string& candidate_output) const {
  if (trim(candidate_output).empty())
    throw MissingPlaceholder("nothing to critique: empty candidate output");
  Context ctx = context;
  ctx["candidate"] = candidate_output;
  ctx["stage"] = stage_label(stage);
  if (stage == Task::Actors) ctx["actors"] = candidate_output;

  const PromptTemplate& tpl = templates_.get(Task::Critique);
  PromptPayload payload;
  payload.system_text = render_template(tpl.system_text, ctx);

  const std::vector<ShotExample> examples =
      select_shot_examples(Task::Critique, ShotStrategy::FewShot);
  payload.user_text = render_critic_examples(examples) + "\n" + render_template(tpl.user_text, ctx);
  payload.embedded_examples = static_cast<int>(examples.size());
  return payload;
}

}  // namespace goalex::prompting
