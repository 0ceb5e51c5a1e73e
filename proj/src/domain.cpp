#include "goalex/domain.hpp"

#include <set>
#include <string>

#include "goalex/util.hpp"

namespace goalex {

namespace {

const Json* find_key(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string require_string(const Json& j, const char* key, const std::string& where) {
  const Json* v = find_key(j, key);
  if (!v || !v->is_string()) throw SchemaError(where + ": missing or non-string '" + key + "'");
  return v->get<std::string>();
}

void check_actor_set(const std::vector<Actor>& actors, const std::string& where) {
  std::set<std::string> seen;
  for (size_t i = 0; i < actors.size(); ++i) {
    if (trim(actors[i].name).empty())
      throw SchemaError(where + ": actor " + std::to_string(i) + " has an empty name");
    if (!seen.insert(to_lower(actors[i].name)).second)
      throw SchemaError(where + ": duplicate actor name '" + actors[i].name + "'");
  }
}

}  // namespace

bool contains_actor(const std::vector<Actor>& actors, const std::string& name) {
  for (const Actor& a : actors)
    if (iequals(a.name, name)) return true;
  return false;
}

bool ProjectDescription::needs_preprocessing() const {
  const bool has_description = description && !trim(*description).empty();
  return !has_description && raw_readme && !trim(*raw_readme).empty();
}

std::vector<std::string> validate_goal_model(const GoalModel& model) {
  std::vector<std::string> violations;
  std::set<std::string> seen;
  for (size_t i = 0; i < model.actors.size(); ++i) {
    const Actor& a = model.actors[i];
    if (trim(a.name).empty())
      violations.push_back("actor " + std::to_string(i) + ": empty name");
    else if (!seen.insert(to_lower(a.name)).second)
      violations.push_back("duplicate actor name '" + a.name + "'");
  }
  for (size_t i = 0; i < model.high_level.size(); ++i) {
    const Goal& g = model.high_level[i];
    if (g.level != GoalLevel::High)
      violations.push_back("high-level goal " + std::to_string(i) + ": wrong level tag");
    if (trim(g.text).empty())
      violations.push_back("high-level goal " + std::to_string(i) + ": empty text");
    if (!g.actor || trim(*g.actor).empty())
      violations.push_back("high-level goal " + std::to_string(i) + ": missing actor_ref");
    else if (!contains_actor(model.actors, *g.actor))
      violations.push_back("high-level goal " + std::to_string(i) + ": dangling actor_ref '" +
                           *g.actor + "'");
  }
  const int hl_count = static_cast<int>(model.high_level.size());
  for (size_t i = 0; i < model.low_level.size(); ++i) {
    const Goal& g = model.low_level[i];
    if (g.level != GoalLevel::Low)
      violations.push_back("low-level goal " + std::to_string(i) + ": wrong level tag");
    if (trim(g.text).empty())
      violations.push_back("low-level goal " + std::to_string(i) + ": empty text");
    if (!g.parent)
      violations.push_back("low-level goal " + std::to_string(i) + ": missing parent_ref");
    else if (*g.parent < 0 || *g.parent >= hl_count)
      violations.push_back("low-level goal " + std::to_string(i) + ": dangling parent_ref " +
                           std::to_string(*g.parent));
  }
  return violations;
}

Json actors_to_json(const std::vector<Actor>& actors) {
  Json arr = Json::array();
  for (const Actor& a : actors) arr.push_back({{"name", a.name}, {"description", a.description}});
  return arr;
}

Json goals_to_json(const std::vector<Goal>& goals) {
  Json arr = Json::array();
  for (const Goal& g : goals) {
    Json o;
    o["text"] = g.text;
    if (g.level == GoalLevel::High)
      o["actor"] = g.actor.value_or("");
    else
      o["parent"] = g.parent.value_or(-1);
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<Actor> actors_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("actors: expected an array");
  std::vector<Actor> actors;
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& o = j[i];
    if (!o.is_object()) throw SchemaError("actors[" + std::to_string(i) + "]: expected an object");
    Actor a;
    a.name = require_string(o, "name", "actors[" + std::to_string(i) + "]");
    if (const Json* d = find_key(o, "description"); d && d->is_string())
      a.description = d->get<std::string>();
    else if (const Json* d2 = find_key(o, "descr"); d2 && d2->is_string())
      a.description = d2->get<std::string>();
    actors.push_back(std::move(a));
  }
  return actors;
}

std::vector<Goal> goals_from_json(const Json& j, GoalLevel level) {
  if (!j.is_array()) throw SchemaError("goals: expected an array");
  std::vector<Goal> goals;
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& o = j[i];
    const std::string where =
        (level == GoalLevel::High ? "high_level[" : "low_level[") + std::to_string(i) + "]";
    if (!o.is_object()) throw SchemaError(where + ": expected an object");
    Goal g;
    g.level = level;
    g.text = require_string(o, "text", where);
    if (trim(g.text).empty()) throw SchemaError(where + ": empty text");
    if (level == GoalLevel::High) {
      const Json* a = find_key(o, "actor");
      if (!a) throw IntegrityError(where + ": missing actor_ref");
      if (!a->is_string()) throw SchemaError(where + ": non-string 'actor'");
      g.actor = a->get<std::string>();
    } else {
      const Json* p = find_key(o, "parent");
      if (!p) throw IntegrityError(where + ": missing parent_ref");
      if (!p->is_number_integer()) throw SchemaError(where + ": non-integer 'parent'");
      g.parent = p->get<int>();
    }
    goals.push_back(std::move(g));
  }
  return goals;
}

GroundTruthDataset parse_ground_truth(const std::string& file_bytes) {
  Json doc;
  try {
    doc = Json::parse(file_bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("ground truth: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("ground truth: expected a JSON object");

  GroundTruthDataset ds;
  ds.dataset_id = require_string(doc, "dataset_id", "ground truth");
  if (trim(ds.dataset_id).empty()) throw SchemaError("ground truth: empty dataset_id");

  const Json* actors = find_key(doc, "actors");
  const Json* high = find_key(doc, "high_level");
  const Json* low = find_key(doc, "low_level");
  if (!actors || !high || !low)
    throw SchemaError("ground truth: actors, high_level and low_level are required");

  ds.actors = actors_from_json(*actors);
  ds.high_level = goals_from_json(*high, GoalLevel::High);
  ds.low_level = goals_from_json(*low, GoalLevel::Low);

  if (ds.actors.empty()) throw SchemaError("ground truth: actor count must be positive");
  if (ds.high_level.empty()) throw SchemaError("ground truth: high-level count must be positive");
  if (ds.low_level.empty()) throw SchemaError("ground truth: low-level count must be positive");
  check_actor_set(ds.actors, "ground truth");

  for (size_t i = 0; i < ds.high_level.size(); ++i) {
    if (!contains_actor(ds.actors, *ds.high_level[i].actor))
      throw IntegrityError("ground truth: high_level[" + std::to_string(i) +
                           "]: dangling actor_ref '" + *ds.high_level[i].actor + "'");
  }
  const int hl_count = static_cast<int>(ds.high_level.size());
  for (size_t i = 0; i < ds.low_level.size(); ++i) {
    const int p = *ds.low_level[i].parent;
    if (p < 0 || p >= hl_count)
      throw IntegrityError("ground truth: low_level[" + std::to_string(i) +
                           "]: dangling parent_ref " + std::to_string(p));
  }
  return ds;
}

std::string serialize_ground_truth(const GroundTruthDataset& dataset) {
  Json doc;
  doc["dataset_id"] = dataset.dataset_id;
  doc["actors"] = actors_to_json(dataset.actors);
  doc["high_level"] = goals_to_json(dataset.high_level);
  doc["low_level"] = goals_to_json(dataset.low_level);
  return doc.dump(2) + "\n";
}

ProjectDescription parse_project_description(const std::string& file_bytes) {
  Json doc;
  try {
    doc = Json::parse(file_bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("project: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("project: expected a JSON object");
  ProjectDescription p;
  p.project_id = require_string(doc, "project_id", "project");
  if (const Json* d = find_key(doc, "description")) {
    if (!d->is_string()) throw SchemaError("project: non-string 'description'");
    if (trim(d->get<std::string>()).empty())
      throw SchemaError("project: description must be non-empty after trimming");
    p.description = d->get<std::string>();
  }
  if (const Json* r = find_key(doc, "raw_readme")) {
    if (!r->is_string()) throw SchemaError("project: non-string 'raw_readme'");
    p.raw_readme = r->get<std::string>();
  }
  if (!p.description && !p.needs_preprocessing())
    throw SchemaError("project: needs a description or a non-empty raw_readme");
  return p;
}

std::vector<ApiEndpoint> parse_api_catalogue(const std::string& file_bytes) {
  Json doc;
  try {
    doc = Json::parse(file_bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("api catalogue: invalid JSON: ") + e.what());
  }
  const Json* arr = doc.is_array() ? &doc : find_key(doc, "endpoints");
  if (!arr || !arr->is_array()) throw SchemaError("api catalogue: expected an endpoint array");
  std::vector<ApiEndpoint> endpoints;
  for (size_t i = 0; i < arr->size(); ++i) {
    const Json& o = (*arr)[i];
    const std::string where = "endpoints[" + std::to_string(i) + "]";
    if (!o.is_object()) throw SchemaError(where + ": expected an object");
    ApiEndpoint e;
    e.name = require_string(o, "name", where);
    if (trim(e.name).empty()) throw SchemaError(where + ": empty name");
    if (const Json* m = find_key(o, "method"); m && m->is_string()) e.method = m->get<std::string>();
    if (const Json* p = find_key(o, "path"); p && p->is_string()) e.path = p->get<std::string>();
    if (const Json* d = find_key(o, "description"); d && d->is_string())
      e.description = d->get<std::string>();
    endpoints.push_back(std::move(e));
  }
  return endpoints;
}

}  // namespace goalex
