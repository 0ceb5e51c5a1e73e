#include <doctest.h>

#include <string>

#include "goalex/domain.hpp"
#include "goalex/util.hpp"

using namespace goalex;

namespace {

std::string fixture_bytes(const std::string& id) {
  return read_file(std::string(GOALEX_DATA_DIR) + "/datasets/" + id + ".json");
}

GoalModel valid_model() {
  GoalModel m;
  m.project_id = "demo";
  m.actors = {{"Citizens", "residents reporting issues"}, {"Admin", "keeps things running"}};
  m.high_level = {{"Reports get handled", GoalLevel::High, "Citizens", {}},
                  {"Platform stays healthy", GoalLevel::High, "Admin", {}}};
  m.low_level = {{"Submit a report", GoalLevel::Low, {}, 0},
                 {"Review metrics", GoalLevel::Low, {}, 1}};
  return m;
}

}  // namespace

TEST_CASE("bundled GestaoHospital fixture counts") {
  const GroundTruthDataset ds = parse_ground_truth(fixture_bytes("gestao-hospital"));
  CHECK(ds.dataset_id == "gestao-hospital");
  CHECK(ds.actors.size() == 5);
  CHECK(ds.high_level.size() == 4);
  CHECK(ds.low_level.size() == 20);
}

TEST_CASE("all bundled fixtures load and total 20/24/82") {
  size_t actors = 0, high = 0, low = 0;
  for (const char* id :
       {"gestao-hospital", "genome-nexus", "urban-maintenance", "london-ambulance"}) {
    const GroundTruthDataset ds = parse_ground_truth(fixture_bytes(id));
    actors += ds.actors.size();
    high += ds.high_level.size();
    low += ds.low_level.size();
  }
  CHECK(actors == 20);
  CHECK(high == 24);
  CHECK(low == 82);
}

TEST_CASE("round trip: parse after serialize is identity") {
  for (const char* id :
       {"gestao-hospital", "genome-nexus", "urban-maintenance", "london-ambulance"}) {
    const GroundTruthDataset ds = parse_ground_truth(fixture_bytes(id));
    const GroundTruthDataset again = parse_ground_truth(serialize_ground_truth(ds));
    CHECK(again.dataset_id == ds.dataset_id);
    REQUIRE(again.actors.size() == ds.actors.size());
    REQUIRE(again.high_level.size() == ds.high_level.size());
    REQUIRE(again.low_level.size() == ds.low_level.size());
    for (size_t i = 0; i < ds.actors.size(); ++i) CHECK(again.actors[i] == ds.actors[i]);
    for (size_t i = 0; i < ds.high_level.size(); ++i)
      CHECK(again.high_level[i] == ds.high_level[i]);
    for (size_t i = 0; i < ds.low_level.size(); ++i) CHECK(again.low_level[i] == ds.low_level[i]);
  }
}

TEST_CASE("dangling parent_ref raises IntegrityError") {
  const char* doc = R"({
    "dataset_id": "bad",
    "actors": [{"name": "A", "description": ""}],
    "high_level": [{"text": "goal", "actor": "A"}],
    "low_level": [{"text": "sub", "parent": 5}]
  })";
  CHECK_THROWS_AS(parse_ground_truth(doc), IntegrityError);
}

TEST_CASE("missing parent key raises IntegrityError") {
  const char* doc = R"({
    "dataset_id": "bad",
    "actors": [{"name": "A", "description": ""}],
    "high_level": [{"text": "goal", "actor": "A"}],
    "low_level": [{"text": "sub"}]
  })";
  CHECK_THROWS_AS(parse_ground_truth(doc), IntegrityError);
}

TEST_CASE("zero actors raises SchemaError") {
  const char* doc = R"({
    "dataset_id": "bad",
    "actors": [],
    "high_level": [{"text": "goal", "actor": "A"}],
    "low_level": [{"text": "sub", "parent": 0}]
  })";
  CHECK_THROWS_AS(parse_ground_truth(doc), SchemaError);
}

TEST_CASE("malformed JSON raises SchemaError") {
  CHECK_THROWS_AS(parse_ground_truth("{not json"), SchemaError);
  CHECK_THROWS_AS(parse_ground_truth("[1,2,3]"), SchemaError);
}

TEST_CASE("validate_goal_model accepts a consistent model") {
  CHECK(validate_goal_model(valid_model()).empty());
}

TEST_CASE("validate_goal_model reports dangling parent_ref") {
  GoalModel m = valid_model();
  m.low_level.push_back({"Orphan", GoalLevel::Low, {}, 7});
  const auto violations = validate_goal_model(m);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("dangling parent_ref") != std::string::npos);
}

TEST_CASE("validate_goal_model reports case-insensitive duplicate actors") {
  GoalModel m = valid_model();
  m.actors.push_back({"admin", "duplicate in different case"});
  const auto violations = validate_goal_model(m);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("duplicate actor name") != std::string::npos);
}

TEST_CASE("validate_goal_model reports dangling actor_ref and missing refs") {
  GoalModel m = valid_model();
  m.high_level.push_back({"Ghost goal", GoalLevel::High, "Nobody", {}});
  m.high_level.push_back({"No actor", GoalLevel::High, {}, {}});
  m.low_level.push_back({"No parent", GoalLevel::Low, {}, {}});
  const auto violations = validate_goal_model(m);
  CHECK(violations.size() == 3);
}

TEST_CASE("project descriptions load and flag preprocessing needs") {
  const ProjectDescription with_description = parse_project_description(
      read_file(std::string(GOALEX_DATA_DIR) + "/projects/urban-maintenance.json"));
  CHECK(with_description.description.has_value());
  CHECK_FALSE(with_description.needs_preprocessing());

  const ProjectDescription readme_only =
      parse_project_description(R"({"project_id": "x", "raw_readme": "# Title"})");
  CHECK(readme_only.needs_preprocessing());

  CHECK_THROWS_AS(parse_project_description(R"({"project_id": "x"})"), SchemaError);
  CHECK_THROWS_AS(parse_project_description(R"({"project_id": "x", "description": "  "})"),
                  SchemaError);
}

TEST_CASE("api catalogue loads") {
  const auto endpoints = parse_api_catalogue(
      read_file(std::string(GOALEX_DATA_DIR) + "/apis/gestao-hospital.json"));
  REQUIRE(endpoints.size() >= 2);
  CHECK(endpoints[0].name == "insertUsingPOST");
  CHECK(endpoints[1].name == "findAllUsingGET");
}
