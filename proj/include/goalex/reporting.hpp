#pragma once

#include <string>
#include <utility>
#include <vector>

#include "goalex/embedding.hpp"
#include "goalex/metrics.hpp"
#include "goalex/prompting.hpp"

namespace goalex::report {

struct EvalReport {
  std::vector<eval::EvalRow> rows;
  std::string metric_convention = "paper";

  Json to_json() const;
  static EvalReport from_json(const Json& doc);
  static EvalReport load(const std::string& path);
};

// Prec./Recall/F1 rows by task-per-strategy columns, two decimals, best value per
// task-metric group starred. Cells average over datasets when several are present.
std::string render_results_table(const EvalReport& report);

// Side-by-side (dataset, task, strategy, metric) rows with critic-on minus critic-off
// deltas. Throws CellMismatch when the reports do not cover identical cells.
std::string render_ablation_table(const EvalReport& critic_on, const EvalReport& critic_off);

struct ShotSimRow {
  std::string dataset;
  std::string task;
  double average = 0.0;
};

struct ShotSimilarityReport {
  std::vector<ShotSimRow> generator_rows;
  std::vector<ShotSimRow> generator_task_averages;
  std::vector<ShotSimRow> critic_rows;
  std::vector<ShotSimRow> critic_task_averages;

  Json to_json() const;
};

// Mean cosine between each dataset description and every shot example (input plus
// expected output) of a task; generator-side tasks and the critic example set.
ShotSimilarityReport build_shot_similarity_report(
    const std::vector<std::pair<std::string, std::string>>& dataset_descriptions,
    const prompting::ShotStore& shots, const eval::Embedder& backend);

std::string render_shot_similarity(const ShotSimilarityReport& report);

}  // namespace goalex::report
