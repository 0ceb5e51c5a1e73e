#pragma once

#include <string>
#include <vector>

#include "goalex/domain.hpp"
#include "goalex/embedding.hpp"
#include "goalex/matching.hpp"
#include "goalex/textprep.hpp"

namespace goalex::eval {

struct TaskMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// "Paper" divides the matched-similarity sum by |X| (generated) for recall and by |Y|
// (reference) for precision, exactly as printed; "BertScore" swaps the denominators.
enum class MetricConvention { Paper, BertScore };

TaskMetrics compute_metrics(const MatchingResult& matching, int size_x, int size_y,
                            MetricConvention convention = MetricConvention::Paper,
                            std::vector<std::string>* warnings = nullptr);

enum class EvalTask { Actors, HighLevel, LowLevel };

std::string eval_task_name(EvalTask task);
std::string eval_task_label(EvalTask task);  // table heading

struct EvalRow {
  std::string dataset_id;
  EvalTask task = EvalTask::Actors;
  std::string strategy;  // "zero-shot" | "one-shot" | "few-shot"; empty when not tied to a run
  bool critic_enabled = true;
  TaskMetrics metrics;
  MatchingResult matching;
  std::vector<std::string> generated;  // original texts, X side
  std::vector<std::string> reference;  // original texts, Y side
  std::vector<std::string> warnings;
};

/// Three rows (actors, high-level, low-level). Actor names are compared as-is; goal
/// texts are preprocessed. Hierarchy links are ignored, levels evaluated independently.
std::vector<EvalRow> evaluate_run(const GoalModel& model, const GroundTruthDataset& truth,
                                  const Embedder& backend, const TextPreprocessor& prep,
                                  MetricConvention convention = MetricConvention::Paper);

}  // namespace goalex::eval
