#include "goalex/metrics.hpp"

#include "goalex/util.hpp"

namespace goalex::eval {

TaskMetrics compute_metrics(const MatchingResult& matching, int size_x, int size_y,
                            MetricConvention convention, std::vector<std::string>* warnings) {
  TaskMetrics metrics;
  if (size_x == 0 || size_y == 0) {
    if (warnings)
      warnings->push_back(size_x == 0 ? "empty generated set, metrics defined as 0"
                                      : "empty reference set, metrics defined as 0");
    return metrics;
  }
  const double sum = matching.total_similarity;
  if (convention == MetricConvention::Paper) {
    metrics.recall = sum / static_cast<double>(size_x);
    metrics.precision = sum / static_cast<double>(size_y);
  } else {
    metrics.recall = sum / static_cast<double>(size_y);
    metrics.precision = sum / static_cast<double>(size_x);
  }
  const double pr = metrics.precision + metrics.recall;
  metrics.f1 = pr > 0.0 ? 2.0 * metrics.precision * metrics.recall / pr : 0.0;
  return metrics;
}

std::string eval_task_name(EvalTask task) {
  switch (task) {
    case EvalTask::Actors: return "actors";
    case EvalTask::HighLevel: return "high_level";
    case EvalTask::LowLevel: return "low_level";
  }
  return "actors";
}

std::string eval_task_label(EvalTask task) {
  switch (task) {
    case EvalTask::Actors: return "Actors";
    case EvalTask::HighLevel: return "High-Level Goals";
    case EvalTask::LowLevel: return "Low-Level Goals";
  }
  return "Actors";
}

namespace {

std::vector<std::string> goal_texts(const std::vector<Goal>& goals) {
  std::vector<std::string> texts;
  texts.reserve(goals.size());
  for (const Goal& g : goals) texts.push_back(g.text);
  return texts;
}

std::vector<std::string> actor_names(const std::vector<Actor>& actors) {
  std::vector<std::string> names;
  names.reserve(actors.size());
  for (const Actor& a : actors) names.push_back(a.name);
  return names;
}

EvalRow evaluate_task(EvalTask task, std::vector<std::string> generated,
                      std::vector<std::string> reference, const Embedder& backend,
                      const TextPreprocessor& prep, MetricConvention convention) {
  EvalRow row;
  row.task = task;
  row.generated = generated;
  row.reference = reference;

  const TextKind kind = task == EvalTask::Actors ? TextKind::ActorName : TextKind::GoalText;

  EmbeddingSet x;
  x.side = Side::Generated;
  x.original = std::move(generated);
  for (const std::string& t : x.original) x.preprocessed.push_back(prep.preprocess(t, kind));
  x.vectors = backend.embed(x.preprocessed);

  EmbeddingSet y;
  y.side = Side::Reference;
  y.original = std::move(reference);
  for (const std::string& t : y.original) y.preprocessed.push_back(prep.preprocess(t, kind));
  y.vectors = backend.embed(y.preprocessed);

  if (x.size() == 0 || y.size() == 0) {
    for (int i = 0; i < x.size(); ++i) row.matching.unmatched_generated.push_back(i);
    for (int j = 0; j < y.size(); ++j) row.matching.unmatched_reference.push_back(j);
  } else {
    row.matching = max_weight_matching(similarity_matrix(x, y));
  }
  row.metrics = compute_metrics(row.matching, x.size(), y.size(), convention, &row.warnings);
  for (const std::string& w : row.warnings) log_warn(eval_task_name(task) + ": " + w);
  return row;
}

}  // namespace

std::vector<EvalRow> evaluate_run(const GoalModel& model, const GroundTruthDataset& truth,
                                  const Embedder& backend, const TextPreprocessor& prep,
                                  MetricConvention convention) {
  std::vector<EvalRow> rows;
  rows.push_back(evaluate_task(EvalTask::Actors, actor_names(model.actors),
                               actor_names(truth.actors), backend, prep, convention));
  rows.push_back(evaluate_task(EvalTask::HighLevel, goal_texts(model.high_level),
                               goal_texts(truth.high_level), backend, prep, convention));
  rows.push_back(evaluate_task(EvalTask::LowLevel, goal_texts(model.low_level),
                               goal_texts(truth.low_level), backend, prep, convention));
  for (EvalRow& row : rows) row.dataset_id = truth.dataset_id;
  return rows;
}

}  // namespace goalex::eval
