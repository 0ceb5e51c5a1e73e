#include "goalex/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "goalex/util.hpp"

namespace goalex::report {

using eval::EvalRow;
using eval::EvalTask;

namespace {

std::string fmt2(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

std::string fmt4(double v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return std::string(buf);
}

std::string fmt_delta(double v) {
  const std::string body = fmt2(std::fabs(v));
  if (body == "0.00") return "0.00";
  return (v > 0 ? "+" : "-") + body;
}

std::string pad_right(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string center(const std::string& s, size_t width) {
  if (s.size() >= width) return s;
  const size_t left = (width - s.size()) / 2;
  return std::string(left, ' ') + s + std::string(width - s.size() - left, ' ');
}

std::string strip_trailing_spaces(const std::string& text) {
  std::string out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    size_t end = eol;
    while (end > pos && text[end - 1] == ' ') --end;
    out.append(text, pos, end - pos);
    if (eol < text.size()) out.push_back('\n');
    pos = eol + 1;
  }
  return out;
}

std::string strategy_short(const std::string& strategy) {
  if (strategy == "zero-shot") return "ZS";
  if (strategy == "one-shot") return "OS";
  if (strategy == "few-shot") return "FS";
  return strategy.empty() ? "?" : strategy;
}

EvalTask task_from_string(const std::string& name) {
  if (name == "actors") return EvalTask::Actors;
  if (name == "high_level") return EvalTask::HighLevel;
  if (name == "low_level") return EvalTask::LowLevel;
  throw Error("unknown eval task: " + name);
}

constexpr size_t kLabelWidth = 9;
constexpr size_t kCellWidth = 7;

}  // namespace

Json EvalReport::to_json() const {
  Json doc;
  doc["schema_version"] = 1;
  doc["metric_convention"] = metric_convention;
  Json out_rows = Json::array();
  for (const EvalRow& row : rows) {
    Json r;
    r["dataset"] = row.dataset_id;
    r["task"] = eval::eval_task_name(row.task);
    r["strategy"] = row.strategy;
    r["critic_enabled"] = row.critic_enabled;
    r["precision"] = row.metrics.precision;
    r["recall"] = row.metrics.recall;
    r["f1"] = row.metrics.f1;
    Json arcs = Json::array();
    for (const eval::Arc& a : row.matching.arcs)
      arcs.push_back(
          {{"generated", a.generated}, {"reference", a.reference}, {"similarity", a.similarity}});
    r["matching"] = {{"arcs", std::move(arcs)},
                     {"unmatched_generated", row.matching.unmatched_generated},
                     {"unmatched_reference", row.matching.unmatched_reference},
                     {"total_similarity", row.matching.total_similarity}};
    r["generated"] = row.generated;
    r["reference"] = row.reference;
    r["warnings"] = row.warnings;
    out_rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(out_rows);
  return doc;
}

EvalReport EvalReport::from_json(const Json& doc) {
  EvalReport report;
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array())
    throw SchemaError("eval report: missing rows");
  report.metric_convention = doc.value("metric_convention", "paper");
  for (const Json& r : doc["rows"]) {
    EvalRow row;
    row.dataset_id = r.at("dataset").get<std::string>();
    row.task = task_from_string(r.at("task").get<std::string>());
    row.strategy = r.value("strategy", "");
    row.critic_enabled = r.value("critic_enabled", true);
    row.metrics.precision = r.at("precision").get<double>();
    row.metrics.recall = r.at("recall").get<double>();
    row.metrics.f1 = r.at("f1").get<double>();
    if (r.contains("matching")) {
      const Json& m = r["matching"];
      for (const Json& a : m.value("arcs", Json::array()))
        row.matching.arcs.push_back({a.at("generated").get<int>(), a.at("reference").get<int>(),
                                     a.at("similarity").get<double>()});
      row.matching.unmatched_generated =
          m.value("unmatched_generated", std::vector<int>{});
      row.matching.unmatched_reference =
          m.value("unmatched_reference", std::vector<int>{});
      row.matching.total_similarity = m.value("total_similarity", 0.0);
    }
    row.generated = r.value("generated", std::vector<std::string>{});
    row.reference = r.value("reference", std::vector<std::string>{});
    row.warnings = r.value("warnings", std::vector<std::string>{});
    report.rows.push_back(std::move(row));
  }
  return report;
}

EvalReport EvalReport::load(const std::string& path) {
  try {
    return from_json(Json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("eval report " + path + ": invalid JSON: " + e.what());
  }
}

std::string render_results_table(const EvalReport& report) {
  // strategies present, in canonical order
  std::vector<std::string> strategies;
  for (const char* s : {"zero-shot", "one-shot", "few-shot"})
    for (const EvalRow& row : report.rows)
      if (row.strategy == s && std::find(strategies.begin(), strategies.end(), s) == strategies.end())
        strategies.push_back(s);
  if (strategies.empty()) strategies.push_back("");

  const EvalTask tasks[] = {EvalTask::Actors, EvalTask::HighLevel, EvalTask::LowLevel};
  size_t max_label = 0;
  for (EvalTask task : tasks) max_label = std::max(max_label, eval::eval_task_label(task).size());
  const size_t cell_width =
      std::max(kCellWidth, (max_label + 2 + strategies.size() - 1) / strategies.size());
  const size_t group_width = cell_width * strategies.size();

  // cell means over datasets; metric index 0=precision 1=recall 2=f1
  auto cell_value = [&](EvalTask task, const std::string& strategy,
                        int metric) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const EvalRow& row : report.rows) {
      if (row.task != task || row.strategy != strategy) continue;
      sum += metric == 0 ? row.metrics.precision
                         : metric == 1 ? row.metrics.recall : row.metrics.f1;
      ++count;
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };

  std::string out;
  out += pad_right("", kLabelWidth);
  for (EvalTask task : tasks) out += "|" + center(eval::eval_task_label(task), group_width);
  out += "\n";
  out += pad_right("", kLabelWidth);
  for ([[maybe_unused]] EvalTask task : tasks) {
    out += "|";
    for (const std::string& s : strategies) out += center(strategy_short(s), cell_width);
  }
  out += "\n";
  out += std::string(kLabelWidth, '-');
  for ([[maybe_unused]] EvalTask task : tasks) out += "+" + std::string(group_width, '-');
  out += "\n";

  const char* metric_labels[] = {"Prec.", "Recall", "F1"};
  for (int metric = 0; metric < 3; ++metric) {
    out += pad_right(metric_labels[metric], kLabelWidth);
    for (EvalTask task : tasks) {
      out += "|";
      // best-by-rounded-value within the task group
      std::string best;
      for (const std::string& s : strategies)
        if (auto v = cell_value(task, s, metric))
          if (best.empty() || fmt2(*v) > best) best = fmt2(*v);
      for (const std::string& s : strategies) {
        const auto v = cell_value(task, s, metric);
        if (!v) {
          out += center("-", cell_width);
          continue;
        }
        const std::string text = fmt2(*v);
        out += pad_right(" " + text + (text == best ? "*" : " "), cell_width);
      }
    }
    out += "\n";
  }
  return strip_trailing_spaces(out);
}

std::string render_ablation_table(const EvalReport& critic_on, const EvalReport& critic_off) {
  using Key = std::tuple<std::string, std::string, std::string>;  // dataset, task, strategy
  auto index = [](const EvalReport& r) {
    std::map<Key, const EvalRow*> idx;
    for (const EvalRow& row : r.rows)
      idx[{row.dataset_id, eval::eval_task_name(row.task), row.strategy}] = &row;
    return idx;
  };
  const auto on = index(critic_on);
  const auto off = index(critic_off);

  std::string missing;
  for (const auto& [key, row] : on)
    if (!off.contains(key))
      missing += " (" + std::get<0>(key) + ", " + std::get<1>(key) + ", " + std::get<2>(key) +
                 ") absent in critic-off report;";
  for (const auto& [key, row] : off)
    if (!on.contains(key))
      missing += " (" + std::get<0>(key) + ", " + std::get<1>(key) + ", " + std::get<2>(key) +
                 ") absent in critic-on report;";
  if (!missing.empty()) throw CellMismatch("ablation cell mismatch:" + missing);

  std::string out;
  out += pad_right("Dataset", 20) + pad_right("Task", 12) + pad_right("Strategy", 10) +
         pad_right("Metric", 8) + pad_right("critic on", 11) + pad_right("critic off", 12) +
         "delta\n";
  out += std::string(68 + 5, '-') + "\n";
  for (const auto& [key, row_on] : on) {
    const EvalRow* row_off = off.at(key);
    const char* metric_labels[] = {"Prec.", "Recall", "F1"};
    for (int metric = 0; metric < 3; ++metric) {
      auto pick = [&](const EvalRow* r) {
        return metric == 0 ? r->metrics.precision
                           : metric == 1 ? r->metrics.recall : r->metrics.f1;
      };
      const double a = pick(row_on), b = pick(row_off);
      out += pad_right(std::get<0>(key), 20) + pad_right(std::get<1>(key), 12) +
             pad_right(strategy_short(std::get<2>(key)), 10) + pad_right(metric_labels[metric], 8) +
             pad_right(fmt2(a), 11) + pad_right(fmt2(b), 12) + fmt_delta(a - b) + "\n";
    }
  }
  return out;
}

Json ShotSimilarityReport::to_json() const {
  auto rows_json = [](const std::vector<ShotSimRow>& rows) {
    Json arr = Json::array();
    for (const ShotSimRow& r : rows)
      arr.push_back({{"dataset", r.dataset}, {"task", r.task}, {"average", r.average}});
    return arr;
  };
  Json doc;
  doc["schema_version"] = 1;
  doc["generator"] = {{"rows", rows_json(generator_rows)},
                      {"task_averages", rows_json(generator_task_averages)}};
  doc["critic"] = {{"rows", rows_json(critic_rows)},
                   {"task_averages", rows_json(critic_task_averages)}};
  return doc;
}

ShotSimilarityReport build_shot_similarity_report(
    const std::vector<std::pair<std::string, std::string>>& dataset_descriptions,
    const prompting::ShotStore& shots, const eval::Embedder& backend) {
  using prompting::ShotExample;
  using prompting::Task;

  auto example_text = [](const ShotExample& ex) {
    std::string text = ex.input_payload;
    if (ex.score_and_comment)
      text += "\n***Score:*** " + format_score(ex.score_and_comment->score) +
              "/10\n***Comment:*** " + ex.score_and_comment->comment;
    else
      text += "\n***Output:*** " + ex.expected_output;
    return text;
  };

  ShotSimilarityReport report;
  auto fill = [&](const std::vector<Task>& tasks, std::vector<ShotSimRow>& rows,
                  std::vector<ShotSimRow>& averages) {
    for (Task task : tasks) {
      const std::vector<ShotExample>& examples = shots.for_task(task);
      if (examples.empty()) continue;
      std::vector<std::string> texts;
      for (const ShotExample& ex : examples) texts.push_back(example_text(ex));
      const Eigen::MatrixXd example_vectors = backend.embed(texts);

      double task_sum = 0.0;
      int task_count = 0;
      for (const auto& [dataset_id, description] : dataset_descriptions) {
        const Eigen::MatrixXd desc = backend.embed({description});
        double sum = 0.0;
        for (Eigen::Index i = 0; i < example_vectors.rows(); ++i)
          sum += eval::cosine(desc.row(0).transpose(), example_vectors.row(i).transpose());
        const double avg = sum / static_cast<double>(example_vectors.rows());
        rows.push_back({dataset_id, prompting::task_name(task), avg});
        task_sum += avg;
        ++task_count;
      }
      if (task_count > 0)
        averages.push_back(
            {"Average per Task", prompting::task_name(task), task_sum / task_count});
    }
  };

  fill({Task::Actors, Task::HighLevel, Task::LowLevel}, report.generator_rows,
       report.generator_task_averages);
  fill({Task::Critique}, report.critic_rows, report.critic_task_averages);
  return report;
}

std::string render_shot_similarity(const ShotSimilarityReport& report) {
  auto section = [](const std::string& title, const std::vector<ShotSimRow>& rows,
                    const std::vector<ShotSimRow>& averages) {
    std::string out = title + "\n";
    out += pad_right("Dataset", 22) + pad_right("Task", 14) + "Avg. similarity\n";
    out += std::string(51, '-') + "\n";
    for (const ShotSimRow& r : rows)
      out += pad_right(r.dataset, 22) + pad_right(r.task, 14) + fmt4(r.average) + "\n";
    for (const ShotSimRow& r : averages)
      out += pad_right(r.dataset, 22) + pad_right(r.task, 14) + fmt4(r.average) + "\n";
    return out;
  };
  return section("Generator examples", report.generator_rows, report.generator_task_averages) +
         "\n" + section("Critic examples", report.critic_rows, report.critic_task_averages);
}

}  // namespace goalex::report
