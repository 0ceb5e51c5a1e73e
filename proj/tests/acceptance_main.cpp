// Acceptance suite: runs every criterion and prints one PASS/FAIL line each.
// Exit code is nonzero when any criterion fails.

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "goalex/domain.hpp"
#include "goalex/gateway.hpp"
#include "goalex/matching.hpp"
#include "goalex/metrics.hpp"
#include "goalex/pipeline.hpp"
#include "goalex/prompting.hpp"
#include "goalex/reporting.hpp"
#include "goalex/runner.hpp"
#include "goalex/textprep.hpp"
#include "goalex/util.hpp"

namespace fs = std::filesystem;
using namespace goalex;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

std::string data_path(const std::string& rel) { return std::string(GOALEX_DATA_DIR) + "/" + rel; }

prompting::PromptEngine bundled_engine() {
  return prompting::PromptEngine(
      prompting::TemplateStore::from_directory(data_path("templates")),
      prompting::ShotStore::from_file(data_path("shot_examples.json")));
}

GroundTruthDataset load_fixture(const std::string& id) {
  return parse_ground_truth(read_file(data_path("datasets/" + id + ".json")));
}

std::string fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("goalex-acceptance-" + std::to_string(::getpid()) + "-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

double brute_force_best(const Eigen::MatrixXd& sim) {
  const int m = static_cast<int>(sim.rows());
  const int n = static_cast<int>(sim.cols());
  double best = -1e300;
  std::vector<int> cols_used;
  std::function<void(int, double, int)> visit = [&](int row, double total, int picked) {
    if (picked == std::min(m, n)) {
      best = std::max(best, total);
      return;
    }
    if (row == m) return;
    if (m - row - 1 >= std::min(m, n) - picked) visit(row + 1, total, picked);
    for (int j = 0; j < n; ++j) {
      bool used = false;
      for (int c : cols_used) used = used || c == j;
      if (used) continue;
      cols_used.push_back(j);
      visit(row + 1, total + sim(row, j), picked + 1);
      cols_used.pop_back();
    }
  };
  visit(0, 0.0, 0);
  return best;
}

std::string critic_reply(double score, const std::string& comment = "needs work") {
  return Json{{"score", score}, {"comment", comment}}.dump();
}

// ---------------------------------------------------------------------------

void criterion_1_matching_oracle() {
  const auto started = std::chrono::steady_clock::now();
  std::mt19937 rng(123456);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = dim(rng), n = dim(rng);
    Eigen::MatrixXd sim(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) sim(i, j) = weight(rng);
    const eval::MatchingResult result = eval::max_weight_matching(sim);
    const double expected = brute_force_best(sim);
    require(std::abs(result.total_similarity - expected) <= 1e-9,
            "total " + std::to_string(result.total_similarity) + " != brute force " +
                std::to_string(expected));
    require(static_cast<int>(result.arcs.size()) == std::min(m, n), "arc count mismatch");
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  require(seconds < 5.0, "suite took " + std::to_string(seconds) + "s, budget is 5s");
}

void criterion_2_metric_formulas() {
  eval::MatchingResult identity;
  identity.arcs = {{0, 0, 1.0}, {1, 1, 1.0}};
  identity.total_similarity = 2.0;
  const eval::TaskMetrics m1 = eval::compute_metrics(identity, 2, 2);
  require(std::abs(m1.precision - 1.0) <= 1e-9, "identity precision");
  require(std::abs(m1.recall - 1.0) <= 1e-9, "identity recall");
  require(std::abs(m1.f1 - 1.0) <= 1e-9, "identity f1");

  const eval::TaskMetrics m2 = eval::compute_metrics(identity, 2, 3);
  require(std::abs(m2.recall - 1.0) <= 1e-9, "rectangular recall");
  require(std::abs(m2.precision - 0.6667) <= 1e-4, "rectangular precision");
  require(std::abs(m2.f1 - 0.8000) <= 1e-4, "rectangular f1");
}

void criterion_3_loop_contract() {
  const prompting::PromptEngine engine = bundled_engine();
  const std::string actors = R"([{"name":"Citizens","descr":"residents"}])";
  const prompting::Context ctx{{"description", "d"}};

  auto run_with_scores = [&](const std::vector<double>& scores) {
    std::vector<std::string> generator(scores.size(), actors);
    std::vector<std::string> critic;
    for (size_t i = 0; i < scores.size(); ++i)
      critic.push_back(critic_reply(scores[i], "critique number " + std::to_string(i + 1)));
    auto gen = std::make_shared<gateway::ScriptedProvider>(generator);
    auto cr = std::make_shared<gateway::ScriptedProvider>(critic);
    auto gw = std::make_shared<gateway::Gateway>(gen, cr);
    pipeline::Orchestrator orchestrator(engine, *gw, pipeline::LoopConfig{});
    const pipeline::StageResult result =
        orchestrator.run_feedback_loop(pipeline::Stage::Actors, ctx);
    return std::make_pair(result, gw);
  };

  const auto [r1, gw1] = run_with_scores({9.0});
  require(r1.iterations_used == 1 && r1.converged, "[9.0] must use 1 iteration");

  const auto [r2, gw2] = run_with_scores({7.0, 8.6});
  require(r2.iterations_used == 2 && r2.converged, "[7.0, 8.6] must use 2 iterations");
  require(gw2->transcript().entries.size() == 4, "[7.0, 8.6] means 4 exchanges");
  const std::string second_prompt = gw2->transcript().entries[2].request.messages[1].content;
  require(second_prompt.find("critique number 1") != std::string::npos,
          "iteration-2 prompt must quote critique 1 verbatim");

  const auto [r3, gw3] = run_with_scores({5.0, 6.0, 7.0});
  require(r3.iterations_used == 3 && !r3.converged, "[5,6,7] must stop at the cap");

  const auto [r4, gw4] = run_with_scores({8.5});
  require(r4.iterations_used == 1 && r4.converged, "a score of exactly 8.5 must converge");
}

void criterion_4_ablation_contract() {
  const prompting::PromptEngine engine = bundled_engine();
  const GroundTruthDataset ds = load_fixture("gestao-hospital");
  const gateway::MockScript script = gateway::script_from_fixture(ds);
  auto gen = std::make_shared<gateway::ScriptedProvider>(script.generator);
  auto cr = std::make_shared<gateway::ScriptedProvider>(script.critic);
  gateway::Gateway gw(gen, cr);
  pipeline::LoopConfig config;
  config.critic_enabled = false;
  pipeline::Orchestrator orchestrator(engine, gw, config);

  ProjectDescription project;
  project.project_id = ds.dataset_id;
  project.description = "A hospital management platform.";
  const pipeline::PipelineRun run = orchestrator.run_pipeline(project);

  require(gw.call_count(gateway::Role::Critic) == 0, "critic-role calls must be 0");
  for (const auto& entry : gw.transcript().entries)
    require(entry.request.endpoint_role == gateway::Role::Generator,
            "transcript must contain generator entries only");
  for (const pipeline::StageResult& stage : run.stages)
    require(stage.iterations_used == 1, "every stage must use exactly 1 iteration");
}

void criterion_5_determinism() {
  const cli::GlobalOptions record_opts{std::string(GOALEX_CONFIG_DIR) + "/offline-mock.json",
                                       fresh_dir("record"), "", true};
  std::vector<std::string> recorded;
  require(cli::cmd_run(record_opts, "gestao-hospital", {}, {}, false, &recorded) == 0,
          "recording run failed");

  cli::GlobalOptions replay_opts = record_opts;
  replay_opts.out_dir = fresh_dir("replay");
  replay_opts.replay_path = (fs::path(recorded[0]) / "transcript.jsonl").string();
  std::vector<std::string> replayed;
  require(cli::cmd_run(replay_opts, "gestao-hospital", {}, {}, false, &replayed) == 0,
          "replay run failed");

  for (const char* artifact : {"goal_model.json", "api_mappings.json"}) {
    require(read_file((fs::path(recorded[0]) / artifact).string()) ==
                read_file((fs::path(replayed[0]) / artifact).string()),
            std::string(artifact) + " differs across replay");
  }

  cli::GlobalOptions eval_a = record_opts;
  eval_a.out_dir = fresh_dir("eval-a");
  cli::GlobalOptions eval_b = record_opts;
  eval_b.out_dir = fresh_dir("eval-b");
  std::string report_a, report_b;
  require(cli::cmd_evaluate(eval_a, recorded, "gestao-hospital", &report_a) == 0,
          "evaluate A failed");
  require(cli::cmd_evaluate(eval_b, replayed, "gestao-hospital", &report_b) == 0,
          "evaluate B failed");
  require(read_file(report_a) == read_file(report_b), "EvalReport differs across replay");

  const gateway::Transcript transcript =
      gateway::Transcript::from_jsonl(read_file(replay_opts.replay_path));
  require(!transcript.entries.empty(), "recorded transcript is empty");
  for (const auto& entry : transcript.entries)
    require(entry.request.temperature == 0.0, "recorded request with temperature != 0");
}

void criterion_6_end_to_end_synthetic() {
  const prompting::PromptEngine engine = bundled_engine();
  const GroundTruthDataset ds = load_fixture("gestao-hospital");
  const gateway::MockScript script = gateway::script_from_fixture(ds);
  auto gen = std::make_shared<gateway::ScriptedProvider>(script.generator);
  auto cr = std::make_shared<gateway::ScriptedProvider>(script.critic);
  gateway::Gateway gw(gen, cr);
  pipeline::Orchestrator orchestrator(engine, gw, pipeline::LoopConfig{});

  ProjectDescription project;
  project.project_id = ds.dataset_id;
  project.description = "A hospital management platform.";
  const pipeline::PipelineRun run = orchestrator.run_pipeline(project);

  const eval::HashingEmbedder embedder;
  const eval::TextPreprocessor prep =
      eval::TextPreprocessor::from_stopword_file(data_path("stopwords_en.txt"));
  const std::vector<eval::EvalRow> rows = eval::evaluate_run(run.model, ds, embedder, prep);
  require(rows.size() == 3, "expected three task rows");
  for (const eval::EvalRow& row : rows)
    require(std::abs(row.metrics.f1 - 1.0) <= 1e-9,
            eval::eval_task_name(row.task) + " F1 " + std::to_string(row.metrics.f1) +
                " != 1.00");
}

void criterion_7_fixture_integrity() {
  const struct {
    const char* id;
    size_t actors, high, low;
  } expected[] = {
      {"gestao-hospital", 5, 4, 20},
      {"genome-nexus", 5, 9, 34},
      {"urban-maintenance", 6, 9, 18},
      {"london-ambulance", 4, 2, 10},
  };
  size_t actors = 0, high = 0, low = 0;
  for (const auto& e : expected) {
    const GroundTruthDataset ds = load_fixture(e.id);
    require(ds.actors.size() == e.actors, std::string(e.id) + ": actor count");
    require(ds.high_level.size() == e.high, std::string(e.id) + ": high-level count");
    require(ds.low_level.size() == e.low, std::string(e.id) + ": low-level count");
    actors += ds.actors.size();
    high += ds.high_level.size();
    low += ds.low_level.size();
  }
  require(actors == 20 && high == 24 && low == 82, "fixture totals must be 20/24/82");
}

void criterion_8_prompt_strategy_contract() {
  const prompting::PromptEngine engine = bundled_engine();
  const prompting::Context ctx{{"description", "d"},
                               {"project_description", "d"},
                               {"actors", "[]"},
                               {"highLevelGoals", "[]"}};
  const std::pair<prompting::ShotStrategy, int> expectations[] = {
      {prompting::ShotStrategy::ZeroShot, 0},
      {prompting::ShotStrategy::OneShot, 1},
      {prompting::ShotStrategy::FewShot, 3},
  };
  for (prompting::Task task :
       {prompting::Task::Actors, prompting::Task::HighLevel, prompting::Task::LowLevel}) {
    for (const auto& [strategy, count] : expectations) {
      const prompting::PromptPayload payload = engine.build_prompt(task, strategy, ctx);
      require(payload.embedded_examples == count,
              prompting::task_name(task) + "/" + prompting::strategy_name(strategy) +
                  ": embedded_examples != " + std::to_string(count));
    }
    const prompting::PromptPayload critic =
        engine.build_critic_prompt(task, ctx, "[\"candidate\"]");
    require(critic.embedded_examples == 3,
            prompting::task_name(task) + ": critic prompts must embed 3 examples");
  }
}

void criterion_9_report_fidelity() {
  report::EvalReport synthetic;
  const struct {
    eval::EvalTask task;
    const char* strategy;
    double p, r, f1;
  } cells[] = {
      {eval::EvalTask::Actors, "zero-shot", 0.75, 0.78, 0.76},
      {eval::EvalTask::Actors, "one-shot", 0.68, 0.80, 0.74},
      {eval::EvalTask::Actors, "few-shot", 0.78, 0.67, 0.72},
      {eval::EvalTask::HighLevel, "zero-shot", 0.63, 0.61, 0.62},
      {eval::EvalTask::HighLevel, "one-shot", 0.57, 0.60, 0.59},
      {eval::EvalTask::HighLevel, "few-shot", 0.63, 0.59, 0.61},
      {eval::EvalTask::LowLevel, "zero-shot", 0.78, 0.51, 0.61},
      {eval::EvalTask::LowLevel, "one-shot", 0.72, 0.49, 0.59},
      {eval::EvalTask::LowLevel, "few-shot", 0.77, 0.45, 0.57},
  };
  for (const auto& cell : cells) {
    eval::EvalRow row;
    row.dataset_id = "demo";
    row.task = cell.task;
    row.strategy = cell.strategy;
    row.metrics = {cell.r, cell.p, cell.f1};
    synthetic.rows.push_back(row);
  }
  const std::string expected =
      read_file(std::string(GOALEX_TEST_DATA_DIR) + "/results_table.golden");
  const std::string rendered = report::render_results_table(synthetic);
  require(rendered == expected, "rendered table differs from the golden file");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
      {"criterion-1 matching oracle vs brute force (<5s)", criterion_1_matching_oracle},
      {"criterion-2 metric formulas (identity + rectangular)", criterion_2_metric_formulas},
      {"criterion-3 feedback-loop contract", criterion_3_loop_contract},
      {"criterion-4 critic-off ablation contract", criterion_4_ablation_contract},
      {"criterion-5 record/replay determinism, temperature 0", criterion_5_determinism},
      {"criterion-6 end-to-end synthetic F1 = 1.00", criterion_6_end_to_end_synthetic},
      {"criterion-7 fixture integrity (5/4/20, 5/9/34, 6/9/18, 4/2/10)",
       criterion_7_fixture_integrity},
      {"criterion-8 prompt-strategy contract (0/1/3, critic 3)",
       criterion_8_prompt_strategy_contract},
      {"criterion-9 report table golden file", criterion_9_report_fidelity},
  };

  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
      std::printf("PASS %s\n", name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL %s: %s\n", name.c_str(), e.what());
    }
  }
  std::printf("SKIP criterion-10 live smoke test (manual; see README, needs real endpoints)\n");
  return failures == 0 ? 0 : 1;
}
