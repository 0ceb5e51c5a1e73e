#include "goalex/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>

#include "goalex/gateway.hpp"
#include "goalex/pipeline.hpp"
#include "goalex/reporting.hpp"
#include "goalex/util.hpp"

namespace goalex::cli {

namespace fs = std::filesystem;

using gateway::Gateway;
using gateway::MockScript;
using gateway::Transcript;
using pipeline::Orchestrator;
using pipeline::Stage;
using pipeline::StageResult;
using prompting::ShotStrategy;

namespace {

std::mutex print_mutex;

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return "";
  const char* value = std::getenv(name.c_str());
  return value ? value : "";
}

struct LoadedInputs {
  RunnerConfig config;
  GroundTruthDataset dataset;
  ProjectDescription project;
  std::vector<ApiEndpoint> endpoints;
  std::string dataset_id;
};

LoadedInputs load_inputs(const GlobalOptions& opts, const std::string& dataset_id) {
  LoadedInputs inputs;
  inputs.config = RunnerConfig::load(opts.config_path);
  inputs.dataset_id = dataset_id;

  const fs::path dataset_path = fs::path(inputs.config.paths.datasets) / (dataset_id + ".json");
  if (!fs::exists(dataset_path))
    throw ConfigError("dataset fixture not found: " + dataset_path.string());
  inputs.dataset = parse_ground_truth(read_file(dataset_path.string()));

  const fs::path project_path = fs::path(inputs.config.paths.projects) / (dataset_id + ".json");
  if (!fs::exists(project_path))
    throw ConfigError("project description not found: " + project_path.string());
  inputs.project = parse_project_description(read_file(project_path.string()));

  if (!inputs.config.paths.apis.empty()) {
    const fs::path api_path = fs::path(inputs.config.paths.apis) / (dataset_id + ".json");
    if (fs::exists(api_path)) inputs.endpoints = parse_api_catalogue(read_file(api_path.string()));
  }
  return inputs;
}

std::shared_ptr<gateway::ChatProvider> make_live_provider(const ProviderConfig& pc) {
  gateway::HttpProviderConfig hc;
  hc.base_url = pc.base_url;
  hc.model = pc.model;
  hc.api_key = env_or_empty(pc.api_key_env);
  hc.chat_path = pc.chat_path;
  hc.max_retries = pc.max_retries;
  hc.backoff_ms = pc.backoff_ms;
  hc.timeout_s = pc.timeout_s;
  return std::make_shared<gateway::HttpChatProvider>(hc);
}

MockScript load_mock_script(const LoadedInputs& inputs) {
  if (inputs.config.mock_script_file) {
    Json doc;
    try {
      doc = Json::parse(read_file(*inputs.config.mock_script_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("mock script: invalid JSON: ") + e.what());
    }
    MockScript script;
    for (const Json& g : doc.at("generator")) script.generator.push_back(g.get<std::string>());
    for (const Json& c : doc.at("critic")) script.critic.push_back(c.get<std::string>());
    return script;
  }
  return gateway::script_from_fixture(inputs.dataset, inputs.endpoints,
                                      inputs.project.needs_preprocessing());
}

std::string json_line(const Json& doc) { return doc.dump(2) + "\n"; }

Json stage_summary_json(const StageResult& result) {
  Json s;
  s["stage"] = pipeline::stage_name(result.stage);
  s["iterations_used"] = result.iterations_used;
  if (result.final_score)
    s["final_score"] = *result.final_score;
  else
    s["final_score"] = nullptr;
  s["converged"] = result.converged;
  return s;
}

Json stage_results_json(const std::vector<StageResult>& stages) {
  Json doc;
  doc["schema_version"] = 1;
  Json arr = Json::array();
  for (const StageResult& r : stages) {
    Json s = stage_summary_json(r);
    Json critiques = Json::array();
    for (const Critique& c : r.critiques)
      critiques.push_back({{"score", c.score}, {"comment", c.comment}});
    s["critiques"] = std::move(critiques);
    arr.push_back(std::move(s));
  }
  doc["stages"] = std::move(arr);
  return doc;
}

struct CellSpec {
  ShotStrategy strategy;
  bool critic_enabled;
};

int execute_cell(const LoadedInputs& inputs, const GlobalOptions& opts, const CellSpec& cell,
                 std::string* run_dir_out) {
  RunnerConfig cfg = inputs.config;
  cfg.loop.strategy = cell.strategy;
  cfg.loop.critic_enabled = cell.critic_enabled;

  const std::string base_id = inputs.dataset_id + "-" + prompting::strategy_name(cell.strategy) +
                              "-critic-" + (cell.critic_enabled ? "on" : "off");
  std::string run_id = base_id;
  fs::path run_dir = fs::path(opts.out_dir) / run_id;
  for (int k = 2; fs::exists(run_dir); ++k) {
    run_id = base_id + "-" + std::to_string(k);
    run_dir = fs::path(opts.out_dir) / run_id;
  }
  fs::create_directories(run_dir);
  if (run_dir_out) *run_dir_out = run_dir.string();

  std::shared_ptr<gateway::ChatProvider> generator, critic;
  if (!opts.replay_path.empty()) {
    const Transcript recorded = Transcript::from_jsonl(read_file(opts.replay_path));
    auto replay = std::make_shared<gateway::ReplayProvider>(recorded);
    generator = replay;
    critic = replay;
  } else if (cfg.generator.mode == "mock") {
    const MockScript script = load_mock_script(inputs);
    generator = std::make_shared<gateway::ScriptedProvider>(
        script.generator, cfg.generator.model.empty() ? "mock-generator" : cfg.generator.model);
    critic = std::make_shared<gateway::ScriptedProvider>(
        script.critic, cfg.critic.model.empty() ? "mock-critic" : cfg.critic.model);
  } else {
    generator = make_live_provider(cfg.generator);
    critic = cfg.critic.mode == "mock"
                 ? std::shared_ptr<gateway::ChatProvider>(std::make_shared<gateway::ScriptedProvider>(
                       load_mock_script(inputs).critic, "mock-critic"))
                 : make_live_provider(cfg.critic);
  }

  Gateway gw(generator, critic, run_id);
  prompting::PromptEngine engine(prompting::TemplateStore::from_directory(cfg.paths.templates),
                                 prompting::ShotStore::from_file(cfg.paths.shot_examples));
  Orchestrator orchestrator(engine, gw, cfg.loop);

  std::vector<StageResult> completed;
  orchestrator.on_stage_complete = [&](const StageResult& result) {
    completed.push_back(result);
    // keep partial results on disk so an expensive run survives a failing later phase
    write_file((run_dir / "stage_results.json").string(), json_line(stage_results_json(completed)));
    const fs::path partial = run_dir / "partials";
    fs::create_directories(partial);
    Json out;
    out["schema_version"] = 1;
    out["stage"] = pipeline::stage_name(result.stage);
    out["output"] = Json::parse(pipeline::render_stage_output(result.output), nullptr, false);
    if (out["output"].is_discarded())
      out["output"] = pipeline::render_stage_output(result.output);
    write_file((partial / (pipeline::stage_name(result.stage) + ".json")).string(),
               json_line(out));
  };

  pipeline::PipelineRun run;
  try {
    run = orchestrator.run_pipeline(inputs.project, inputs.endpoints);
  } catch (const pipeline::StageFailed& e) {
    if (opts.record)
      write_file((run_dir / "transcript.jsonl").string(), gw.transcript().to_jsonl());
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cerr << "run " << run_id << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cerr << "run " << run_id << ": " << e.what() << "\n";
    return 1;
  }

  const Transcript& transcript = gw.transcript();
  const std::string started =
      transcript.entries.empty() ? "" : transcript.entries.front().timestamp;
  const std::string finished =
      transcript.entries.empty() ? "" : transcript.entries.back().timestamp;

  if (opts.record)
    write_file((run_dir / "transcript.jsonl").string(), transcript.to_jsonl());

  Json model_doc;
  model_doc["schema_version"] = 1;
  model_doc["project_id"] = run.model.project_id;
  model_doc["actors"] = actors_to_json(run.model.actors);
  model_doc["high_level"] = goals_to_json(run.model.high_level);
  model_doc["low_level"] = goals_to_json(run.model.low_level);
  Json stages = Json::array();
  for (const StageResult& r : run.stages) stages.push_back(stage_summary_json(r));
  model_doc["provenance"] = {
      {"strategy", prompting::strategy_name(cfg.loop.strategy)},
      {"critic_enabled", cfg.loop.critic_enabled},
      {"quality_threshold", cfg.loop.quality_threshold},
      {"max_iterations", cfg.loop.max_iterations},
      {"keep", cfg.loop.keep == pipeline::LoopConfig::Keep::Last ? "last" : "best"},
      {"started_at", started},
      {"finished_at", finished},
      {"stages", std::move(stages)}};
  write_file((run_dir / "goal_model.json").string(), json_line(model_doc));

  Json mappings_doc;
  mappings_doc["schema_version"] = 1;
  mappings_doc["project_id"] = run.model.project_id;
  Json mappings = Json::array();
  for (const ApiMapping& m : run.mappings)
    mappings.push_back({{"high_level_goal", m.high_level_goal},
                        {"low_level_goal", m.low_level_goal},
                        {"api_name", m.api_name}});
  mappings_doc["mappings"] = std::move(mappings);
  write_file((run_dir / "api_mappings.json").string(), json_line(mappings_doc));

  write_file((run_dir / "stage_results.json").string(),
             json_line(stage_results_json(run.stages)));

  Json manifest;
  manifest["schema_version"] = 1;
  manifest["run_id"] = run_id;
  manifest["dataset_id"] = inputs.dataset_id;
  manifest["strategy"] = prompting::strategy_name(cfg.loop.strategy);
  manifest["critic_enabled"] = cfg.loop.critic_enabled;
  manifest["started_at"] = started;
  manifest["finished_at"] = finished;
  manifest["artifacts"] = {{"goal_model", "goal_model.json"},
                           {"api_mappings", "api_mappings.json"},
                           {"transcript", "transcript.jsonl"},
                           {"stage_results", "stage_results.json"}};
  write_file((run_dir / "manifest.json").string(), json_line(manifest));

  std::string summary = "run " + run_id + ": ok\n";
  for (const StageResult& r : run.stages) {
    summary += "  " + pipeline::stage_name(r.stage) + ": iterations=" +
               std::to_string(r.iterations_used);
    if (r.final_score) summary += " score=" + format_score(*r.final_score);
    summary += r.converged ? " converged\n" : " not converged\n";
  }
  {
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cout << summary;
  }
  return 0;
}

}  // namespace

GoalModel goal_model_from_artifact(const Json& doc) {
  GoalModel model;
  model.project_id = doc.at("project_id").get<std::string>();
  model.actors = actors_from_json(doc.at("actors"));
  model.high_level = goals_from_json(doc.at("high_level"), GoalLevel::High);
  model.low_level = goals_from_json(doc.at("low_level"), GoalLevel::Low);
  return model;
}

int cmd_run(const GlobalOptions& opts, const std::string& dataset_id,
            std::optional<ShotStrategy> strategy_override, std::optional<bool> critic_override,
            bool matrix, std::vector<std::string>* run_dirs_out) {
  LoadedInputs inputs;
  try {
    inputs = load_inputs(opts, dataset_id);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  if (matrix) {
    std::vector<CellSpec> cells;
    for (ShotStrategy s :
         {ShotStrategy::ZeroShot, ShotStrategy::OneShot, ShotStrategy::FewShot})
      for (bool critic : {true, false}) cells.push_back({s, critic});
    std::vector<std::future<int>> futures;
    std::vector<std::string> dirs(cells.size());
    for (size_t i = 0; i < cells.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&, i] {
        return execute_cell(inputs, opts, cells[i], &dirs[i]);
      }));
    int exit_code = 0;
    for (auto& f : futures) exit_code = std::max(exit_code, f.get());
    if (run_dirs_out) *run_dirs_out = dirs;
    return exit_code;
  }

  CellSpec cell{strategy_override.value_or(inputs.config.loop.strategy),
                critic_override.value_or(inputs.config.loop.critic_enabled)};
  std::string run_dir;
  const int code = execute_cell(inputs, opts, cell, &run_dir);
  if (run_dirs_out && code == 0) run_dirs_out->push_back(run_dir);
  return code;
}

namespace {

std::unique_ptr<eval::Embedder> make_embedder(const RunnerConfig& cfg) {
  if (cfg.embedder.backend == "http") {
    eval::HttpEmbedderConfig hc;
    hc.base_url = cfg.embedder.base_url;
    hc.model = cfg.embedder.model;
    hc.api_key = env_or_empty(cfg.embedder.api_key_env);
    hc.path = cfg.embedder.path;
    hc.timeout_s = cfg.embedder.timeout_s;
    return std::make_unique<eval::HttpEmbedder>(hc);
  }
  return std::make_unique<eval::HashingEmbedder>(cfg.embedder.dimension);
}

}  // namespace

int cmd_evaluate(const GlobalOptions& opts, const std::vector<std::string>& run_dirs,
                 const std::string& truth, std::string* report_path_out) {
  RunnerConfig cfg;
  GroundTruthDataset dataset;
  std::unique_ptr<eval::Embedder> embedder;
  eval::TextPreprocessor prep;
  try {
    cfg = RunnerConfig::load(opts.config_path);
    std::string truth_path = truth;
    if (!fs::exists(truth_path))
      truth_path = (fs::path(cfg.paths.datasets) / (truth + ".json")).string();
    if (!fs::exists(truth_path)) throw ConfigError("ground truth not found: " + truth);
    dataset = parse_ground_truth(read_file(truth_path));
    embedder = make_embedder(cfg);
    prep = eval::TextPreprocessor::from_stopword_file(cfg.paths.stopwords);
    if (run_dirs.empty()) throw ConfigError("at least one run directory is required");
    for (const std::string& dir : run_dirs) {
      if (!fs::exists(fs::path(dir) / "manifest.json"))
        throw ConfigError("missing run artifact: " + (fs::path(dir) / "manifest.json").string());
      if (!fs::exists(fs::path(dir) / "goal_model.json"))
        throw ConfigError("missing run artifact: " + (fs::path(dir) / "goal_model.json").string());
    }
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    report::EvalReport report;
    report.metric_convention =
        cfg.convention == eval::MetricConvention::Paper ? "paper" : "bertscore";
    for (const std::string& dir : run_dirs) {
      const Json manifest = Json::parse(read_file((fs::path(dir) / "manifest.json").string()));
      const Json model_doc = Json::parse(read_file((fs::path(dir) / "goal_model.json").string()));
      const GoalModel model = goal_model_from_artifact(model_doc);
      std::vector<eval::EvalRow> rows =
          eval::evaluate_run(model, dataset, *embedder, prep, cfg.convention);
      for (eval::EvalRow& row : rows) {
        row.strategy = manifest.value("strategy", "");
        row.critic_enabled = manifest.value("critic_enabled", true);
      }
      report.rows.insert(report.rows.end(), rows.begin(), rows.end());
    }

    fs::create_directories(opts.out_dir);
    const fs::path json_path = fs::path(opts.out_dir) / "eval_report.json";
    const fs::path text_path = fs::path(opts.out_dir) / "eval_report.txt";
    const std::string table = report::render_results_table(report);
    write_file(json_path.string(), report.to_json().dump(2) + "\n");
    write_file(text_path.string(), table);
    if (report_path_out) *report_path_out = json_path.string();
    std::cout << table;
    return 0;
  } catch (const Error& e) {
    std::cerr << "evaluation failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_shot_sim(const GlobalOptions& opts) {
  try {
    const RunnerConfig cfg = RunnerConfig::load(opts.config_path);
    const auto embedder = make_embedder(cfg);
    const prompting::ShotStore shots = prompting::ShotStore::from_file(cfg.paths.shot_examples);

    std::vector<std::pair<std::string, std::string>> descriptions;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.paths.projects))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) {
      const ProjectDescription project = parse_project_description(read_file(file.string()));
      const std::string text =
          project.description ? *project.description : project.raw_readme.value_or("");
      descriptions.emplace_back(project.project_id, text);
    }
    if (descriptions.empty()) throw ConfigError("no project descriptions found");

    const report::ShotSimilarityReport result =
        report::build_shot_similarity_report(descriptions, shots, *embedder);
    const std::string table = report::render_shot_similarity(result);
    fs::create_directories(opts.out_dir);
    write_file((fs::path(opts.out_dir) / "shot_similarity.json").string(),
               result.to_json().dump(2) + "\n");
    write_file((fs::path(opts.out_dir) / "shot_similarity.txt").string(), table);
    std::cout << table;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "shot similarity failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_ablate(const GlobalOptions& opts, const std::string& baseline_report_path,
               const std::string& ablation_report_path) {
  try {
    const report::EvalReport on = report::EvalReport::load(baseline_report_path);
    const report::EvalReport off = report::EvalReport::load(ablation_report_path);
    const std::string table = report::render_ablation_table(on, off);
    fs::create_directories(opts.out_dir);
    write_file((fs::path(opts.out_dir) / "ablation.txt").string(), table);
    std::cout << table;
    return 0;
  } catch (const CellMismatch& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_report(const GlobalOptions& opts, const std::vector<std::string>& report_paths) {
  try {
    report::EvalReport merged;
    for (const std::string& path : report_paths) {
      const report::EvalReport r = report::EvalReport::load(path);
      if (merged.rows.empty()) merged.metric_convention = r.metric_convention;
      merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    }
    if (merged.rows.empty()) throw ConfigError("no report rows to render");
    const std::string table = report::render_results_table(merged);
    fs::create_directories(opts.out_dir);
    write_file((fs::path(opts.out_dir) / "report.txt").string(), table);
    std::cout << table;
    return 0;
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace goalex::cli
