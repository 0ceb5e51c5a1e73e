#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "goalex/runner.hpp"

using goalex::cli::GlobalOptions;

int main(int argc, char** argv) {
  CLI::App app{"goalex - goal-extraction pipeline, evaluation and analysis"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Run configuration JSON")->required();
  app.add_option("--out-dir", opts.out_dir, "Output directory (default: runs)");
  app.add_option("--replay", opts.replay_path, "Replay providers from a recorded transcript");
  app.add_flag("--record,!--no-record", opts.record,
               "Persist the transcript (default: on)");

  // run
  auto* run = app.add_subcommand("run", "Execute the extraction pipeline on a dataset");
  std::string dataset_id;
  std::string strategy_text;
  std::string critic_text;
  bool matrix = false;
  run->add_option("--dataset", dataset_id, "Dataset id (fixture file stem)")->required();
  run->add_option("--strategy", strategy_text, "zero-shot | one-shot | few-shot");
  run->add_option("--critic", critic_text, "on | off");
  run->add_flag("--matrix", matrix, "Fan out strategy x critic cells concurrently");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score run outputs against a ground truth");
  std::vector<std::string> run_dirs;
  std::string truth;
  evaluate->add_option("--run", run_dirs, "Run directory (repeatable)")->required();
  evaluate->add_option("--truth", truth, "Ground truth file or dataset id")->required();

  // shot-sim
  auto* shot_sim =
      app.add_subcommand("shot-sim", "Cosine similarity between datasets and shot examples");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Compare critic-on and critic-off reports");
  std::string baseline_path, ablation_path;
  ablate->add_option("--baseline", baseline_path, "Eval report JSON with the critic on")
      ->required();
  ablate->add_option("--ablation", ablation_path, "Eval report JSON with the critic off")
      ->required();

  // report
  auto* report = app.add_subcommand("report", "Render saved eval reports as a table");
  std::vector<std::string> report_paths;
  report->add_option("--input", report_paths, "Eval report JSON (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  std::optional<goalex::prompting::ShotStrategy> strategy_override;
  std::optional<bool> critic_override;
  try {
    if (!strategy_text.empty())
      strategy_override = goalex::prompting::strategy_from_name(strategy_text);
    if (!critic_text.empty()) {
      if (critic_text != "on" && critic_text != "off") {
        std::cerr << "configuration error: --critic must be 'on' or 'off'\n";
        return 2;
      }
      critic_override = critic_text == "on";
    }
  } catch (const goalex::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  if (run->parsed())
    return goalex::cli::cmd_run(opts, dataset_id, strategy_override, critic_override, matrix);
  if (evaluate->parsed()) return goalex::cli::cmd_evaluate(opts, run_dirs, truth);
  if (shot_sim->parsed()) return goalex::cli::cmd_shot_sim(opts);
  if (ablate->parsed()) return goalex::cli::cmd_ablate(opts, baseline_path, ablation_path);
  if (report->parsed()) return goalex::cli::cmd_report(opts, report_paths);
  return 2;
}
