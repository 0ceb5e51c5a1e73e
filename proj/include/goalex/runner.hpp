#pragma once

#include <optional>
#include <string>
#include <vector>

#include "goalex/config.hpp"
#include "goalex/domain.hpp"
#include "goalex/prompting.hpp"

namespace goalex::cli {

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = "runs";
  std::string replay_path;  // non-empty switches providers to transcript replay
  bool record = true;
};

// Exit codes: 0 success, 1 stage failure, 2 configuration error.

int cmd_run(const GlobalOptions& opts, const std::string& dataset_id,
            std::optional<prompting::ShotStrategy> strategy_override,
            std::optional<bool> critic_override, bool matrix,
            std::vector<std::string>* run_dirs_out = nullptr);

int cmd_evaluate(const GlobalOptions& opts, const std::vector<std::string>& run_dirs,
                 const std::string& truth, std::string* report_path_out = nullptr);

int cmd_shot_sim(const GlobalOptions& opts);

int cmd_ablate(const GlobalOptions& opts, const std::string& baseline_report_path,
               const std::string& ablation_report_path);

int cmd_report(const GlobalOptions& opts, const std::vector<std::string>& report_paths);

// goal_model.json artifact shape.
GoalModel goal_model_from_artifact(const Json& doc);

}  // namespace goalex::cli
