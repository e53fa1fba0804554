#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "icl/analysis.hpp"
#include "icl/apo.hpp"
#include "icl/dataset.hpp"
#include "icl/errors.hpp"
#include "icl/gateway.hpp"
#include "icl/prompt.hpp"

namespace icl {

struct ModelSpec {
  std::string name = "mock";
  bool mock = true;
  std::string endpoint;  // falls back to ICL_ENDPOINT_URL
};

struct StrategyConfig {
  StrategyKind kind = StrategyKind::description;
  std::optional<std::uint64_t> salad_seed;
  std::vector<int> shots_override;  // empty = config-level shot list
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::vector<TaskId> tasks;
  std::vector<double> deltas = {0.0, 0.2, 0.45, 0.65, 0.85};
  std::vector<int> shots = {0, 2, 5, 10, 20, 50, 100};
  std::vector<StrategyConfig> strategies;
  std::vector<ModelSpec> models;
  int split_size = 2000;
  int eval_budget = 1000;
  double noise_rate = 0.05;
  double balance = 0.5;
  LabelMode label_mode = LabelMode::natural;
  ExemplarMode exemplar_mode = ExemplarMode::fixed;
  ScoreMode score_mode = ScoreMode::compliance_and_learning;
  int parallelism = 4;
  std::filesystem::path out_dir;
  std::filesystem::path cache_dir;
  ApoConfig apo;

  // Test hook: stop cmd_run after this many records were written (-1 = off).
  long long abort_after_records = -1;

  void validate() const;
  std::string normalized_json() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

// Shot levels a strategy actually runs (modus ponens drops 0, CoT/SoT drop 2).
std::vector<int> strategy_shot_levels(const RunConfig& config, const StrategyConfig& strategy);

// Projected model calls for the grid; printed before any networked run.
long long estimate_calls(const RunConfig& config);

void cmd_generate(const RunConfig& config);
void cmd_render(const RunConfig& config);
void cmd_run(const RunConfig& config, bool allow_live = false);
void cmd_baseline(const RunConfig& config);
void cmd_analyze(const RunConfig& config);

// Desk-scale audit over the generated artifacts: suite fidelity, oracle
// re-labelling against simple independent re-implementations, trace answers.
// Returns the number of failed checks and writes verify_report.txt.
int cmd_verify(const RunConfig& config);

// Raised by the abort_after_records hook; carries no failure semantics.
struct AbortForTest : Error {
  using Error::Error;
};

}  // namespace icl
