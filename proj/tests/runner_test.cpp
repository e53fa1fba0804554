#include "icl/runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>

#include "icl/errors.hpp"
#include "icl/fsio.hpp"
#include "icl/text.hpp"
#include "json.hpp"

namespace icl {
namespace {

namespace fs = std::filesystem;

std::string config_json(const fs::path& out_dir) {
  nlohmann::json j;
  j["seed"] = 2024;
  j["tasks"] = {"parity", "pattern_matching"};
  j["deltas"] = {0.0, 0.45};
  j["shots"] = {0, 5};
  j["strategies"] = {"modus_ponens", "description"};
  j["models"] = {{{"name", "mock"}, {"mock", true}}};
  j["split_size"] = 60;
  j["eval_budget"] = 8;
  j["noise_rate"] = 0.05;
  j["parallelism"] = 2;
  j["out_dir"] = out_dir.string();
  return j.dump();
}

// Relative path -> bytes for every file under root, manifest excluded (its
// config echo embeds the absolute out_dir).
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = fs::relative(entry.path(), root).string();
    if (rel == "manifest.json") continue;
    out[rel] = read_file(entry.path());
  }
  return out;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Config, ParseDefaultsAndValidation) {
  fs::path dir = fresh_dir("icl_cfg_test");
  RunConfig config = parse_config(config_json(dir));
  EXPECT_EQ(config.tasks.size(), 2u);
  EXPECT_EQ(config.cache_dir, dir / "cache");
  EXPECT_EQ(config.score_mode, ScoreMode::compliance_and_learning);
  // modus ponens drops the 0-shot level, description keeps both.
  EXPECT_EQ(strategy_shot_levels(config, config.strategies[0]), (std::vector<int>{5}));
  EXPECT_EQ(strategy_shot_levels(config, config.strategies[1]), (std::vector<int>{0, 5}));
  // Grid: parity+pattern, mock, (1 + 2 shot levels) x 2 deltas x 8 budget.
  EXPECT_EQ(estimate_calls(config), 2 * (1 + 2) * 2 * 8);

  nlohmann::json bad = nlohmann::json::parse(config_json(dir));
  bad["strategies"] = {"cot"};
  bad["shots"] = {2};
  EXPECT_THROW(parse_config(bad.dump()), ConfigError);
  bad = nlohmann::json::parse(config_json(dir));
  bad["tasks"] = nlohmann::json::array();
  EXPECT_THROW(parse_config(bad.dump()), ConfigError);
}

TEST(Runner, EndToEndGridWithMock) {
  fs::path dir = fresh_dir("icl_runner_e2e");
  RunConfig config = parse_config(config_json(dir));
  cmd_generate(config);
  EXPECT_TRUE(fs::exists(dir / "datasets" / "parity" / "suite.json"));
  cmd_run(config, false);

  // Cell files: parity+pattern x (mp@5 + desc@0 + desc@5) x 2 deltas.
  std::size_t record_files = 0;
  std::size_t records = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "records")) {
    if (entry.is_regular_file()) {
      ++record_files;
      for (const std::string& line : split(read_file(entry.path()), '\n')) {
        if (!line.empty()) {
          run_record_from_json(line);  // every line parses
          ++records;
        }
      }
    }
  }
  EXPECT_EQ(record_files, 2u * 3u * 2u);
  EXPECT_EQ(records, static_cast<std::size_t>(estimate_calls(config)));

  cmd_analyze(config);
  EXPECT_TRUE(fs::exists(dir / "analysis" / "compliance_and_learning" / "cells.csv"));
  EXPECT_TRUE(fs::exists(dir / "analysis" / "learning_only" / "cells.csv"));

  cmd_render(config);
  EXPECT_TRUE(fs::exists(dir / "bundles" / "parity" / "description_s0.json"));

  EXPECT_EQ(cmd_verify(config), 0);

  // Manifest lists every output file.
  nlohmann::json manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : manifest.at("files")) listed.insert(f.get<std::string>());
  for (const auto& [rel, bytes] : tree_bytes(dir)) {
    if (rel.starts_with("cache/")) {
      EXPECT_TRUE(listed.count(rel)) << rel;
    }
    EXPECT_TRUE(listed.count(rel) || rel == "manifest.json") << rel;
  }
  fs::remove_all(dir);
}

TEST(Runner, RerunChangesNothingAndColdRunsAreByteIdentical) {
  fs::path dir_a = fresh_dir("icl_runner_cold_a");
  fs::path dir_b = fresh_dir("icl_runner_cold_b");
  RunConfig a = parse_config(config_json(dir_a));
  RunConfig b = parse_config(config_json(dir_b));
  cmd_generate(a);
  cmd_run(a, false);
  cmd_analyze(a);
  auto before = tree_bytes(dir_a);
  // Idempotence: re-running every stage rewrites identical bytes.
  cmd_generate(a);
  cmd_run(a, false);
  cmd_analyze(a);
  EXPECT_EQ(tree_bytes(dir_a), before);
  // A second cold run elsewhere produces the same bytes.
  cmd_generate(b);
  cmd_run(b, false);
  cmd_analyze(b);
  EXPECT_EQ(tree_bytes(dir_b), before);
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST(Runner, ResumesAfterMidRunKill) {
  fs::path full_dir = fresh_dir("icl_runner_full");
  fs::path killed_dir = fresh_dir("icl_runner_killed");
  RunConfig full = parse_config(config_json(full_dir));
  cmd_generate(full);
  cmd_run(full, false);

  RunConfig killed = parse_config(config_json(killed_dir));
  cmd_generate(killed);
  killed.abort_after_records = 13;
  EXPECT_THROW(cmd_run(killed, false), AbortForTest);
  killed.abort_after_records = -1;
  cmd_run(killed, false);  // resume

  auto full_tree = tree_bytes(full_dir);
  auto killed_tree = tree_bytes(killed_dir);
  // Record sets identical to the uninterrupted run.
  for (const auto& [rel, bytes] : full_tree) {
    if (rel.starts_with("records/")) {
      ASSERT_TRUE(killed_tree.count(rel)) << rel;
      EXPECT_EQ(killed_tree.at(rel), bytes) << rel;
    }
  }
  fs::remove_all(full_dir);
  fs::remove_all(killed_dir);
}

TEST(Runner, ManifestGuardsAgainstConfigDrift) {
  fs::path dir = fresh_dir("icl_runner_guard");
  RunConfig config = parse_config(config_json(dir));
  cmd_generate(config);
  RunConfig drifted = config;
  drifted.eval_budget = 9;
  try {
    cmd_run(drifted, false);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("eval_budget"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Runner, MissingUpstreamArtifactIsNamed) {
  fs::path dir = fresh_dir("icl_runner_missing");
  RunConfig config = parse_config(config_json(dir));
  try {
    cmd_run(config, false);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("suite.json"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Runner, LiveRunsNeedTheExplicitFlag) {
  fs::path dir = fresh_dir("icl_runner_live");
  nlohmann::json j = nlohmann::json::parse(config_json(dir));
  j["models"] = {{{"name", "gpt-x"}, {"mock", false}, {"endpoint", "http://localhost:9"}}};
  RunConfig config = parse_config(j.dump());
  cmd_generate(config);
  EXPECT_THROW(cmd_run(config, false), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace icl
