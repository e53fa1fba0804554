#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "icl/task.hpp"

namespace icl {

enum class SplitRole { train, test };

// How gold labels are assigned at build time. `natural` draws balanced labels
// from the oracle; the single-class presets cover both readings of the
// imbalanced ablation; uniform_random decouples labels from inputs entirely.
enum class LabelMode { natural, single_class_zero, single_class_one, uniform_random };

std::string_view label_mode_name(LabelMode mode);
LabelMode label_mode_from_name(std::string_view name);

struct SplitSpec {
  TaskId task = TaskId::parity;
  SplitRole role = SplitRole::test;
  double delta = 0.0;
  int size = 2000;
  int eval_budget = 1000;
  double noise_rate = 0.05;
  double balance = 0.5;
  LabelMode label_mode = LabelMode::natural;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct Dataset {
  SplitSpec spec;
  std::vector<TaskInstance> instances;
  std::string automaton_fingerprint;
};

// Builds one split; `seen` carries the cross-suite dedup set (inputs already
// used by other splits of the same suite).
Dataset build_split(const SplitSpec& spec, std::set<std::string>& seen);
Dataset build_split(const SplitSpec& spec);

struct SuiteOptions {
  int size = 2000;
  int eval_budget = 1000;
  double noise_rate = 0.05;
  double balance = 0.5;
  LabelMode label_mode = LabelMode::natural;
  std::vector<double> deltas = {0.0, 0.2, 0.45, 0.65, 0.85};
};

// One train split at delta 0 plus one test split per delta, all pairwise
// disjoint on input strings.
struct Suite {
  TaskId task = TaskId::parity;
  std::uint64_t seed = 0;
  SuiteOptions options;
  Dataset train;
  std::vector<Dataset> tests;
};

Suite build_suite(TaskId task, std::uint64_t seed, const SuiteOptions& options = {});

// Exemplar drawing. `mode` fixed: same exemplars, same order for every query;
// shuffled: same exemplars, order re-drawn per query; iid: fresh draw per
// query. label_mode single_class filters the pool before drawing.
enum class ExemplarMode { fixed, shuffled, iid };

std::string_view exemplar_mode_name(ExemplarMode mode);
ExemplarMode exemplar_mode_from_name(std::string_view name);

std::vector<TaskInstance> select_exemplars(const Dataset& train, int n, ExemplarMode mode,
                                           LabelMode label_mode, std::uint64_t seed,
                                           std::uint64_t query_ordinal);

// Line-delimited instance records with fields exactly
// {id, task, delta, input, gold, noisy, seed}.
std::string dataset_to_jsonl(const Dataset& dataset);
std::vector<TaskInstance> instances_from_jsonl(const std::string& text);

// Writes split files, per-split automata and the suite manifest under `dir`.
void save_suite(const Suite& suite, const std::filesystem::path& dir);
Suite load_suite(const std::filesystem::path& dir);

}  // namespace icl
