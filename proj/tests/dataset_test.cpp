#include "icl/dataset.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "icl/errors.hpp"
#include "icl/fsio.hpp"

namespace icl {
namespace {

SplitSpec small_spec(TaskId task, double delta, int size, std::uint64_t seed) {
  SplitSpec spec;
  spec.task = task;
  spec.role = SplitRole::test;
  spec.delta = delta;
  spec.size = size;
  spec.eval_budget = size;
  spec.seed = seed;
  return spec;
}

TEST(Datasets, NoNoiseMeansOracleLabels) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 120, 7);
  spec.noise_rate = 0.0;
  Dataset ds = build_split(spec);
  const Task& task = get_task(TaskId::parity);
  for (const TaskInstance& inst : ds.instances) {
    EXPECT_EQ(task.oracle(inst.input), inst.gold);
    EXPECT_FALSE(inst.noisy);
  }
}

TEST(Datasets, NoiseHonestyAndBand) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 2000, 11);
  Dataset ds = build_split(spec);
  const Task& task = get_task(TaskId::parity);
  int noisy = 0;
  for (const TaskInstance& inst : ds.instances) {
    EXPECT_EQ(inst.noisy, inst.gold != task.oracle(inst.input)) << inst.id;
    noisy += inst.noisy ? 1 : 0;
  }
  // Binomial 3 sigma around 100 of 2000.
  EXPECT_GE(noisy, 70);
  EXPECT_LE(noisy, 130);
}

TEST(Datasets, BalanceWithinTwoPoints) {
  SplitSpec spec = small_spec(TaskId::pattern_matching, 0.45, 400, 23);
  Dataset ds = build_split(spec);
  int positives = 0;
  for (const TaskInstance& inst : ds.instances) positives += inst.gold == 1 ? 1 : 0;
  double fraction = static_cast<double>(positives) / 400.0;
  EXPECT_NEAR(fraction, 0.5, 0.02);
}

TEST(Datasets, InputsAreUniqueAndIdsStable) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 300, 5);
  Dataset a = build_split(spec);
  Dataset b = build_split(spec);
  std::set<std::string> inputs;
  for (const TaskInstance& inst : a.instances) EXPECT_TRUE(inputs.insert(inst.input).second);
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    EXPECT_EQ(a.instances[i].input, b.instances[i].input);
    EXPECT_EQ(a.instances[i].id, b.instances[i].id);
    EXPECT_EQ(a.instances[i].gold, b.instances[i].gold);
    EXPECT_EQ(a.instances[i].noisy, b.instances[i].noisy);
  }
}

TEST(Datasets, SuiteHasSixDisjointSplits) {
  SuiteOptions options;
  options.size = 80;
  options.eval_budget = 40;
  Suite suite = build_suite(TaskId::stack, 99, options);
  EXPECT_EQ(suite.tests.size(), 5u);
  std::set<std::string> inputs;
  std::size_t total = 0;
  auto absorb = [&](const Dataset& ds) {
    total += ds.instances.size();
    for (const TaskInstance& inst : ds.instances) inputs.insert(inst.input);
  };
  absorb(suite.train);
  for (const Dataset& ds : suite.tests) absorb(ds);
  EXPECT_EQ(inputs.size(), total);
  EXPECT_EQ(total, 6u * 80u);
  // Exact sup distances between the train generator and each test generator.
  const Automaton& base = get_task(TaskId::stack).base_automaton();
  for (const Dataset& ds : suite.tests) {
    EXPECT_NEAR(sup_distance(base, shift(base, ds.spec.delta)), ds.spec.delta, 1e-12);
  }
}

TEST(Datasets, SingleClassMode) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 60, 3);
  spec.label_mode = LabelMode::single_class_zero;
  spec.noise_rate = 0.0;
  Dataset ds = build_split(spec);
  for (const TaskInstance& inst : ds.instances) EXPECT_EQ(inst.gold, 0);
}

TEST(Datasets, UniformRandomLabelsAreIndependent) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 600, 17);
  spec.label_mode = LabelMode::uniform_random;
  Dataset ds = build_split(spec);
  const Task& task = get_task(TaskId::parity);
  int agree = 0, ones = 0;
  for (const TaskInstance& inst : ds.instances) {
    agree += inst.gold == task.oracle(inst.input) ? 1 : 0;
    ones += inst.gold == 1 ? 1 : 0;
    EXPECT_EQ(inst.noisy, inst.gold != task.oracle(inst.input));
  }
  // Labels near a coin flip and uncorrelated with the oracle.
  EXPECT_NEAR(ones / 600.0, 0.5, 0.07);
  EXPECT_NEAR(agree / 600.0, 0.5, 0.07);
}

TEST(Datasets, JsonlRoundTripIsBitIdentical) {
  SplitSpec spec = small_spec(TaskId::maze_complete, 0.2, 30, 41);
  Dataset ds = build_split(spec);
  std::string text = dataset_to_jsonl(ds);
  Dataset reloaded;
  reloaded.spec = ds.spec;
  reloaded.instances = instances_from_jsonl(text);
  EXPECT_EQ(dataset_to_jsonl(reloaded), text);
}

TEST(Datasets, SaveLoadSuiteRoundTrip) {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "icl_suite_roundtrip_test";
  std::filesystem::remove_all(dir);
  SuiteOptions options;
  options.size = 40;
  options.eval_budget = 20;
  options.deltas = {0.0, 0.45};
  Suite suite = build_suite(TaskId::vm_verify, 4242, options);
  save_suite(suite, dir);
  Suite loaded = load_suite(dir);
  EXPECT_EQ(dataset_to_jsonl(loaded.train), dataset_to_jsonl(suite.train));
  ASSERT_EQ(loaded.tests.size(), suite.tests.size());
  for (std::size_t i = 0; i < suite.tests.size(); ++i) {
    EXPECT_EQ(dataset_to_jsonl(loaded.tests[i]), dataset_to_jsonl(suite.tests[i]));
    EXPECT_EQ(loaded.tests[i].automaton_fingerprint, suite.tests[i].automaton_fingerprint);
  }
  std::filesystem::remove_all(dir);
}

TEST(Exemplars, ZeroShotIsEmpty) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 50, 1);
  Dataset ds = build_split(spec);
  EXPECT_TRUE(select_exemplars(ds, 0, ExemplarMode::fixed, LabelMode::natural, 1, 0).empty());
}

TEST(Exemplars, FixedModeIsIdenticalAcrossQueries) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 50, 2);
  Dataset ds = build_split(spec);
  auto a = select_exemplars(ds, 10, ExemplarMode::fixed, LabelMode::natural, 9, 0);
  auto b = select_exemplars(ds, 10, ExemplarMode::fixed, LabelMode::natural, 9, 123);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].id, b[i].id);
  // Shot levels are prefix-nested.
  auto five = select_exemplars(ds, 5, ExemplarMode::fixed, LabelMode::natural, 9, 0);
  for (std::size_t i = 0; i < five.size(); ++i) EXPECT_EQ(five[i].id, a[i].id);
}

TEST(Exemplars, ShuffledKeepsTheMultisetAndMovesOrder) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 80, 6);
  Dataset ds = build_split(spec);
  auto base = select_exemplars(ds, 10, ExemplarMode::shuffled, LabelMode::natural, 9, 0);
  std::multiset<std::string> base_ids;
  for (const auto& e : base) base_ids.insert(e.id);
  int moved = 0;
  for (std::uint64_t q = 1; q <= 100; ++q) {
    auto drawn = select_exemplars(ds, 10, ExemplarMode::shuffled, LabelMode::natural, 9, q);
    std::multiset<std::string> ids;
    for (const auto& e : drawn) ids.insert(e.id);
    EXPECT_EQ(ids, base_ids);
    bool same_order = true;
    for (std::size_t i = 0; i < drawn.size(); ++i) {
      if (drawn[i].id != base[i].id) same_order = false;
    }
    if (!same_order) ++moved;
  }
  EXPECT_GE(moved, 95);  // order differs with probability 1 - 1/10!
}

TEST(Exemplars, IidDrawsFreshSets) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 80, 6);
  Dataset ds = build_split(spec);
  auto a = select_exemplars(ds, 10, ExemplarMode::iid, LabelMode::natural, 9, 0);
  auto b = select_exemplars(ds, 10, ExemplarMode::iid, LabelMode::natural, 9, 1);
  std::multiset<std::string> ids_a, ids_b;
  for (const auto& e : a) ids_a.insert(e.id);
  for (const auto& e : b) ids_b.insert(e.id);
  EXPECT_NE(ids_a, ids_b);
}

TEST(Exemplars, SingleClassFilterAndStarvation) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 40, 6);
  spec.noise_rate = 0.0;
  Dataset ds = build_split(spec);
  auto zeros = select_exemplars(ds, 10, ExemplarMode::fixed, LabelMode::single_class_zero, 9, 0);
  for (const auto& e : zeros) EXPECT_EQ(e.gold, 0);
  EXPECT_THROW(select_exemplars(ds, 30, ExemplarMode::fixed, LabelMode::single_class_zero, 9, 0),
               ConfigError);
}

TEST(Datasets, InvalidSpecsThrow) {
  SplitSpec spec = small_spec(TaskId::parity, 0.0, 10, 1);
  spec.noise_rate = 0.5;
  EXPECT_THROW(build_split(spec), ConfigError);
  spec = small_spec(TaskId::vm_sum, 0.0, 10, 1);
  spec.label_mode = LabelMode::uniform_random;
  EXPECT_THROW(build_split(spec), ConfigError);
  spec = small_spec(TaskId::parity, 0.0, 10, 1);
  spec.eval_budget = 20;
  EXPECT_THROW(build_split(spec), ConfigError);
}

}  // namespace
}  // namespace icl
