#include "icl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icl/errors.hpp"
#include "icl/fsio.hpp"
#include "json.hpp"

namespace icl {

namespace {

using nlohmann::json;

constexpr std::uint64_t kNoiseStream = 0xA015E;
constexpr std::uint64_t kLabelStream = 0x1ABE1;

std::string role_name(SplitRole role) { return role == SplitRole::train ? "train" : "test"; }

std::string delta_text(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  return buf;
}

long long flipped_label(const Task& task, long long gold, Rng& rng) {
  if (task.binary()) return 1 - gold;
  static const int kOffsets[] = {-25, -20, -15, -10, -5, 5, 10, 15, 20, 25};
  return gold + kOffsets[rng.index(10)];
}

}  // namespace

std::string_view label_mode_name(LabelMode mode) {
  switch (mode) {
    case LabelMode::natural: return "natural";
    case LabelMode::single_class_zero: return "single_class_zero";
    case LabelMode::single_class_one: return "single_class_one";
    case LabelMode::uniform_random: return "uniform_random";
  }
  return "natural";
}

LabelMode label_mode_from_name(std::string_view name) {
  for (LabelMode m : {LabelMode::natural, LabelMode::single_class_zero,
                      LabelMode::single_class_one, LabelMode::uniform_random}) {
    if (label_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown label mode '" + std::string(name) + "'");
}

std::string_view exemplar_mode_name(ExemplarMode mode) {
  switch (mode) {
    case ExemplarMode::fixed: return "fixed";
    case ExemplarMode::shuffled: return "shuffled";
    case ExemplarMode::iid: return "iid";
  }
  return "fixed";
}

ExemplarMode exemplar_mode_from_name(std::string_view name) {
  for (ExemplarMode m : {ExemplarMode::fixed, ExemplarMode::shuffled, ExemplarMode::iid}) {
    if (exemplar_mode_name(m) == name) return m;
  }
  throw ConfigError("unknown exemplar mode '" + std::string(name) + "'");
}

void SplitSpec::validate() const {
  if (noise_rate < 0.0 || noise_rate >= 0.5) throw ConfigError("noise_rate must lie in [0, 0.5)");
  if (size <= 0) throw ConfigError("split size must be positive");
  if (eval_budget <= 0 || eval_budget > size) throw ConfigError("eval_budget must lie in (0, size]");
  if (label_mode == LabelMode::natural && (balance <= 0.0 || balance >= 1.0)) {
    throw ConfigError("balance must lie in (0, 1) for natural label mode");
  }
  if (delta < 0.0 || delta >= 1.0) throw ConfigError("delta must lie in [0, 1)");
  const Task& t = get_task(task);
  if (!t.binary() && label_mode != LabelMode::natural) {
    throw ConfigError("label modes other than natural need a binary task");
  }
}

Dataset build_split(const SplitSpec& spec, std::set<std::string>& seen) {
  spec.validate();
  const Task& task = get_task(spec.task);
  Automaton shifted = shift(task.base_automaton(), spec.delta);

  Dataset out;
  out.spec = spec;
  out.automaton_fingerprint = fingerprint(shifted);
  out.instances.reserve(spec.size);

  Rng root(spec.seed);
  Rng label_rng = root.split(kLabelStream);

  int positives_left = 0, negatives_left = 0;
  if (task.binary() && spec.label_mode == LabelMode::natural) {
    positives_left = static_cast<int>(std::lround(spec.size * spec.balance));
    negatives_left = spec.size - positives_left;
  }

  for (int slot = 0; slot < spec.size; ++slot) {
    int target = -1;
    switch (spec.label_mode) {
      case LabelMode::natural:
        if (task.binary()) {
          if (positives_left == 0) target = 0;
          else if (negatives_left == 0) target = 1;
          else target = slot % 2;
        }
        break;
      case LabelMode::single_class_zero: target = 0; break;
      case LabelMode::single_class_one: target = 1; break;
      case LabelMode::uniform_random: target = -1; break;
    }

    TaskInstance inst;
    bool placed = false;
    for (int attempt = 0; attempt < kGenerationBudget; ++attempt) {
      std::uint64_t inst_seed = root.split(static_cast<std::uint64_t>(slot)).split(attempt).next();
      inst = generate_instance(task, shifted, target, inst_seed);
      if (seen.insert(inst.input).second) {
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw GenerationStarvationError(
          "split " + std::string(task.name()) + "/" + role_name(spec.role) + " delta " +
          delta_text(spec.delta) + ": dedup starvation for label class " + std::to_string(target));
    }
    if (spec.label_mode == LabelMode::uniform_random) {
      inst.gold = label_rng.bernoulli(0.5) ? 1 : 0;
      inst.noisy = inst.gold != task.oracle(inst.input);
    }
    inst.id = std::string(task.name()) + "-" + role_name(spec.role) + "-d" +
              delta_text(spec.delta) + "-" + std::to_string(slot);
    if (target == 1) --positives_left;
    if (target == 0) --negatives_left;
    out.instances.push_back(std::move(inst));
  }

  if (spec.label_mode != LabelMode::uniform_random && spec.noise_rate > 0.0) {
    Rng noise = root.split(kNoiseStream);
    for (TaskInstance& inst : out.instances) {
      if (noise.bernoulli(spec.noise_rate)) {
        inst.gold = flipped_label(task, inst.gold, noise);
        inst.noisy = true;
      }
    }
  }
  return out;
}

Dataset build_split(const SplitSpec& spec) {
  std::set<std::string> seen;
  return build_split(spec, seen);
}

Suite build_suite(TaskId task, std::uint64_t seed, const SuiteOptions& options) {
  Suite suite;
  suite.task = task;
  suite.seed = seed;
  suite.options = options;
  Rng root(seed);
  std::set<std::string> seen;

  SplitSpec train;
  train.task = task;
  train.role = SplitRole::train;
  train.delta = 0.0;
  train.size = options.size;
  train.eval_budget = options.eval_budget;
  train.noise_rate = options.noise_rate;
  train.balance = options.balance;
  train.label_mode = options.label_mode;
  train.seed = root.split(100).next();
  suite.train = build_split(train, seen);

  for (std::size_t k = 0; k < options.deltas.size(); ++k) {
    SplitSpec test = train;
    test.role = SplitRole::test;
    test.delta = options.deltas[k];
    test.seed = root.split(200 + k).next();
    suite.tests.push_back(build_split(test, seen));
  }
  return suite;
}

std::vector<TaskInstance> select_exemplars(const Dataset& train, int n, ExemplarMode mode,
                                           LabelMode label_mode, std::uint64_t seed,
                                           std::uint64_t query_ordinal) {
  if (n == 0) return {};
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < train.instances.size(); ++i) {
    const TaskInstance& inst = train.instances[i];
    bool keep = true;
    if (label_mode == LabelMode::single_class_zero) keep = inst.gold == 0;
    if (label_mode == LabelMode::single_class_one) keep = inst.gold == 1;
    if (keep) pool.push_back(i);
  }
  if (static_cast<std::size_t>(n) > pool.size()) {
    throw ConfigError("not enough exemplars of the requested class: want " + std::to_string(n) +
                      ", have " + std::to_string(pool.size()));
  }

  Rng base(seed);
  Rng per_query = base.split(query_ordinal + 1);
  std::vector<std::size_t> chosen;
  if (mode == ExemplarMode::iid) {
    std::vector<std::size_t> candidates = pool;
    per_query.shuffle(candidates);
    chosen.assign(candidates.begin(), candidates.begin() + n);
  } else {
    // One fixed pool order per (split, seed); shot levels are prefix-nested.
    Rng pool_rng = base.split(0);
    std::vector<std::size_t> order = pool;
    pool_rng.shuffle(order);
    chosen.assign(order.begin(), order.begin() + n);
    if (mode == ExemplarMode::shuffled) per_query.shuffle(chosen);
  }
  std::vector<TaskInstance> out;
  out.reserve(chosen.size());
  for (std::size_t idx : chosen) out.push_back(train.instances[idx]);
  return out;
}

std::string dataset_to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const TaskInstance& inst : dataset.instances) {
    json j{{"id", inst.id},       {"task", std::string(task_name(inst.task))},
           {"delta", inst.delta}, {"input", inst.input},
           {"gold", inst.gold},   {"noisy", inst.noisy},
           {"seed", inst.seed}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

std::vector<TaskInstance> instances_from_jsonl(const std::string& text) {
  std::vector<TaskInstance> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    if (end > start) {
      json j = json::parse(text.substr(start, end - start));
      TaskInstance inst;
      inst.id = j.at("id").get<std::string>();
      inst.task = task_from_name(j.at("task").get<std::string>());
      inst.delta = j.at("delta").get<double>();
      inst.input = j.at("input").get<std::string>();
      inst.gold = j.at("gold").get<long long>();
      inst.noisy = j.at("noisy").get<bool>();
      inst.seed = j.at("seed").get<std::uint64_t>();
      out.push_back(std::move(inst));
    }
    start = end + 1;
  }
  return out;
}

namespace {

json spec_to_json(const SplitSpec& spec) {
  return json{{"task", std::string(task_name(spec.task))},
              {"role", role_name(spec.role)},
              {"delta", spec.delta},
              {"size", spec.size},
              {"eval_budget", spec.eval_budget},
              {"noise_rate", spec.noise_rate},
              {"balance", spec.balance},
              {"label_mode", std::string(label_mode_name(spec.label_mode))},
              {"seed", spec.seed}};
}

SplitSpec spec_from_json(const json& j) {
  SplitSpec spec;
  spec.task = task_from_name(j.at("task").get<std::string>());
  spec.role = j.at("role").get<std::string>() == "train" ? SplitRole::train : SplitRole::test;
  spec.delta = j.at("delta").get<double>();
  spec.size = j.at("size").get<int>();
  spec.eval_budget = j.at("eval_budget").get<int>();
  spec.noise_rate = j.at("noise_rate").get<double>();
  spec.balance = j.at("balance").get<double>();
  spec.label_mode = label_mode_from_name(j.at("label_mode").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

}  // namespace

void save_suite(const Suite& suite, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["task"] = std::string(task_name(suite.task));
  manifest["seed"] = suite.seed;
  json splits = json::array();

  auto save_one = [&](const Dataset& ds, const std::string& stem) {
    write_file_atomic(dir / (stem + ".jsonl"), dataset_to_jsonl(ds));
    Automaton shifted = shift(get_task(ds.spec.task).base_automaton(), ds.spec.delta);
    write_file_atomic(dir / ("automaton_" + stem + ".txt"), serialize(shifted));
    json entry = spec_to_json(ds.spec);
    entry["file"] = stem + ".jsonl";
    entry["automaton_file"] = "automaton_" + stem + ".txt";
    entry["automaton_fingerprint"] = ds.automaton_fingerprint;
    splits.push_back(entry);
  };

  save_one(suite.train, "train");
  for (std::size_t k = 0; k < suite.tests.size(); ++k) {
    save_one(suite.tests[k], "test_" + std::to_string(k));
  }
  manifest["splits"] = splits;
  write_file_atomic(dir / "suite.json", manifest.dump(2) + "\n");
}

Suite load_suite(const std::filesystem::path& dir) {
  json manifest = json::parse(read_file(dir / "suite.json"));
  Suite suite;
  suite.task = task_from_name(manifest.at("task").get<std::string>());
  suite.seed = manifest.at("seed").get<std::uint64_t>();
  for (const json& entry : manifest.at("splits")) {
    Dataset ds;
    ds.spec = spec_from_json(entry);
    ds.automaton_fingerprint = entry.at("automaton_fingerprint").get<std::string>();
    ds.instances = instances_from_jsonl(read_file(dir / entry.at("file").get<std::string>()));
    std::string fp =
        fingerprint(parse_automaton(read_file(dir / entry.at("automaton_file").get<std::string>())));
    if (fp != ds.automaton_fingerprint) {
      throw Error("suite " + dir.string() + ": automaton fingerprint mismatch for " +
                  entry.at("file").get<std::string>());
    }
    if (ds.spec.role == SplitRole::train) {
      suite.train = std::move(ds);
    } else {
      suite.tests.push_back(std::move(ds));
    }
  }
  return suite;
}

}  // namespace icl
