#include "icl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "icl/baseline.hpp"
#include "icl/errors.hpp"
#include "icl/fsio.hpp"
#include "icl/text.hpp"
#include "json.hpp"

namespace icl {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSuiteStream = 0xD0;
constexpr std::uint64_t kExemplarStream = 0xE0;
constexpr std::uint64_t kSaladStream = 0x5A1AD;
constexpr std::uint64_t kApoStream = 0xA90;

std::string delta_text(double d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", d);
  return buf;
}

json strategy_to_json(const StrategyConfig& s) {
  json j{{"kind", std::string(strategy_name(s.kind))}};
  if (s.salad_seed) j["salad_seed"] = *s.salad_seed;
  if (!s.shots_override.empty()) j["shots"] = s.shots_override;
  return j;
}

StrategyConfig strategy_from_json(const json& j) {
  StrategyConfig s;
  if (j.is_string()) {
    s.kind = strategy_from_name(j.get<std::string>());
    return s;
  }
  s.kind = strategy_from_name(j.at("kind").get<std::string>());
  if (j.contains("salad_seed")) s.salad_seed = j.at("salad_seed").get<std::uint64_t>();
  if (j.contains("shots")) s.shots_override = j.at("shots").get<std::vector<int>>();
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (tasks.empty()) throw ConfigError("config needs at least one task");
  if (models.empty()) throw ConfigError("config needs at least one model");
  if (strategies.empty()) throw ConfigError("config needs at least one strategy");
  if (deltas.empty()) throw ConfigError("config needs at least one delta");
  if (split_size <= 0 || eval_budget <= 0 || eval_budget > split_size) {
    throw ConfigError("invalid split_size/eval_budget");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (out_dir.empty()) throw ConfigError("out_dir is required");
  for (const StrategyConfig& s : strategies) {
    // Every (strategy, shots) cell of the grid must be valid after the
    // per-strategy level filtering.
    for (int n : strategy_shot_levels(*this, s)) {
      StrategySpec spec;
      spec.kind = s.kind;
      spec.shots = n;
      if (s.kind == StrategyKind::word_salad || s.kind == StrategyKind::sot) {
        spec.salad_seed = s.salad_seed.value_or(1);
      }
      if (s.kind == StrategyKind::apo_prompt) spec.apo_text = "pending";
      spec.validate();
    }
  }
}

std::string RunConfig::normalized_json() const {
  json j;
  j["seed"] = seed;
  json task_list = json::array();
  for (TaskId t : tasks) task_list.push_back(std::string(task_name(t)));
  j["tasks"] = task_list;
  j["deltas"] = deltas;
  j["shots"] = shots;
  json strategy_list = json::array();
  for (const StrategyConfig& s : strategies) strategy_list.push_back(strategy_to_json(s));
  j["strategies"] = strategy_list;
  json model_list = json::array();
  for (const ModelSpec& m : models) {
    model_list.push_back({{"name", m.name}, {"mock", m.mock}, {"endpoint", m.endpoint}});
  }
  j["models"] = model_list;
  j["split_size"] = split_size;
  j["eval_budget"] = eval_budget;
  j["noise_rate"] = noise_rate;
  j["balance"] = balance;
  j["label_mode"] = std::string(label_mode_name(label_mode));
  j["exemplar_mode"] = std::string(exemplar_mode_name(exemplar_mode));
  j["score_mode"] = std::string(score_mode_name(score_mode));
  j["parallelism"] = parallelism;
  j["out_dir"] = out_dir.string();
  j["cache_dir"] = cache_dir.string();
  j["apo"] = {{"beam_width", apo.beam_width},
              {"depth", apo.depth},
              {"batch_size", apo.batch_size},
              {"dev_fraction", apo.dev_fraction},
              {"rewrites_per_candidate", apo.rewrites_per_candidate}};
  return j.dump(2);
}

RunConfig parse_config(const std::string& json_text) {
  json j = json::parse(json_text);
  RunConfig c;
  c.seed = j.value("seed", std::uint64_t{1});
  for (const json& t : j.at("tasks")) c.tasks.push_back(task_from_name(t.get<std::string>()));
  if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
  if (j.contains("shots")) c.shots = j.at("shots").get<std::vector<int>>();
  for (const json& s : j.at("strategies")) c.strategies.push_back(strategy_from_json(s));
  for (const json& m : j.at("models")) {
    ModelSpec spec;
    spec.name = m.at("name").get<std::string>();
    spec.mock = m.value("mock", spec.name == "mock");
    spec.endpoint = m.value("endpoint", std::string{});
    c.models.push_back(spec);
  }
  c.split_size = j.value("split_size", 2000);
  c.eval_budget = j.value("eval_budget", 1000);
  c.noise_rate = j.value("noise_rate", 0.05);
  c.balance = j.value("balance", 0.5);
  if (j.contains("label_mode")) c.label_mode = label_mode_from_name(j.at("label_mode").get<std::string>());
  if (j.contains("exemplar_mode")) {
    c.exemplar_mode = exemplar_mode_from_name(j.at("exemplar_mode").get<std::string>());
  }
  if (j.contains("score_mode")) c.score_mode = score_mode_from_name(j.at("score_mode").get<std::string>());
  c.parallelism = j.value("parallelism", 4);
  c.out_dir = j.at("out_dir").get<std::string>();
  c.cache_dir = j.contains("cache_dir") ? std::filesystem::path(j.at("cache_dir").get<std::string>())
                                        : c.out_dir / "cache";
  if (j.contains("apo")) {
    const json& a = j.at("apo");
    c.apo.beam_width = a.value("beam_width", 4);
    c.apo.depth = a.value("depth", 6);
    c.apo.batch_size = a.value("batch_size", 1024);
    c.apo.dev_fraction = a.value("dev_fraction", 0.25);
    c.apo.rewrites_per_candidate = a.value("rewrites_per_candidate", 2);
  }
  c.abort_after_records = j.value("abort_after_records", -1ll);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

std::vector<int> strategy_shot_levels(const RunConfig& config, const StrategyConfig& strategy) {
  const std::vector<int>& base = strategy.shots_override.empty() ? config.shots
                                                                 : strategy.shots_override;
  std::vector<int> out;
  for (int n : base) {
    if (strategy.kind == StrategyKind::modus_ponens && n < 2) continue;
    if ((strategy.kind == StrategyKind::cot || strategy.kind == StrategyKind::sot) && n == 2) {
      continue;
    }
    out.push_back(n);
  }
  return out;
}

long long estimate_calls(const RunConfig& config) {
  long long cells = 0;
  for (const StrategyConfig& s : config.strategies) {
    cells += static_cast<long long>(strategy_shot_levels(config, s).size()) *
             static_cast<long long>(config.deltas.size());
  }
  return cells * static_cast<long long>(config.tasks.size()) *
         static_cast<long long>(config.models.size()) * config.eval_budget;
}

// ---------------------------------------------------------------------------
// Manifest handling
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> collect_files(const std::filesystem::path& root) {
  std::vector<std::string> files;
  if (!std::filesystem::exists(root)) return files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string rel = std::filesystem::relative(entry.path(), root).string();
    if (rel == "manifest.json" || rel.ends_with(".tmp")) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

void check_manifest(const RunConfig& config) {
  const std::filesystem::path path = config.out_dir / "manifest.json";
  if (std::filesystem::exists(path)) {
    json stored = json::parse(read_file(path)).at("config");
    json current = json::parse(config.normalized_json());
    if (stored != current) {
      std::string diff;
      for (auto it = current.begin(); it != current.end(); ++it) {
        if (!stored.contains(it.key()) || stored.at(it.key()) != it.value()) {
          diff += "  " + it.key() + ": manifest=" +
                  (stored.contains(it.key()) ? stored.at(it.key()).dump() : "<missing>") +
                  " config=" + it.value().dump() + "\n";
        }
      }
      throw ConfigError("out_dir manifest does not match this config; differing keys:\n" + diff);
    }
  } else if (std::filesystem::exists(config.out_dir) &&
             !std::filesystem::is_empty(config.out_dir)) {
    throw ConfigError("out_dir " + config.out_dir.string() +
                      " is non-empty and has no manifest; refusing to run");
  }
}

void write_manifest(const RunConfig& config) {
  json m;
  m["config"] = json::parse(config.normalized_json());
  m["files"] = collect_files(config.out_dir);
  write_file_atomic(config.out_dir / "manifest.json", m.dump(2) + "\n");
}

std::filesystem::path suite_dir(const RunConfig& config, TaskId task) {
  return config.out_dir / "datasets" / std::string(task_name(task));
}

std::uint64_t derived_seed(const RunConfig& config, std::uint64_t stream, std::uint64_t item) {
  return Rng(config.seed).split(stream).split(item).next();
}

Suite load_suite_checked(const RunConfig& config, TaskId task) {
  const std::filesystem::path dir = suite_dir(config, task);
  if (!std::filesystem::exists(dir / "suite.json")) {
    throw Error("missing upstream artifact " + (dir / "suite.json").string() +
                "; run the generate command first");
  }
  return load_suite(dir);
}

LabelMode split_label_mode(const RunConfig& config) {
  // single_class modes act on the exemplar pool, not on split construction.
  return config.label_mode == LabelMode::uniform_random ? LabelMode::uniform_random
                                                        : LabelMode::natural;
}

LabelMode exemplar_label_mode(const RunConfig& config) {
  if (config.label_mode == LabelMode::single_class_zero ||
      config.label_mode == LabelMode::single_class_one) {
    return config.label_mode;
  }
  return LabelMode::natural;
}

}  // namespace

void cmd_generate(const RunConfig& config) {
  check_manifest(config);
  for (std::size_t ti = 0; ti < config.tasks.size(); ++ti) {
    SuiteOptions options;
    options.size = config.split_size;
    options.eval_budget = config.eval_budget;
    options.noise_rate = config.noise_rate;
    options.balance = config.balance;
    options.label_mode = split_label_mode(config);
    options.deltas = config.deltas;
    Suite suite = build_suite(config.tasks[ti], derived_seed(config, kSuiteStream, ti), options);
    save_suite(suite, suite_dir(config, config.tasks[ti]));
    std::cout << "generated suite for " << task_name(config.tasks[ti]) << " ("
              << suite.tests.size() + 1 << " splits x " << config.split_size << ")\n";
  }
  write_manifest(config);
}

namespace {

StrategySpec resolve_strategy(const RunConfig& config, const StrategyConfig& s, int shots,
                              const std::string& apo_text) {
  StrategySpec spec;
  spec.kind = s.kind;
  spec.shots = shots;
  spec.exemplar_mode = config.exemplar_mode;
  if (s.kind == StrategyKind::word_salad || s.kind == StrategyKind::sot) {
    spec.salad_seed = s.salad_seed.value_or(derived_seed(config, kSaladStream, 0));
  }
  if (s.kind == StrategyKind::apo_prompt) spec.apo_text = apo_text;
  return spec;
}

std::string apo_prompt_for(const RunConfig& config, ModelClient& client, const Suite& suite,
                           std::size_t task_index) {
  const Task& task = get_task(suite.task);
  std::filesystem::path dir =
      config.out_dir / "apo" / client.name() / std::string(task.name());
  std::filesystem::path prompt_path = dir / "prompt.txt";
  if (std::filesystem::exists(prompt_path)) return read_file(prompt_path);
  ApoConfig apo = config.apo;
  apo.seed = derived_seed(config, kApoStream, task_index);
  ApoResult result = optimize(task.description_prompt(), task, suite.train, client, apo);
  write_file_atomic(dir / "trace.jsonl", apo_trace_to_jsonl(result.trace));
  if (result.aborted) {
    throw TransportError("APO aborted by model failure; partial trace kept at " +
                         (dir / "trace.jsonl").string());
  }
  write_file_atomic(prompt_path, result.best_prompt);
  return result.best_prompt;
}

std::shared_ptr<ModelClient> make_client(const RunConfig& config, const ModelSpec& spec) {
  std::shared_ptr<ModelClient> inner;
  if (spec.mock) {
    inner = std::make_shared<MockClient>();
  } else {
    const char* env_url = std::getenv("ICL_ENDPOINT_URL");
    const char* env_key = std::getenv("ICL_API_KEY");
    std::string endpoint = !spec.endpoint.empty() ? spec.endpoint
                                                  : (env_url != nullptr ? env_url : "");
    if (endpoint.empty()) {
      throw ConfigError("model " + spec.name +
                        " needs an endpoint (config or ICL_ENDPOINT_URL)");
    }
    inner = std::shared_ptr<ModelClient>(
        make_http_client(endpoint, env_key != nullptr ? env_key : "", spec.name));
  }
  return std::make_shared<CachedClient>(inner, config.cache_dir);
}

// Existing well-formed record lines; truncates a torn trailing line in place.
std::vector<std::string> load_record_lines(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return {};
  std::string text = read_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  bool torn = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      torn = true;  // no trailing newline: the write was interrupted
      break;
    }
    std::string line = text.substr(start, end - start);
    if (!line.empty()) {
      try {
        run_record_from_json(line);
        lines.push_back(line);
      } catch (const std::exception&) {
        torn = true;
        break;
      }
    }
    start = end + 1;
  }
  if (torn) {
    std::string repaired;
    for (const std::string& line : lines) repaired += line + "\n";
    write_file_atomic(path, repaired);
  }
  return lines;
}

struct RecordBudget {
  long long limit = -1;
  std::atomic<long long> written{0};
};

}  // namespace

void cmd_run(const RunConfig& config, bool allow_live) {
  check_manifest(config);
  bool any_live = std::any_of(config.models.begin(), config.models.end(),
                              [](const ModelSpec& m) { return !m.mock; });
  long long projected = estimate_calls(config);
  std::cout << "projected grid calls: " << projected
            << (any_live ? " (live endpoints)" : " (mock, offline)") << "\n";
  if (any_live && !allow_live) {
    throw ConfigError("refusing a live-endpoint run without the explicit live flag; projected "
                      "calls: " + std::to_string(projected));
  }

  RecordBudget budget;
  budget.limit = config.abort_after_records;

  for (const ModelSpec& model_spec : config.models) {
    std::shared_ptr<ModelClient> client = make_client(config, model_spec);
    for (std::size_t ti = 0; ti < config.tasks.size(); ++ti) {
      const TaskId task_id = config.tasks[ti];
      const Task& task = get_task(task_id);
      Suite suite = load_suite_checked(config, task_id);
      const std::uint64_t exemplar_seed = derived_seed(config, kExemplarStream, ti);

      for (const StrategyConfig& strategy_cfg : config.strategies) {
        std::string apo_text;
        if (strategy_cfg.kind == StrategyKind::apo_prompt) {
          apo_text = apo_prompt_for(config, *client, suite, ti);
        }
        for (int shots : strategy_shot_levels(config, strategy_cfg)) {
          StrategySpec strategy = resolve_strategy(config, strategy_cfg, shots, apo_text);
          for (std::size_t di = 0; di < config.deltas.size(); ++di) {
            const double delta = config.deltas[di];
            const Dataset* test = nullptr;
            for (const Dataset& ds : suite.tests) {
              if (ds.spec.delta == delta) test = &ds;
            }
            if (test == nullptr) {
              throw Error("suite for " + std::string(task.name()) +
                          " lacks a test split at delta " + delta_text(delta));
            }

            std::filesystem::path cell_path =
                config.out_dir / "records" / model_spec.name / std::string(task.name()) /
                (std::string(strategy_name(strategy.kind)) + "_s" + std::to_string(shots) + "_d" +
                 std::to_string(di) + ".jsonl");
            std::vector<std::string> existing = load_record_lines(cell_path);
            const int cell_budget =
                std::min<int>(config.eval_budget, static_cast<int>(test->instances.size()));
            if (static_cast<int>(existing.size()) >= cell_budget) continue;

            const int first = static_cast<int>(existing.size());
            const int count = cell_budget - first;
            std::vector<RunRecord> results(count);
            std::atomic<int> cursor{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;

            auto worker = [&]() {
              while (true) {
                int slot = cursor.fetch_add(1);
                if (slot >= count) return;
                int i = first + slot;
                try {
                  const TaskInstance& inst = test->instances[i];
                  std::vector<TaskInstance> exemplars =
                      select_exemplars(suite.train, shots, config.exemplar_mode,
                                       exemplar_label_mode(config), exemplar_seed,
                                       static_cast<std::uint64_t>(i));
                  PromptBundle bundle = render(strategy, task, exemplars, inst);
                  for (const auto& [user, assistant] : bundle.turns) {
                    if (user == bundle.query) {
                      throw Error("test input leaked into exemplar turns: " + inst.id);
                    }
                  }
                  ModelRequest request = make_request(bundle, model_spec.name);
                  RunRecord record;
                  record.run_id = model_spec.name + ":" + std::string(task.name()) + ":" +
                                  std::string(strategy_name(strategy.kind)) + ":s" +
                                  std::to_string(shots) + ":d" + std::to_string(di) + ":" + inst.id;
                  record.model = model_spec.name;
                  record.task = std::string(task.name());
                  record.strategy = std::string(strategy_name(strategy.kind));
                  record.shots = shots;
                  record.delta = delta;
                  record.instance_id = inst.id;
                  record.request_hash = request_hash(request);
                  try {
                    ModelResponse response = client->complete(request);
                    record.raw_output = response.text;
                    record.attempts = response.attempts;
                    if (response.out_of_tokens) {
                      record.outcome = "out_of_tokens";
                    } else {
                      bool cot_mode = strategy.kind == StrategyKind::cot ||
                                      strategy.kind == StrategyKind::sot;
                      ParseResult parsed = parse_output(response.text, task.binary(), cot_mode);
                      if (parsed.kind == ParseResult::Kind::error) {
                        record.outcome = "parse_error";
                        record.error_kind = parsed.error_kind;
                      } else {
                        record.outcome = task.binary() ? "label" : "integer";
                        record.value = parsed.value;
                        record.correct = parsed.value == inst.gold;
                      }
                    }
                  } catch (const TransportError&) {
                    record.outcome = "transport_error";
                    record.attempts = kMaxAttempts;
                  }
                  results[slot] = std::move(record);
                } catch (...) {
                  std::lock_guard<std::mutex> lock(failure_mutex);
                  if (!failure) failure = std::current_exception();
                  return;
                }
              }
            };

            std::vector<std::thread> threads;
            int n_threads = std::max(1, std::min(config.parallelism, count));
            threads.reserve(n_threads);
            for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
            for (std::thread& t : threads) t.join();
            if (failure) std::rethrow_exception(failure);

            std::filesystem::create_directories(cell_path.parent_path());
            std::ofstream out(cell_path, std::ios::binary | std::ios::app);
            for (int slot = 0; slot < count; ++slot) {
              if (budget.limit >= 0 && budget.written.load() >= budget.limit) {
                out.flush();
                throw AbortForTest("record budget reached");
              }
              out << run_record_to_json(results[slot]) << "\n";
              out.flush();
              budget.written.fetch_add(1);
            }
          }
        }
      }
    }
  }
  write_manifest(config);
}

void cmd_render(const RunConfig& config) {
  check_manifest(config);
  for (std::size_t ti = 0; ti < config.tasks.size(); ++ti) {
    const TaskId task_id = config.tasks[ti];
    const Task& task = get_task(task_id);
    Suite suite = load_suite_checked(config, task_id);
    const std::uint64_t exemplar_seed = derived_seed(config, kExemplarStream, ti);
    for (const StrategyConfig& strategy_cfg : config.strategies) {
      if (strategy_cfg.kind == StrategyKind::apo_prompt) continue;  // needs a run first
      std::vector<int> levels = strategy_shot_levels(config, strategy_cfg);
      if (levels.empty()) continue;
      StrategySpec strategy = resolve_strategy(config, strategy_cfg, levels.front(), "");
      std::vector<TaskInstance> exemplars =
          select_exemplars(suite.train, strategy.shots, config.exemplar_mode,
                           exemplar_label_mode(config), exemplar_seed, 0);
      PromptBundle bundle = render(strategy, task, exemplars, suite.tests.front().instances.front());
      json j{{"messages", json::parse(bundle_to_chat_json(bundle))},
             {"max_answer_tokens", bundle.max_answer_tokens}};
      write_file_atomic(config.out_dir / "bundles" / std::string(task.name()) /
                            (std::string(strategy_name(strategy.kind)) + "_s" +
                             std::to_string(strategy.shots) + ".json"),
                        j.dump(2) + "\n");
    }
  }
  write_manifest(config);
}

void cmd_baseline(const RunConfig& config) {
  check_manifest(config);
  std::ostringstream out;
  out << "task,learner,delta,accuracy,selected\n";
  for (TaskId task_id : config.tasks) {
    if (!task_is_baselined(task_id)) continue;
    Suite suite = load_suite_checked(config, task_id);
    BestOfResult best = best_of(suite);
    for (const auto& [learner, accs] : best.all) {
      for (const auto& [delta, acc] : accs) {
        char acc_text[32];
        std::snprintf(acc_text, sizeof(acc_text), "%.4f", acc);
        out << task_name(task_id) << "," << learner_name(learner) << "," << delta_text(delta)
            << "," << acc_text << "," << (learner == best.learner ? 1 : 0) << "\n";
      }
    }
    std::cout << "baselines for " << task_name(task_id) << ": best " << learner_name(best.learner)
              << "\n";
  }
  write_file_atomic(config.out_dir / "baselines" / "report.csv", out.str());
  write_manifest(config);
}

void cmd_analyze(const RunConfig& config) {
  check_manifest(config);
  std::vector<RunRecord> records;
  const std::filesystem::path records_dir = config.out_dir / "records";
  if (!std::filesystem::exists(records_dir)) {
    throw Error("missing upstream artifact " + records_dir.string() + "; run the run command first");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(records_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const std::filesystem::path& file : files) {
    for (const std::string& line : split(read_file(file), '\n')) {
      if (!line.empty()) records.push_back(run_record_from_json(line));
    }
  }
  for (ScoreMode mode : {ScoreMode::compliance_and_learning, ScoreMode::learning_only}) {
    MetricsTable table = build_metrics(records, mode);
    emit_report(table, config.out_dir / "analysis" / std::string(score_mode_name(mode)),
                std::string(score_mode_name(mode)));
  }
  std::cout << "analyzed " << records.size() << " run records\n";
  write_manifest(config);
}

// ---------------------------------------------------------------------------
// verify: desk-scale audit with simple independent re-implementations.
// ---------------------------------------------------------------------------

namespace {

long long verify_reference_label(TaskId id, const std::string& input);

// Plain re-count / re-scan implementations, deliberately structured
// differently from the task oracles.
long long verify_parity(const std::string& s) {
  int odd = 0;
  for (char c : s) {
    if (c == '0') odd ^= 1;
  }
  return odd ? 0 : 1;
}

long long verify_pattern(const std::string& s) {
  const std::string pat = "abcabb";
  if (s.size() < pat.size()) return 0;
  for (std::size_t i = 0; i + pat.size() <= s.size(); ++i) {
    if (std::equal(pat.begin(), pat.end(), s.begin() + static_cast<long>(i))) return 1;
  }
  return 0;
}

long long verify_reversal(const std::string& s) {
  std::size_t hash = s.find('#');
  std::string left = s.substr(0, hash), right = s.substr(hash + 1);
  auto toks = [](const std::string& part) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < part.size()) {
      bool matched = false;
      for (const std::string& tok : kReversalAlphabet) {
        if (part.compare(pos, tok.size(), tok) == 0) {
          out.push_back(tok);
          pos += tok.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw Error("verify: bad reversal token stream");
    }
    return out;
  };
  std::vector<std::string> l = toks(left), r = toks(right);
  std::reverse(r.begin(), r.end());
  return l == r ? 1 : 0;
}

long long verify_stack(const std::string& input) {
  std::vector<std::string> parts = split(input, '|');
  std::deque<char> st(parts[0].begin(), parts[0].end());
  if (!parts[1].empty()) {
    for (const std::string& op : split(parts[1], ',')) {
      if (op == "push(0)" || op == "push(1)") {
        if (st.size() >= kStackCapacity) return 0;
        st.push_back(op == "push(0)" ? '0' : '1');
      } else if (op == "pop") {
        if (st.empty()) return 0;
        st.pop_back();
      } else if (op == "empty") {
        if (!st.empty()) return 0;
      } else if (op == "stop") {
        break;
      }
    }
  }
  return std::string(st.begin(), st.end()) == parts[2] ? 1 : 0;
}

long long verify_hamiltonian(const std::string& input) {
  std::vector<std::string> lines = split(input, '\n');
  std::vector<std::string> rows;
  std::size_t i = 1;
  while (lines[i] != "Path:") rows.push_back(lines[i++]);
  std::vector<int> path;
  for (const std::string& tok : split(lines[i + 1], ',')) path.push_back(std::stoi(tok));
  const int n = static_cast<int>(rows.size());
  if (static_cast<int>(path.size()) != n) return 0;
  std::set<int> seen(path.begin(), path.end());
  if (static_cast<int>(seen.size()) != n) return 0;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    if (rows[path[k]][path[k + 1]] != '1') return 0;
  }
  return 1;
}

long long verify_maze_walk(const std::vector<std::string>& grid,
                           const std::vector<std::string>& moves) {
  int r = 0, c = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::size_t pos = grid[i].find('S');
    if (pos != std::string::npos) {
      r = static_cast<int>(i);
      c = static_cast<int>(pos);
    }
  }
  for (const std::string& m : moves) {
    r += m == "down" ? 1 : m == "up" ? -1 : 0;
    c += m == "right" ? 1 : m == "left" ? -1 : 0;
    if (r < 0 || r >= static_cast<int>(grid.size()) || c < 0 ||
        c >= static_cast<int>(grid[0].size()) || grid[r][c] == '#') {
      return 0;
    }
  }
  return grid[r][c] == 'E' ? 1 : 0;
}

long long verify_maze_complete(const std::vector<std::string>& grid,
                               const std::vector<std::string>& moves) {
  const int h = static_cast<int>(grid.size());
  const int w = static_cast<int>(grid[0].size());
  const int dr[4] = {-1, 1, 0, 0};
  const int dc[4] = {0, 0, -1, 1};
  const char* names[4] = {"up", "down", "left", "right"};
  // Flood the segment touching E.
  std::set<std::pair<int, int>> target;
  std::deque<std::pair<int, int>> q;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid[r][c] != 'E') continue;
      for (int d = 0; d < 4; ++d) {
        int nr = r + dr[d], nc = c + dc[d];
        if (nr >= 0 && nr < h && nc >= 0 && nc < w && grid[nr][nc] == '+') {
          target.insert({nr, nc});
          q.push_back({nr, nc});
        }
      }
    }
  }
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop_front();
    for (int d = 0; d < 4; ++d) {
      int nr = r + dr[d], nc = c + dc[d];
      if (nr >= 0 && nr < h && nc >= 0 && nc < w && grid[nr][nc] == '+' && !target.count({nr, nc})) {
        target.insert({nr, nc});
        q.push_back({nr, nc});
      }
    }
  }
  // BFS from '?' across spaces.
  std::pair<int, int> start{-1, -1};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid[r][c] == '?') start = {r, c};
    }
  }
  std::map<std::pair<int, int>, std::pair<std::pair<int, int>, std::string>> parent;
  parent[start] = {{-1, -1}, ""};
  std::deque<std::pair<int, int>> frontier{start};
  while (!frontier.empty()) {
    auto cur = frontier.front();
    frontier.pop_front();
    for (int d = 0; d < 4; ++d) {
      std::pair<int, int> next{cur.first + dr[d], cur.second + dc[d]};
      if (next.first < 0 || next.first >= h || next.second < 0 || next.second >= w) continue;
      if (target.count(next)) {
        std::vector<std::string> expected{names[d]};
        for (auto p = cur; p != start; p = parent[p].first) expected.push_back(parent[p].second);
        std::reverse(expected.begin(), expected.end());
        return expected == moves ? 1 : 0;
      }
      if (grid[next.first][next.second] == ' ' && !parent.count(next)) {
        parent[next] = {cur, names[d]};
        frontier.push_back(next);
      }
    }
  }
  return 0;
}

long long verify_vm(const std::string& ops_csv, bool has_target, long long target) {
  long long balance = 0;
  if (!ops_csv.empty()) {
    for (const std::string& op : split(ops_csv, ',')) {
      if (op == "coffee") balance -= 15;
      else if (op == "biscuit") balance -= 20;
      else if (op == "soda") balance -= 25;
      else balance += std::stoll(op.substr(1));
    }
  }
  return has_target ? (balance == target ? 1 : 0) : balance;
}

long long verify_reference_label(TaskId id, const std::string& input) {
  switch (id) {
    case TaskId::parity: return verify_parity(input);
    case TaskId::pattern_matching: return verify_pattern(input);
    case TaskId::reversal: return verify_reversal(input);
    case TaskId::stack: return verify_stack(input);
    case TaskId::hamiltonian: return verify_hamiltonian(input);
    case TaskId::maze_solve: {
      std::vector<std::string> lines = split(input, '\n');
      std::vector<std::string> grid(lines.begin() + 1, lines.end() - 2);
      return verify_maze_walk(grid, split(lines.back(), ','));
    }
    case TaskId::maze_complete: {
      std::vector<std::string> lines = split(input, '\n');
      std::vector<std::string> grid(lines.begin() + 1, lines.end() - 2);
      return verify_maze_complete(grid, split(lines.back(), ','));
    }
    case TaskId::vm_verify: {
      std::vector<std::string> parts = split(input, '|');
      return verify_vm(parts[0], true, std::stoll(parts[1]));
    }
    case TaskId::vm_sum: return verify_vm(input, false, 0);
  }
  throw Error("verify: unknown task");
}

}  // namespace

int cmd_verify(const RunConfig& config) {
  check_manifest(config);
  int failures = 0;
  std::ostringstream report;
  auto check = [&](bool ok, const std::string& what) {
    report << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
  };

  for (TaskId task_id : config.tasks) {
    const Task& task = get_task(task_id);
    const std::string name(task.name());
    Suite suite = load_suite_checked(config, task_id);

    // Suite fidelity: exact sup distances, measured from the persisted files.
    Automaton train_aut =
        parse_automaton(read_file(suite_dir(config, task_id) / "automaton_train.txt"));
    for (std::size_t k = 0; k < suite.tests.size(); ++k) {
      Automaton test_aut = parse_automaton(
          read_file(suite_dir(config, task_id) / ("automaton_test_" + std::to_string(k) + ".txt")));
      double measured = sup_distance(train_aut, test_aut);
      check(std::fabs(measured - suite.tests[k].spec.delta) <= 1e-12,
            name + ": sup_distance(train, test_" + std::to_string(k) + ") == " +
                delta_text(suite.tests[k].spec.delta));
    }

    // Dedup across the whole suite.
    std::set<std::string> inputs;
    std::size_t total = suite.train.instances.size();
    for (const TaskInstance& inst : suite.train.instances) inputs.insert(inst.input);
    for (const Dataset& ds : suite.tests) {
      total += ds.instances.size();
      for (const TaskInstance& inst : ds.instances) inputs.insert(inst.input);
    }
    check(inputs.size() == total, name + ": all " + std::to_string(total) + " inputs unique");

    auto audit_split = [&](const Dataset& ds, const std::string& label) {
      check(static_cast<int>(ds.instances.size()) == ds.spec.size,
            name + "/" + label + ": size == " + std::to_string(ds.spec.size));
      if (task.binary() && ds.spec.label_mode == LabelMode::natural) {
        double positive = 0;
        for (const TaskInstance& inst : ds.instances) positive += inst.gold == 1 ? 1 : 0;
        double fraction = positive / static_cast<double>(ds.instances.size());
        check(std::fabs(fraction - ds.spec.balance) <= 0.02,
              name + "/" + label + ": positive fraction within 2 points of target");
      }
      if (ds.spec.label_mode != LabelMode::uniform_random) {
        double noisy = 0;
        for (const TaskInstance& inst : ds.instances) noisy += inst.noisy ? 1 : 0;
        double n = static_cast<double>(ds.instances.size());
        double sigma = std::sqrt(ds.spec.noise_rate * (1 - ds.spec.noise_rate) * n);
        check(std::fabs(noisy - ds.spec.noise_rate * n) <= 3.0 * sigma + 1e-9,
              name + "/" + label + ": noise flags within binomial 3 sigma");
      }
      bool honest = true;
      bool reference_ok = true;
      int audited = 0;
      for (const TaskInstance& inst : ds.instances) {
        long long truth = task.oracle(inst.input);
        if ((inst.gold != truth) != inst.noisy) honest = false;
        if (audited < 1000) {
          if (verify_reference_label(task_id, inst.input) != truth) reference_ok = false;
          ++audited;
        }
      }
      check(honest, name + "/" + label + ": noisy flag iff gold differs from oracle");
      check(reference_ok,
            name + "/" + label + ": oracle agrees with the independent reference on " +
                std::to_string(audited) + " instances");
    };
    audit_split(suite.train, "train");
    for (std::size_t k = 0; k < suite.tests.size(); ++k) {
      audit_split(suite.tests[k], "test_" + std::to_string(k));
    }

    // Trace answers agree with the oracle on clean instances.
    bool traces_ok = true;
    int examined = 0;
    for (const TaskInstance& inst : suite.train.instances) {
      if (inst.noisy) continue;
      std::string trace = task.cot_trace(inst.input);
      std::size_t pos = trace.find_last_of(' ');
      if (std::stoll(trace.substr(pos + 1)) != inst.gold) traces_ok = false;
      if (++examined >= 50) break;
    }
    check(traces_ok, name + ": trace answers match gold on " + std::to_string(examined) +
                         " clean train instances");
  }

  write_file_atomic(config.out_dir / "verify_report.txt", report.str());
  write_manifest(config);
  return failures;
}

}  // namespace icl
