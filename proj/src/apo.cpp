#include "icl/apo.hpp"

#include <algorithm>

#include "icl/analysis.hpp"
#include "icl/errors.hpp"
#include "icl/prompt.hpp"
#include "icl/rng.hpp"
#include "json.hpp"

namespace icl {

namespace {

const char* kCritiqueTemplate =
    "You are improving a system prompt for a classification task.\n"
    "Current prompt:\n"
    "<PROMPT>{prompt}</PROMPT>\n"
    "The prompt led to wrong labels on these examples:\n"
    "{errors}\n"
    "Write a short critique of the prompt's weaknesses.";

const char* kRewriteTemplate =
    "You are improving a system prompt for a classification task.\n"
    "Current prompt:\n"
    "<PROMPT>{prompt}</PROMPT>\n"
    "Critique of the current prompt:\n"
    "{critique}\n"
    "Write {k} improved system prompts. Wrap each one in <PROMPT> and </PROMPT> tags.";

std::string substitute(std::string text, std::string_view key, const std::string& value) {
  std::string needle = "{" + std::string(key) + "}";
  std::size_t pos;
  while ((pos = text.find(needle)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
  }
  return text;
}

std::vector<std::string> extract_prompts(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("<PROMPT>", pos);
    if (open == std::string::npos) break;
    std::size_t close = text.find("</PROMPT>", open);
    if (close == std::string::npos) break;
    std::string body = text.substr(open + 8, close - open - 8);
    while (!body.empty() && (body.front() == '\n' || body.front() == ' ')) body.erase(body.begin());
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
    if (!body.empty()) out.push_back(body);
    pos = close + 9;
  }
  return out;
}

struct Candidate {
  int id;
  int parent;
  std::string prompt;
  double dev_accuracy;
  std::vector<const TaskInstance*> mistakes;
};

}  // namespace

void ApoConfig::validate() const {
  if (beam_width < 1) throw ConfigError("APO beam_width must be at least 1");
  if (depth < 0) throw ConfigError("APO depth must be non-negative");
  if (batch_size < 1) throw ConfigError("APO batch_size must be at least 1");
  if (dev_fraction <= 0.0 || dev_fraction > 1.0) throw ConfigError("APO dev_fraction in (0, 1]");
  if (rewrites_per_candidate < 1) throw ConfigError("APO needs at least one rewrite");
}

const std::string& default_critique_template() {
  static const std::string t = kCritiqueTemplate;
  return t;
}

const std::string& default_rewrite_template() {
  static const std::string t = kRewriteTemplate;
  return t;
}

ApoResult optimize(const std::string& seed_prompt, const Task& task, const Dataset& train,
                   ModelClient& model, const ApoConfig& config) {
  config.validate();
  const std::string critique_tpl =
      config.critique_template.empty() ? default_critique_template() : config.critique_template;
  const std::string rewrite_tpl =
      config.rewrite_template.empty() ? default_rewrite_template() : config.rewrite_template;

  // Dev batch drawn from the train split only.
  Rng rng(config.seed);
  std::vector<std::size_t> order(train.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::size_t dev_size = static_cast<std::size_t>(
      static_cast<double>(train.instances.size()) * config.dev_fraction);
  dev_size = std::min<std::size_t>(dev_size, static_cast<std::size_t>(config.batch_size));
  if (dev_size == 0) throw ConfigError("APO dev set is empty; raise dev_fraction");
  std::vector<const TaskInstance*> dev;
  dev.reserve(dev_size);
  for (std::size_t i = 0; i < dev_size; ++i) dev.push_back(&train.instances[order[i]]);

  auto ask = [&](const std::string& user_text, int max_tokens) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "user"}, {"content", user_text}});
    ModelRequest req;
    req.model_name = model.name();
    req.messages_json = messages.dump();
    req.max_tokens = max_tokens;
    return model.complete(req).text;
  };

  auto score = [&](Candidate& cand) {
    StrategySpec strategy;
    strategy.kind = StrategyKind::apo_prompt;
    strategy.shots = 0;
    strategy.apo_text = cand.prompt;
    long long correct = 0;
    cand.mistakes.clear();
    for (const TaskInstance* inst : dev) {
      PromptBundle bundle = render(strategy, task, {}, *inst);
      ModelResponse resp = model.complete(make_request(bundle, model.name()));
      ParseResult parsed = parse_output(resp.text, task.binary(), false);
      bool ok = parsed.kind != ParseResult::Kind::error && parsed.value == inst->gold;
      if (ok) {
        ++correct;
      } else if (cand.mistakes.size() < 4) {
        cand.mistakes.push_back(inst);
      }
    }
    cand.dev_accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(dev.size());
  };

  ApoResult result;
  int next_id = 0;
  std::vector<Candidate> beam;
  Candidate seed_cand{next_id++, -1, seed_prompt, 0.0, {}};

  try {
    score(seed_cand);
    result.trace.push_back({0, seed_cand.id, -1, seed_cand.prompt, seed_cand.dev_accuracy});
    result.best_prompt = seed_cand.prompt;
    result.best_dev_accuracy = seed_cand.dev_accuracy;
    beam.push_back(seed_cand);

    for (int round = 1; round <= config.depth; ++round) {
      std::vector<Candidate> fresh;
      for (const Candidate& cand : beam) {
        std::string errors;
        for (const TaskInstance* inst : cand.mistakes) {
          errors += inst->input + " -> expected " + std::to_string(inst->gold) + "\n";
        }
        if (errors.empty()) errors = "(no errors in the sampled batch)\n";
        std::string critique =
            ask(substitute(substitute(critique_tpl, "prompt", cand.prompt), "errors", errors), 512);
        std::string rewrite_req = substitute(
            substitute(substitute(rewrite_tpl, "prompt", cand.prompt), "critique", critique), "k",
            std::to_string(config.rewrites_per_candidate));
        for (std::string& prompt : extract_prompts(ask(rewrite_req, 1024))) {
          fresh.push_back({next_id++, cand.id, std::move(prompt), 0.0, {}});
        }
      }
      for (Candidate& cand : fresh) {
        score(cand);
        result.trace.push_back({round, cand.id, cand.parent, cand.prompt, cand.dev_accuracy});
        if (cand.dev_accuracy > result.best_dev_accuracy) {
          result.best_dev_accuracy = cand.dev_accuracy;
          result.best_prompt = cand.prompt;
        }
      }
      beam.insert(beam.end(), fresh.begin(), fresh.end());
      std::stable_sort(beam.begin(), beam.end(), [](const Candidate& a, const Candidate& b) {
        return a.dev_accuracy > b.dev_accuracy;
      });
      if (static_cast<int>(beam.size()) > config.beam_width) beam.resize(config.beam_width);
    }
  } catch (const TransportError&) {
    result.aborted = true;
  }
  return result;
}

std::string apo_trace_to_jsonl(const std::vector<ApoTraceEntry>& trace) {
  std::string out;
  for (const ApoTraceEntry& e : trace) {
    nlohmann::json j{{"round", e.round},
                     {"candidate_id", e.candidate_id},
                     {"parent_id", e.parent_id},
                     {"prompt_text", e.prompt_text},
                     {"dev_accuracy", e.dev_accuracy}};
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace icl
