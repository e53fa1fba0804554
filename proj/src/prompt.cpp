#include "icl/prompt.hpp"

#include <algorithm>
#include <set>

#include "icl/errors.hpp"
#include "icl/text.hpp"
#include "json.hpp"

namespace icl {

namespace {

const char* kFormatLine =
    "Give your answer as a single integer, and your reasoning in a new line. For example:\n1";

constexpr int kDefaultAnswerTokens = 3;
constexpr int kCotAnswerTokens = 1024;
constexpr int kApoAnswerTokens = 512;

bool is_salad_kind(StrategyKind kind) {
  return kind == StrategyKind::word_salad || kind == StrategyKind::sot;
}

// Zero-shot prompts carry the output-format instruction; it goes right
// before the closing "Data:" line.
std::string with_format_line(std::string system) {
  std::size_t pos = system.rfind("\nData:");
  if (pos == std::string::npos) return system + "\n" + kFormatLine;
  return system.substr(0, pos) + "\n" + kFormatLine + system.substr(pos);
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::modus_ponens: return "modus_ponens";
    case StrategyKind::description: return "description";
    case StrategyKind::direct_encoding: return "direct_encoding";
    case StrategyKind::word_salad: return "word_salad";
    case StrategyKind::cot: return "cot";
    case StrategyKind::sot: return "sot";
    case StrategyKind::apo_prompt: return "apo";
  }
  return "description";
}

StrategyKind strategy_from_name(std::string_view name) {
  for (StrategyKind k : {StrategyKind::modus_ponens, StrategyKind::description,
                         StrategyKind::direct_encoding, StrategyKind::word_salad, StrategyKind::cot,
                         StrategyKind::sot, StrategyKind::apo_prompt}) {
    if (strategy_name(k) == name) return k;
  }
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

void StrategySpec::validate() const {
  if (shots < 0) throw ConfigError("shots must be non-negative");
  if (kind == StrategyKind::modus_ponens && shots < 2) {
    throw ConfigError("modus ponens has no zero-shot variant; needs at least 2 exemplars");
  }
  if ((kind == StrategyKind::cot || kind == StrategyKind::sot) && shots == 2) {
    throw ConfigError("cot/sot exclude the 2-shot level");
  }
  if (is_salad_kind(kind) != salad_seed.has_value()) {
    throw ConfigError("salad_seed must be present exactly for word_salad/sot strategies");
  }
  if (kind == StrategyKind::apo_prompt && apo_text.empty()) {
    throw ConfigError("apo strategy needs the optimised system prompt text");
  }
}

const std::vector<std::string>& salad_vocabulary() {
  static const std::vector<std::string> words = {
      "zumpus",  "wumpus",  "lorpus",   "grimpus",  "brimpus", "impus",    "tumpus",
      "shumpus", "yumpus",  "sterpus",  "rompus",   "lempus",  "vumpus",   "gorpus",
      "jompus",  "dumpus",  "numpus",   "amenable", "kind",    "aggressive", "floral",
      "dull",    "transparent", "temperate", "fruity", "discordant", "windy", "opaque",
      "bitter",  "angry",   "snowy",    "sunny",    "luminous", "muffled",  "feisty",
      "overcast", "metallic", "melodic", "earthy",  "liquid",  "spicy",    "rainy",
      "brown",   "sweet",   "sour",     "bright",   "nervous", "happy",    "moderate",
      "slow",    "fast",    "cold",     "hot",      "shy",     "loud",     "mean",
      "Polly",   "Max",     "Wren",     "Sally",    "Stella",  "Fae"};
  return words;
}

namespace {

bool is_punct_char(char c) {
  return std::string_view("()[]{}\"'`.,:;!?").find(c) != std::string_view::npos;
}

struct TokenParts {
  std::string prefix;
  std::string core;
  std::string suffix;
};

TokenParts split_token(const std::string& token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && is_punct_char(token[b])) ++b;
  while (e > b && is_punct_char(token[e - 1])) --e;
  return {token.substr(0, b), token.substr(b, e - b), token.substr(e)};
}

}  // namespace

std::string word_salad_transform(const std::string& text,
                                 const std::vector<std::string>& vocabulary, std::uint64_t seed,
                                 const SaladOptions& options) {
  if (vocabulary.empty()) throw ConfigError("salad vocabulary must be non-empty");
  std::set<std::string> protected_set(options.protected_literals.begin(),
                                      options.protected_literals.end());
  Rng rng(seed);
  std::vector<std::string> lines = split(text, '\n');
  std::size_t last_content = lines.size();
  while (last_content > 0 && trim(lines[last_content - 1]).empty()) --last_content;
  std::size_t preserved_from = last_content;
  for (int k = 0; k < options.preserve_trailing_lines && preserved_from > 0; ++k) {
    --preserved_from;
  }

  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (options.preserve_first_line && li == 0) continue;
    if (li >= preserved_from && li < last_content) continue;
    std::vector<std::string> tokens = split(lines[li], ' ');
    for (std::string& token : tokens) {
      TokenParts parts = split_token(token);
      if (parts.core.empty()) continue;
      if (is_integer_token(parts.core)) continue;
      if (protected_set.count(parts.core)) continue;
      token = parts.prefix + vocabulary[rng.index(vocabulary.size())] + parts.suffix;
    }
    lines[li] = join(tokens, " ");
  }
  return join(lines, "\n");
}

PromptBundle render(const StrategySpec& strategy, const Task& task,
                    const std::vector<TaskInstance>& exemplars, const TaskInstance& query) {
  strategy.validate();
  if (static_cast<int>(exemplars.size()) != strategy.shots) {
    throw ConfigError("exemplar count does not match the strategy's shot count");
  }

  PromptBundle bundle;
  bundle.max_answer_tokens = kDefaultAnswerTokens;

  SaladOptions salad;
  salad.protected_literals = task.protected_literals();

  switch (strategy.kind) {
    case StrategyKind::modus_ponens:
      bundle.system.clear();
      break;
    case StrategyKind::description:
      bundle.system = task.description_prompt();
      break;
    case StrategyKind::direct_encoding:
      bundle.system = task.direct_encoding_prompt();
      break;
    case StrategyKind::word_salad:
      bundle.system = word_salad_transform(task.description_prompt(), salad_vocabulary(),
                                           *strategy.salad_seed, salad);
      break;
    case StrategyKind::cot:
      bundle.system = task.description_prompt();
      bundle.max_answer_tokens = kCotAnswerTokens;
      break;
    case StrategyKind::sot:
      bundle.system = word_salad_transform(task.description_prompt(), salad_vocabulary(),
                                           *strategy.salad_seed, salad);
      bundle.max_answer_tokens = kCotAnswerTokens;
      break;
    case StrategyKind::apo_prompt:
      bundle.system = strategy.apo_text;
      bundle.max_answer_tokens = kApoAnswerTokens;
      break;
  }

  if (strategy.shots == 0 && strategy.kind != StrategyKind::modus_ponens) {
    bundle.system = with_format_line(bundle.system);
  }

  const bool trace_answers =
      strategy.kind == StrategyKind::cot || strategy.kind == StrategyKind::sot;
  for (std::size_t i = 0; i < exemplars.size(); ++i) {
    const TaskInstance& e = exemplars[i];
    std::string user = e.input + ":";
    std::string assistant;
    if (trace_answers) {
      assistant = task.cot_trace(e.input);
      if (strategy.kind == StrategyKind::sot) {
        SaladOptions trace_salad = salad;
        trace_salad.preserve_first_line = true;     // "Let's think..." boilerplate
        trace_salad.preserve_trailing_lines = 1;    // the answer line
        Rng per_trace(*strategy.salad_seed);
        assistant = word_salad_transform(assistant, salad_vocabulary(),
                                         per_trace.split(i + 1).next(), trace_salad);
      }
    } else {
      assistant = std::to_string(e.gold);
    }
    bundle.turns.emplace_back(std::move(user), std::move(assistant));
  }
  bundle.query = query.input + ":";
  return bundle;
}

std::string bundle_to_chat_json(const PromptBundle& bundle) {
  nlohmann::json messages = nlohmann::json::array();
  if (!bundle.system.empty()) {
    messages.push_back({{"role", "system"}, {"content", bundle.system}});
  }
  for (const auto& [user, assistant] : bundle.turns) {
    messages.push_back({{"role", "user"}, {"content", user}});
    messages.push_back({{"role", "assistant"}, {"content", assistant}});
  }
  messages.push_back({{"role", "user"}, {"content", bundle.query}});
  return messages.dump();
}

}  // namespace icl
