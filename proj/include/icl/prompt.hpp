#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icl/dataset.hpp"
#include "icl/task.hpp"

namespace icl {

enum class StrategyKind {
  modus_ponens,
  description,
  direct_encoding,
  word_salad,
  cot,
  sot,
  apo_prompt,
};

std::string_view strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(std::string_view name);

struct StrategySpec {
  StrategyKind kind = StrategyKind::description;
  int shots = 0;
  ExemplarMode exemplar_mode = ExemplarMode::fixed;
  std::optional<std::uint64_t> salad_seed;
  std::string apo_text;  // system prompt for kind == apo_prompt

  // Grid invariants: modus ponens has no zero-shot, CoT/SoT skip 2-shot,
  // salad_seed present exactly for the salad strategies.
  void validate() const;
};

struct PromptBundle {
  std::string system;  // empty for modus ponens
  std::vector<std::pair<std::string, std::string>> turns;  // (user, assistant)
  std::string query;
  int max_answer_tokens = 3;
};

// Bundled nonsense vocabulary for the salad transforms.
const std::vector<std::string>& salad_vocabulary();

struct SaladOptions {
  std::vector<std::string> protected_literals;
  bool preserve_first_line = false;
  // Trailing content lines kept verbatim: the output-format sentence plus the
  // "Data:" trailer for system prompts, the answer line for traces.
  int preserve_trailing_lines = 2;
};

// Replaces natural-language words with vocabulary draws, preserving numerals,
// labels, task literals, punctuation and the protected boundary lines. Token
// count is preserved one-for-one.
std::string word_salad_transform(const std::string& text,
                                 const std::vector<std::string>& vocabulary, std::uint64_t seed,
                                 const SaladOptions& options = {});

PromptBundle render(const StrategySpec& strategy, const Task& task,
                    const std::vector<TaskInstance>& exemplars, const TaskInstance& query);

// Chat-message array (role/content records) for the wire.
std::string bundle_to_chat_json(const PromptBundle& bundle);

}  // namespace icl
