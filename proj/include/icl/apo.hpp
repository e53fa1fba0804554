#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icl/dataset.hpp"
#include "icl/gateway.hpp"

namespace icl {

struct ApoConfig {
  int beam_width = 4;
  int depth = 6;
  int batch_size = 1024;
  double dev_fraction = 0.25;     // share of the train split used for scoring
  int rewrites_per_candidate = 2;
  std::string critique_template;  // empty = bundled default
  std::string rewrite_template;
  std::uint64_t seed = 0;

  void validate() const;
};

const std::string& default_critique_template();
const std::string& default_rewrite_template();

struct ApoTraceEntry {
  int round = 0;
  int candidate_id = 0;
  int parent_id = -1;
  std::string prompt_text;
  double dev_accuracy = 0.0;
};

struct ApoResult {
  std::string best_prompt;
  double best_dev_accuracy = 0.0;
  bool aborted = false;  // model failure; trace holds the partial search
  std::vector<ApoTraceEntry> trace;
};

// Beam search over model-proposed system-prompt rewrites, scored zero-shot on
// a dev batch drawn from the train split only. Returns the best candidate
// ever seen, so the result never scores below the seed prompt.
ApoResult optimize(const std::string& seed_prompt, const Task& task, const Dataset& train,
                   ModelClient& model, const ApoConfig& config);

std::string apo_trace_to_jsonl(const std::vector<ApoTraceEntry>& trace);

}  // namespace icl
