#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "icl/prompt.hpp"

namespace icl {

struct ModelRequest {
  std::string model_name;
  std::string messages_json;  // chat-message array, as produced by bundle_to_chat_json
  double temperature = 0.0;   // fixed at zero throughout
  int max_tokens = 3;
};

ModelRequest make_request(const PromptBundle& bundle, const std::string& model_name);

// Stable digest over (messages, temperature, max_tokens, model_name) only.
std::string request_hash(const ModelRequest& request);

struct ModelResponse {
  std::string text;
  int attempts = 1;
  bool out_of_tokens = false;  // provider rejected the context as too long
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual ModelResponse complete(const ModelRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Deterministic offline stand-in: answers with the label of the exemplar
// whose input is closest in edit distance to the query (ties to the earliest
// exemplar), "0" when no exemplars are present. Emits only the answer token.
class MockClient : public ModelClient {
 public:
  ModelResponse complete(const ModelRequest& request) override;
  std::string name() const override { return "mock"; }
};

std::string mock_predict(const PromptBundle& bundle);

// Chat-completions HTTP client. Endpoint and key usually come from the
// ICL_ENDPOINT_URL / ICL_API_KEY environment variables.
std::unique_ptr<ModelClient> make_http_client(const std::string& endpoint_url,
                                              const std::string& api_key,
                                              const std::string& model_name);

inline constexpr int kMaxAttempts = 5;

// Content-addressed response cache plus bounded retry with exponential
// backoff around any inner client. Cache hits cost zero network attempts and
// replay the original response byte-identically.
class CachedClient : public ModelClient {
 public:
  CachedClient(std::shared_ptr<ModelClient> inner, std::filesystem::path cache_dir,
               int backoff_base_ms = 250);

  ModelResponse complete(const ModelRequest& request) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<ModelClient> inner_;
  std::filesystem::path cache_dir_;
  int backoff_base_ms_;
};

// One model call with provenance; the atomic unit of evaluation.
struct RunRecord {
  std::string run_id;
  std::string model;
  std::string task;
  std::string strategy;
  int shots = 0;
  double delta = 0.0;
  std::string instance_id;
  std::string request_hash;
  std::string raw_output;
  int attempts = 0;
  // outcome: "label" | "integer" | "parse_error" | "transport_error" | "out_of_tokens"
  std::string outcome;
  long long value = 0;       // parsed label or integer when outcome permits
  std::string error_kind;    // parse_error kind: empty | foreign_token | truncated
  bool correct = false;
};

std::string run_record_to_json(const RunRecord& record);
RunRecord run_record_from_json(const std::string& line);

}  // namespace icl
