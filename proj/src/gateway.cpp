#include "icl/gateway.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include "icl/errors.hpp"
#include "icl/fsio.hpp"
#include "icl/sha256.hpp"
#include "icl/text.hpp"
#include "httplib.h"
#include "json.hpp"

namespace icl {

namespace {

using nlohmann::json;

// Edit distance with a prefix cap; the mock only needs a ranking signal.
constexpr std::size_t kEditPrefixCap = 160;

std::size_t edit_distance(std::string_view a, std::string_view b) {
  a = a.substr(0, kEditPrefixCap);
  b = b.substr(0, kEditPrefixCap);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Last integer-looking token of an exemplar answer; handles both bare labels
// and trace answers ("So the answer is 1").
std::string last_integer_token(const std::string& text) {
  std::vector<std::string> tokens = split(text, ' ');
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    std::string tok(trim(*it));
    while (!tok.empty() && (tok.back() == '.' || tok.back() == '\n')) tok.pop_back();
    if (is_integer_token(tok)) return tok;
  }
  return "0";
}

std::string strip_answer_cue(std::string text) {
  while (!text.empty() && (text.back() == ':' || text.back() == ' ' || text.back() == '\n')) {
    text.pop_back();
  }
  return text;
}

}  // namespace

ModelRequest make_request(const PromptBundle& bundle, const std::string& model_name) {
  ModelRequest req;
  req.model_name = model_name;
  req.messages_json = bundle_to_chat_json(bundle);
  req.temperature = 0.0;
  req.max_tokens = bundle.max_answer_tokens;
  return req;
}

std::string request_hash(const ModelRequest& request) {
  char temp[40];
  std::snprintf(temp, sizeof(temp), "%.17g", request.temperature);
  Sha256 h;
  h.update(request.model_name);
  h.update("\x1f");
  h.update(temp);
  h.update("\x1f");
  h.update(std::to_string(request.max_tokens));
  h.update("\x1f");
  h.update(request.messages_json);
  auto digest = h.digest();
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (std::uint8_t b : digest) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 0xf]);
  }
  return out;
}

std::string mock_predict(const PromptBundle& bundle) {
  if (bundle.turns.empty()) return "0";
  std::string query = strip_answer_cue(bundle.query);
  std::size_t best = SIZE_MAX;
  std::string answer = "0";
  for (const auto& [user, assistant] : bundle.turns) {
    std::size_t d = edit_distance(query, strip_answer_cue(user));
    if (d < best) {
      best = d;
      answer = last_integer_token(assistant);
    }
  }
  return answer;
}

ModelResponse MockClient::complete(const ModelRequest& request) {
  // Reconstruct the bundle view from the wire messages.
  json messages = json::parse(request.messages_json);
  PromptBundle bundle;
  std::vector<std::string> users;
  std::vector<std::string> assistants;
  for (const json& m : messages) {
    std::string role = m.at("role").get<std::string>();
    std::string content = m.at("content").get<std::string>();
    if (role == "system") bundle.system = content;
    else if (role == "user") users.push_back(content);
    else assistants.push_back(content);
  }
  if (users.empty()) throw TransportError("mock: no user message");
  for (std::size_t i = 0; i + 1 < users.size() && i < assistants.size(); ++i) {
    bundle.turns.emplace_back(users[i], assistants[i]);
  }
  bundle.query = users.back();
  return {mock_predict(bundle), 1, false};
}

namespace {

class HttpClient : public ModelClient {
 public:
  HttpClient(std::string endpoint, std::string api_key, std::string model)
      : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {
    std::size_t scheme = endpoint_.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + endpoint_);
    std::size_t path = endpoint_.find('/', scheme + 3);
    base_ = path == std::string::npos ? endpoint_ : endpoint_.substr(0, path);
    path_ = path == std::string::npos ? "/v1/chat/completions" : endpoint_.substr(path);
  }

  ModelResponse complete(const ModelRequest& request) override {
    httplib::Client client(base_);
    client.set_connection_timeout(30);
    client.set_read_timeout(180);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    json body{{"model", request.model_name},
              {"messages", json::parse(request.messages_json)},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens}};
    auto result = client.Post(path_, headers, body.dump(), "application/json");
    if (!result) {
      throw TransportError("endpoint unreachable: " + httplib::to_string(result.error()));
    }
    if (result->status == 400 && result->body.find("context_length") != std::string::npos) {
      return {"", 1, true};
    }
    if (result->status != 200) {
      throw TransportError("endpoint returned status " + std::to_string(result->status));
    }
    json parsed = json::parse(result->body);
    return {parsed.at("choices").at(0).at("message").at("content").get<std::string>(), 1, false};
  }

  std::string name() const override { return model_; }

 private:
  std::string endpoint_;
  std::string api_key_;
  std::string model_;
  std::string base_;
  std::string path_;
};

}  // namespace

std::unique_ptr<ModelClient> make_http_client(const std::string& endpoint_url,
                                              const std::string& api_key,
                                              const std::string& model_name) {
  return std::make_unique<HttpClient>(endpoint_url, api_key, model_name);
}

CachedClient::CachedClient(std::shared_ptr<ModelClient> inner, std::filesystem::path cache_dir,
                           int backoff_base_ms)
    : inner_(std::move(inner)), cache_dir_(std::move(cache_dir)), backoff_base_ms_(backoff_base_ms) {}

ModelResponse CachedClient::complete(const ModelRequest& request) {
  const std::string key = request_hash(request);
  const std::filesystem::path path = cache_dir_ / key.substr(0, 2) / (key + ".json");

  if (std::filesystem::exists(path)) {
    json entry;
    try {
      entry = json::parse(read_file(path));
    } catch (const std::exception& e) {
      throw CacheIntegrityError("cache entry " + path.string() + " is unreadable: " + e.what());
    }
    if (entry.value("request_hash", "") != key) {
      throw CacheIntegrityError("cache entry " + path.string() + " does not match its key");
    }
    ModelResponse response;
    response.text = entry.at("text").get<std::string>();
    response.attempts = entry.at("attempts").get<int>();
    response.out_of_tokens = entry.at("out_of_tokens").get<bool>();
    return response;
  }

  ModelResponse response;
  std::string last_error;
  bool ok = false;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    try {
      response = inner_->complete(request);
      response.attempts = attempt;
      ok = true;
      break;
    } catch (const TransportError& e) {
      last_error = e.what();
      if (attempt < kMaxAttempts && backoff_base_ms_ > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff_base_ms_ << (attempt - 1)));
      }
    }
  }
  if (!ok) {
    throw TransportError("all " + std::to_string(kMaxAttempts) + " attempts failed; last: " +
                         last_error);
  }

  json entry{{"request_hash", key},
             {"model", request.model_name},
             {"text", response.text},
             {"attempts", response.attempts},
             {"out_of_tokens", response.out_of_tokens}};
  write_file_atomic(path, entry.dump() + "\n");
  return response;
}

std::string run_record_to_json(const RunRecord& r) {
  json j{{"run_id", r.run_id},     {"model", r.model},
         {"task", r.task},         {"strategy", r.strategy},
         {"shots", r.shots},       {"delta", r.delta},
         {"instance_id", r.instance_id}, {"request_hash", r.request_hash},
         {"raw_output", r.raw_output},   {"attempts", r.attempts},
         {"outcome", r.outcome},   {"value", r.value},
         {"error_kind", r.error_kind},   {"correct", r.correct}};
  return j.dump();
}

RunRecord run_record_from_json(const std::string& line) {
  json j = json::parse(line);
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.task = j.at("task").get<std::string>();
  r.strategy = j.at("strategy").get<std::string>();
  r.shots = j.at("shots").get<int>();
  r.delta = j.at("delta").get<double>();
  r.instance_id = j.at("instance_id").get<std::string>();
  r.request_hash = j.at("request_hash").get<std::string>();
  r.raw_output = j.at("raw_output").get<std::string>();
  r.attempts = j.at("attempts").get<int>();
  r.outcome = j.at("outcome").get<std::string>();
  r.value = j.at("value").get<long long>();
  r.error_kind = j.at("error_kind").get<std::string>();
  r.correct = j.at("correct").get<bool>();
  return r;
}

}  // namespace icl
