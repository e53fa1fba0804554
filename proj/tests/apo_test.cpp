#include "icl/apo.hpp"

#include <gtest/gtest.h>

#include <map>

#include "icl/errors.hpp"
#include "json.hpp"

namespace icl {
namespace {

Dataset tiny_train(int size) {
  SplitSpec spec;
  spec.task = TaskId::parity;
  spec.role = SplitRole::train;
  spec.size = size;
  spec.eval_budget = size;
  spec.noise_rate = 0.0;
  spec.seed = 5;
  return build_split(spec);
}

// Scripted stand-in that answers dev queries correctly only when the system
// prompt carries the magic marker, and proposes one such rewrite. It also
// asserts dev/test hygiene: every scored input must come from the train split.
class ScriptedClient : public ModelClient {
 public:
  explicit ScriptedClient(const Dataset& train) {
    for (const TaskInstance& inst : train.instances) gold_[inst.input + ":"] = inst.gold;
  }

  ModelResponse complete(const ModelRequest& request) override {
    nlohmann::json messages = nlohmann::json::parse(request.messages_json);
    std::string system, last_user;
    for (const auto& m : messages) {
      if (m.at("role") == "system") system = m.at("content");
      if (m.at("role") == "user") last_user = m.at("content");
    }
    if (last_user.find("Write a short critique") != std::string::npos) {
      return {"The prompt never explains the labels.", 1, false};
    }
    if (last_user.find("improved system prompts") != std::string::npos) {
      return {"Here are two options:\n<PROMPT>magic: count the zeros and answer 1 when even"
              "</PROMPT>\n<PROMPT>just answer confidently</PROMPT>",
              1, false};
    }
    auto it = gold_.find(last_user);
    if (it == gold_.end()) {
      scored_non_train = true;
      return {"0", 1, false};
    }
    bool correct = system.find("magic") != std::string::npos;
    long long answer = correct ? it->second : 1 - it->second;
    return {std::to_string(answer), 1, false};
  }

  std::string name() const override { return "scripted"; }

  bool scored_non_train = false;

 private:
  std::map<std::string, long long> gold_;
};

ApoConfig small_config(int depth) {
  ApoConfig config;
  config.beam_width = 2;
  config.depth = depth;
  config.batch_size = 16;
  config.dev_fraction = 0.5;
  config.rewrites_per_candidate = 2;
  config.seed = 9;
  return config;
}

TEST(Apo, DepthZeroReturnsSeedPrompt) {
  Dataset train = tiny_train(24);
  ScriptedClient client(train);
  ApoResult result = optimize("seed prompt", get_task(TaskId::parity), train, client,
                              small_config(0));
  EXPECT_EQ(result.best_prompt, "seed prompt");
  ASSERT_EQ(result.trace.size(), 1u);
  EXPECT_EQ(result.trace[0].round, 0);
  EXPECT_FALSE(client.scored_non_train);
}

TEST(Apo, FindsTheBetterRewriteAndTraceIsComplete) {
  Dataset train = tiny_train(24);
  ScriptedClient client(train);
  ApoResult result =
      optimize("seed prompt", get_task(TaskId::parity), train, client, small_config(3));
  EXPECT_NE(result.best_prompt.find("magic"), std::string::npos);
  EXPECT_EQ(result.best_dev_accuracy, 100.0);
  EXPECT_FALSE(client.scored_non_train);
  // Best-ever score is non-decreasing over rounds.
  double best = -1.0;
  int last_round = -1;
  std::map<int, double> round_best;
  for (const ApoTraceEntry& e : result.trace) {
    round_best[e.round] = std::max(round_best.count(e.round) ? round_best[e.round] : -1.0,
                                   e.dev_accuracy);
    EXPECT_GE(e.round, last_round);  // rounds appear in order
    last_round = std::max(last_round, e.round);
    if (e.round > 0) EXPECT_GE(e.parent_id, 0);  // parent edges recorded
  }
  double running = -1.0;
  for (const auto& [round, score] : round_best) {
    running = std::max(running, score);
    EXPECT_GE(running, best);
    best = running;
  }
}

TEST(Apo, DeterministicWithSameSeed) {
  Dataset train = tiny_train(24);
  ScriptedClient a(train), b(train);
  ApoResult ra = optimize("seed", get_task(TaskId::parity), train, a, small_config(2));
  ApoResult rb = optimize("seed", get_task(TaskId::parity), train, b, small_config(2));
  EXPECT_EQ(ra.best_prompt, rb.best_prompt);
  EXPECT_EQ(apo_trace_to_jsonl(ra.trace), apo_trace_to_jsonl(rb.trace));
}

TEST(Apo, MockModelIsDeterministicToo) {
  Dataset train = tiny_train(24);
  MockClient mock_a, mock_b;
  ApoResult ra = optimize("seed", get_task(TaskId::parity), train, mock_a, small_config(2));
  ApoResult rb = optimize("seed", get_task(TaskId::parity), train, mock_b, small_config(2));
  EXPECT_EQ(ra.best_prompt, rb.best_prompt);
  EXPECT_EQ(apo_trace_to_jsonl(ra.trace), apo_trace_to_jsonl(rb.trace));
}

class DeadClient : public ModelClient {
 public:
  ModelResponse complete(const ModelRequest&) override { throw TransportError("down"); }
  std::string name() const override { return "dead"; }
};

TEST(Apo, ModelFailureAbortsWithPartialTrace) {
  Dataset train = tiny_train(24);
  DeadClient client;
  ApoResult result = optimize("seed", get_task(TaskId::parity), train, client, small_config(2));
  EXPECT_TRUE(result.aborted);
}

TEST(Apo, EmptyDevSetIsRejected) {
  Dataset train = tiny_train(24);
  ScriptedClient client(train);
  ApoConfig config = small_config(1);
  config.dev_fraction = 0.001;  // rounds down to zero instances
  EXPECT_THROW(optimize("seed", get_task(TaskId::parity), train, client, config), ConfigError);
}

}  // namespace
}  // namespace icl
