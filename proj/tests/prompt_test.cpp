#include "icl/prompt.hpp"

#include <gtest/gtest.h>

#include "icl/errors.hpp"
#include "icl/text.hpp"
#include "json.hpp"

namespace icl {
namespace {

TaskInstance make_instance(TaskId task, const std::string& input, long long gold) {
  TaskInstance inst;
  inst.id = "t";
  inst.task = task;
  inst.input = input;
  inst.gold = gold;
  return inst;
}

StrategySpec strategy(StrategyKind kind, int shots) {
  StrategySpec s;
  s.kind = kind;
  s.shots = shots;
  if (kind == StrategyKind::word_salad || kind == StrategyKind::sot) s.salad_seed = 77;
  return s;
}

TEST(Strategies, InvariantsAreEnforced) {
  EXPECT_THROW(strategy(StrategyKind::modus_ponens, 0).validate(), ConfigError);
  EXPECT_THROW(strategy(StrategyKind::cot, 2).validate(), ConfigError);
  EXPECT_THROW(strategy(StrategyKind::sot, 2).validate(), ConfigError);
  EXPECT_NO_THROW(strategy(StrategyKind::cot, 0).validate());
  EXPECT_NO_THROW(strategy(StrategyKind::modus_ponens, 2).validate());
  StrategySpec bad = strategy(StrategyKind::description, 0);
  bad.salad_seed = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  StrategySpec missing;
  missing.kind = StrategyKind::word_salad;
  EXPECT_THROW(missing.validate(), ConfigError);
}

TEST(Render, ModusPonensTemplate) {
  const Task& task = get_task(TaskId::parity);
  std::vector<TaskInstance> exemplars{make_instance(TaskId::parity, "0011", 1),
                                      make_instance(TaskId::parity, "01", 0)};
  PromptBundle bundle =
      render(strategy(StrategyKind::modus_ponens, 2), task, exemplars,
             make_instance(TaskId::parity, "000", 0));
  EXPECT_TRUE(bundle.system.empty());
  ASSERT_EQ(bundle.turns.size(), 2u);
  EXPECT_EQ(bundle.turns[0].first, "0011:");
  EXPECT_EQ(bundle.turns[0].second, "1");
  EXPECT_EQ(bundle.query, "000:");
  EXPECT_EQ(bundle.max_answer_tokens, 3);
}

TEST(Render, ZeroShotDescriptionCarriesTemplateAndFormatLine) {
  const Task& task = get_task(TaskId::parity);
  PromptBundle bundle = render(strategy(StrategyKind::description, 0), task, {},
                               make_instance(TaskId::parity, "000", 0));
  EXPECT_NE(bundle.system.find("This task is called PARITY. The strings in PARITY are generated "
                               "from a probabilistic automaton."),
            std::string::npos);
  EXPECT_NE(bundle.system.find("Give your answer as a single integer, and your reasoning in a new "
                               "line. For example:"),
            std::string::npos);
  EXPECT_TRUE(bundle.system.ends_with("Data:"));
  EXPECT_TRUE(bundle.turns.empty());
}

TEST(Render, CotExemplarStartsWithThinkLine) {
  const Task& task = get_task(TaskId::pattern_matching);
  std::vector<TaskInstance> exemplars{make_instance(TaskId::pattern_matching, "abcabbaa", 1)};
  PromptBundle bundle = render(strategy(StrategyKind::cot, 1), task, exemplars,
                               make_instance(TaskId::pattern_matching, "aaaaaaaa", 0));
  ASSERT_EQ(bundle.turns.size(), 1u);
  EXPECT_TRUE(bundle.turns[0].second.starts_with("Let's think and solve this step-by-step"));
  EXPECT_EQ(bundle.max_answer_tokens, 1024);
}

TEST(Render, DirectEncodingEmbedsAlphabetWithoutWeights) {
  const Task& task = get_task(TaskId::reversal);
  PromptBundle bundle = render(strategy(StrategyKind::direct_encoding, 0), task, {},
                               make_instance(TaskId::reversal, "gfx#gfx", 1));
  EXPECT_NE(bundle.system.find("Here's the code:"), std::string::npos);
  EXPECT_NE(bundle.system.find("ALPHABET = [\"gfx\", \"chtte\", \"%\", \"ltintprk\","),
            std::string::npos);
  EXPECT_NE(bundle.system.find("MIN_LEN = 5"), std::string::npos);
  EXPECT_NE(bundle.system.find("weights P[state]"), std::string::npos);
  EXPECT_EQ(bundle.system.find("0.92"), std::string::npos);  // weights elided
}

TEST(Render, QueryTextIsStrategyInvariant) {
  const Task& task = get_task(TaskId::parity);
  TaskInstance query = make_instance(TaskId::parity, "0101", 0);
  std::vector<TaskInstance> exemplars{make_instance(TaskId::parity, "0011", 1),
                                      make_instance(TaskId::parity, "01", 0),
                                      make_instance(TaskId::parity, "11", 1),
                                      make_instance(TaskId::parity, "0", 0),
                                      make_instance(TaskId::parity, "00", 1)};
  std::string query_text;
  for (StrategyKind kind : {StrategyKind::modus_ponens, StrategyKind::description,
                            StrategyKind::direct_encoding, StrategyKind::word_salad,
                            StrategyKind::cot, StrategyKind::sot}) {
    PromptBundle bundle = render(strategy(kind, 5), task, exemplars, query);
    EXPECT_EQ(bundle.turns.size(), 5u);
    if (query_text.empty()) query_text = bundle.query;
    EXPECT_EQ(bundle.query, query_text) << strategy_name(kind);
  }
}

TEST(Salad, EmptyAndPreservation) {
  EXPECT_EQ(word_salad_transform("", salad_vocabulary(), 3), "");
  SaladOptions options;
  options.protected_literals = {"abcabb"};
  options.preserve_trailing_lines = 0;
  std::string out = word_salad_transform("the pattern abcabb is 1", salad_vocabulary(), 3, options);
  std::vector<std::string> tokens = split(out, ' ');
  ASSERT_EQ(tokens.size(), 5u);
  EXPECT_NE(tokens[0], "the");
  EXPECT_NE(tokens[1], "pattern");
  EXPECT_EQ(tokens[2], "abcabb");
  EXPECT_NE(tokens[3], "is");
  EXPECT_EQ(tokens[4], "1");
}

TEST(Salad, TokenCountPreserved) {
  const std::string text = get_task(TaskId::vm_sum).description_prompt();
  std::string salted = word_salad_transform(text, salad_vocabulary(), 11);
  EXPECT_EQ(split(text, '\n').size(), split(salted, '\n').size());
  std::vector<std::string> a = split(text, ' ');
  std::vector<std::string> b = split(salted, ' ');
  EXPECT_EQ(a.size(), b.size());
  // Applying the transform again keeps the token count.
  std::vector<std::string> c = split(word_salad_transform(salted, salad_vocabulary(), 11), ' ');
  EXPECT_EQ(b.size(), c.size());
}

TEST(Salad, FinalInstructionLineSurvives) {
  const Task& task = get_task(TaskId::parity);
  std::string salted = word_salad_transform(task.description_prompt(), salad_vocabulary(), 5);
  EXPECT_TRUE(salted.ends_with("Given the data below, determine what is the most likely label for "
                               "the given string and output ONLY the label.\nData:"));
  // The body is randomised.
  EXPECT_EQ(salted.find("probabilistic automaton"), std::string::npos);
}

TEST(Sot, TracePreservesQuantitiesAndAnswer) {
  const Task& task = get_task(TaskId::vm_sum);
  std::string ops = "+10,+10,biscuit,+5,soda";  // ends at -20? balance: 10,20,0,5,-20
  TaskInstance exemplar = make_instance(TaskId::vm_sum, ops, vm_sum(0, {}));
  exemplar.gold = get_task(TaskId::vm_sum).oracle(ops);
  PromptBundle bundle = render(strategy(StrategyKind::sot, 1), task, {exemplar},
                               make_instance(TaskId::vm_sum, "+5", 5));
  const std::string& trace = task.cot_trace(ops);
  const std::string& salted = bundle.turns[0].second;
  // Same number of tokens line by line; numerals identical in place.
  std::vector<std::string> orig_lines = split(trace, '\n');
  std::vector<std::string> salted_lines = split(salted, '\n');
  ASSERT_EQ(orig_lines.size(), salted_lines.size());
  EXPECT_EQ(orig_lines.front(), salted_lines.front());
  EXPECT_EQ(orig_lines.back(), salted_lines.back());  // answer line intact
  for (std::size_t i = 0; i < orig_lines.size(); ++i) {
    std::vector<std::string> ot = split(orig_lines[i], ' ');
    std::vector<std::string> st = split(salted_lines[i], ' ');
    ASSERT_EQ(ot.size(), st.size());
    for (std::size_t k = 0; k < ot.size(); ++k) {
      std::string core(trim(ot[k]));
      while (!core.empty() && (core.back() == '.' || core.back() == ',')) core.pop_back();
      while (!core.empty() && (core.front() == '"')) core.erase(core.begin());
      while (!core.empty() && (core.back() == '"')) core.pop_back();
      if (is_integer_token(core)) {
        EXPECT_EQ(ot[k], st[k]) << "numeral moved in line " << i;
      }
    }
  }
}

TEST(Sot, AnswerLabelIsFinalToken) {
  const Task& task = get_task(TaskId::parity);
  TaskInstance exemplar = make_instance(TaskId::parity, "0101", 1);
  PromptBundle bundle = render(strategy(StrategyKind::sot, 1), task, {exemplar},
                               make_instance(TaskId::parity, "00", 1));
  const std::string& salted = bundle.turns[0].second;
  EXPECT_TRUE(salted.ends_with("So the answer is 1"));
}

TEST(Render, ChatJsonShape) {
  const Task& task = get_task(TaskId::parity);
  std::vector<TaskInstance> exemplars{make_instance(TaskId::parity, "0011", 1),
                                      make_instance(TaskId::parity, "01", 0)};
  PromptBundle bundle = render(strategy(StrategyKind::description, 2), task, exemplars,
                               make_instance(TaskId::parity, "000", 0));
  nlohmann::json messages = nlohmann::json::parse(bundle_to_chat_json(bundle));
  ASSERT_EQ(messages.size(), 6u);  // system + 2x(user,assistant) + query
  EXPECT_EQ(messages[0]["role"], "system");
  EXPECT_EQ(messages[5]["role"], "user");

  PromptBundle mp = render(strategy(StrategyKind::modus_ponens, 2), task, exemplars,
                           make_instance(TaskId::parity, "000", 0));
  nlohmann::json mp_messages = nlohmann::json::parse(bundle_to_chat_json(mp));
  EXPECT_EQ(mp_messages.size(), 5u);  // no system message
  EXPECT_EQ(mp_messages[0]["role"], "user");
}

}  // namespace
}  // namespace icl
