#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icl/automaton.hpp"
#include "icl/maze.hpp"
#include "icl/rng.hpp"

namespace icl {

enum class TaskId {
  parity,
  pattern_matching,
  reversal,
  stack,
  hamiltonian,
  maze_complete,
  maze_solve,
  vm_verify,
  vm_sum,
};

inline constexpr int kTaskCount = 9;

std::string_view task_name(TaskId id);
TaskId task_from_name(std::string_view name);  // throws ConfigError
const std::vector<TaskId>& all_task_ids();

// One labelled datapoint.
struct TaskInstance {
  std::string id;
  TaskId task = TaskId::parity;
  std::string input;
  long long gold = 0;
  double delta = 0.0;
  bool noisy = false;
  std::uint64_t seed = 0;
};

struct GeneratedInstance {
  std::string input;
  long long gold = 0;
};

// ---------------------------------------------------------------------------
// Structured oracles (the labelling function c per task).
// ---------------------------------------------------------------------------

int oracle_parity(std::string_view bits);
int oracle_pattern(std::string_view s);

inline constexpr std::string_view kPattern = "abcabb";

// Reversal tape as a token list including the single '#' delimiter.
int oracle_reversal(const std::vector<std::string>& tokens);
extern const std::vector<std::string> kReversalAlphabet;  // paper order, no '#'

enum class StackOp { push0, push1, pop, stop, empty_check };
inline constexpr std::size_t kStackCapacity = 16;  // 2x the max generated stack string
std::string_view stack_op_name(StackOp op);
StackOp stack_op_from_name(std::string_view name);
int oracle_stack(std::string_view s0, const std::vector<StackOp>& ops, std::string_view sf,
                 std::size_t capacity = kStackCapacity);

struct Digraph {
  int n = 0;
  std::vector<std::uint8_t> adj;  // row-major n*n, entry 1 = directed edge
  bool edge(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j] != 0; }
};
int oracle_hamiltonian(const Digraph& g, const std::vector<int>& path);

// Vending machine token: coins add `value`, purchases subtract the price.
struct VmToken {
  std::string text;
  long long signed_value = 0;
};
VmToken vm_token_from_text(std::string_view text);
inline constexpr int kPriceCoffee = 15;
inline constexpr int kPriceBiscuit = 20;
inline constexpr int kPriceSoda = 25;

long long vm_sum(long long b0, const std::vector<VmToken>& ops);
int oracle_vm_verify(long long b0, const std::vector<VmToken>& ops, long long bf);

// ---------------------------------------------------------------------------
// Task registry.
// ---------------------------------------------------------------------------

class Task {
 public:
  virtual ~Task() = default;

  virtual TaskId id() const = 0;
  std::string_view name() const { return task_name(id()); }
  virtual bool binary() const { return true; }

  // Base (delta = 0) generator automaton with designated shift entries.
  virtual const Automaton& base_automaton() const = 0;

  // Exact label of a rendered input. Throws MalformedInstanceError.
  virtual long long oracle(const std::string& input) const = 0;

  // One instance drawn from the shifted automaton. label_target is 0/1 for
  // binary tasks and ignored for vm_sum. May not hit the target on a given
  // draw; generate_instance() owns the retry loop.
  virtual GeneratedInstance generate(const Automaton& shifted, int label_target,
                                     Rng& rng) const = 0;

  // Deterministic step-by-step trace ending in the answer line.
  virtual std::string cot_trace(const std::string& input) const = 0;

  virtual std::string description_prompt() const = 0;
  virtual std::string direct_encoding_prompt() const = 0;

  // Tokens that the word-salad transform must keep verbatim.
  virtual std::vector<std::string> protected_literals() const = 0;

  // Token stream of a rendered input, used by the baseline tape encoder.
  virtual std::vector<std::string> tokenize(const std::string& input) const = 0;

  // Token -> integer code for the tape encoder; empty when the task is not
  // baselined (path-based and arithmetic tasks).
  virtual std::vector<std::pair<std::string, int>> symbol_table() const { return {}; }
};

const Task& get_task(TaskId id);

inline constexpr int kGenerationBudget = 10000;

// Samples from the task's automaton shifted by `delta` until the instance
// hits label_target (-1 = any). Throws GenerationStarvationError once the
// rejection budget runs out.
TaskInstance generate_instance(const Task& task, const Automaton& shifted, int label_target,
                               std::uint64_t seed);
TaskInstance generate_instance(TaskId task, double delta, int label_target, std::uint64_t seed);

}  // namespace icl
