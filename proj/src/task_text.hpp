#pragma once

// Internal helpers shared between the task registry and the trace/prompt
// builders. Not part of the public surface.

#include <string>
#include <string_view>
#include <vector>

#include "icl/maze.hpp"
#include "icl/task.hpp"

namespace icl::detail {

// Naive streaming scan narrated by the Pattern Matching trace: on a mismatch
// the tally is cleared and the character consumed. It can miss occurrences
// shadowed by a partial match, so the generator rejects positives the scan
// would miss; it never reports a false positive.
bool pattern_scan_finds(std::string_view s);

// Rendered-input parsers used by oracles and trace builders.
struct StackInput {
  std::string initial;
  std::vector<StackOp> ops;
  std::vector<std::string> op_texts;
  std::string final_;
};
StackInput parse_stack_input(const std::string& input);

struct VmInput {
  std::vector<VmToken> ops;
  long long target = 0;
  bool has_target = false;
};
VmInput parse_vm_input(const std::string& input, bool expect_target);

struct HamiltonianInput {
  Digraph graph;
  std::vector<int> path;
};
HamiltonianInput parse_hamiltonian_input(const std::string& input);

struct MazeInput {
  MazeGrid maze;
  std::vector<Move> moves;
};
MazeInput parse_maze_input(const std::string& input, std::string_view maze_header,
                           std::string_view moves_header);

std::vector<std::string> tokenize_reversal(const std::string& input);

// Chain-of-thought builders, one per task. Each ends with the exact answer
// line ("So the answer is <label>", or the balance line for vm_sum).
std::string cot_parity(const std::string& input);
std::string cot_pattern(const std::string& input);
std::string cot_reversal(const std::string& input);
std::string cot_stack(const std::string& input);
std::string cot_hamiltonian(const std::string& input);
std::string cot_maze_solve(const std::string& input);
std::string cot_maze_complete(const std::string& input);
std::string cot_vm(const std::string& input, bool verify);

std::string description_prompt_for(TaskId id);
std::string direct_encoding_prompt_for(TaskId id);

}  // namespace icl::detail
