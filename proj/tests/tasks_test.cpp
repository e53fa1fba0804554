#include "icl/task.hpp"

#include <gtest/gtest.h>

#include <iostream>

#include "icl/errors.hpp"
#include "icl/maze.hpp"
#include "icl/text.hpp"
#include "oracles.hpp"

namespace icl {
namespace {

const std::vector<std::string> kPrompt3Maze = {
    "#S#######",
    "#+++#   #",
    "# #+# ###",
    "# #+++# #",
    "# ###+# #",
    "# #?++# #",
    "# # ### #",
    "# # ++++E",
    "#########",
};

const char* kPrompt6Ops =
    "+10,+10,biscuit,+10,+5,coffee,+10,+10,biscuit,+10,+10,biscuit,+5,+10,+10,soda,+10";

long long trace_answer(const std::string& trace) {
  std::size_t pos = trace.find_last_of(' ');
  return std::stoll(trace.substr(pos + 1));
}

std::vector<Move> moves_of(std::initializer_list<const char*> names) {
  std::vector<Move> out;
  for (const char* n : names) out.push_back(move_from_name(n));
  return out;
}

// --------------------------------------------------------------------------
// Spec examples, one block per oracle.
// --------------------------------------------------------------------------

TEST(Oracles, Parity) {
  EXPECT_EQ(oracle_parity("0000"), 1);
  EXPECT_EQ(oracle_parity("0"), 0);
  EXPECT_EQ(oracle_parity(""), 1);
  EXPECT_THROW(oracle_parity("01x"), MalformedInstanceError);
}

TEST(Oracles, ParityAgreesWithDirectCount) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    std::size_t len = rng.index(30);
    for (std::size_t k = 0; k < len; ++k) s.push_back(rng.bernoulli(0.5) ? '1' : '0');
    EXPECT_EQ(oracle_parity(s), refs::count_zero_parity(s));
  }
}

TEST(Oracles, Pattern) {
  EXPECT_EQ(oracle_pattern("abcabbaa"), 1);
  EXPECT_EQ(oracle_pattern("aaaaaaaa"), 0);
  EXPECT_THROW(oracle_pattern("abcabbd"), MalformedInstanceError);
}

TEST(Oracles, PatternAgreesWithNaiveScan) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    std::size_t len = 1 + rng.index(40);
    const char* abc = "abc";
    for (std::size_t k = 0; k < len; ++k) s.push_back(abc[rng.index(3)]);
    if (rng.bernoulli(0.3) && len >= 6) {
      s.replace(rng.index(len - 5), 6, kPattern);
    }
    EXPECT_EQ(oracle_pattern(s), refs::naive_substring(s, std::string(kPattern)));
  }
}

TEST(Oracles, Reversal) {
  EXPECT_EQ(oracle_reversal({"gfx", "chtte", "#", "chtte", "gfx"}), 1);
  EXPECT_EQ(oracle_reversal({"gfx", "#", "chtte"}), 0);
  EXPECT_THROW(oracle_reversal({"gfx", "chtte"}), MalformedInstanceError);
  EXPECT_THROW(oracle_reversal({"#", "gfx", "#"}), MalformedInstanceError);
}

TEST(Oracles, ReversalAgreesWithReverseAndCompare) {
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> left, right;
    std::size_t nl = 1 + rng.index(8), nr = 1 + rng.index(8);
    if (rng.bernoulli(0.4)) nr = nl;
    for (std::size_t k = 0; k < nl; ++k) left.push_back(kReversalAlphabet[rng.index(5)]);
    if (rng.bernoulli(0.4)) {
      right.assign(left.rbegin(), left.rend());
      if (rng.bernoulli(0.5)) right[rng.index(right.size())] = kReversalAlphabet[rng.index(5)];
    } else {
      for (std::size_t k = 0; k < nr; ++k) right.push_back(kReversalAlphabet[rng.index(5)]);
    }
    std::vector<std::string> tape = left;
    tape.push_back("#");
    tape.insert(tape.end(), right.begin(), right.end());
    EXPECT_EQ(oracle_reversal(tape), refs::reverse_and_compare(left, right));
  }
}

TEST(Oracles, Stack) {
  EXPECT_EQ(oracle_stack("01", {StackOp::push1, StackOp::pop, StackOp::stop}, "01"), 1);
  EXPECT_EQ(oracle_stack("", {StackOp::pop}, ""), 0);
  // Ops after 'stop' never execute.
  EXPECT_EQ(oracle_stack("1", {StackOp::stop, StackOp::pop, StackOp::pop}, "1"), 1);
  // 'empty' asserts an empty stack.
  EXPECT_EQ(oracle_stack("", {StackOp::empty_check, StackOp::push1}, "1"), 1);
  EXPECT_EQ(oracle_stack("0", {StackOp::empty_check}, "0"), 0);
  // Capacity cap.
  std::vector<StackOp> pushes(kStackCapacity + 1, StackOp::push0);
  EXPECT_EQ(oracle_stack("", pushes, std::string(kStackCapacity + 1, '0')), 0);
}

TEST(Oracles, StackAgreesWithReferenceInterpreter) {
  Rng rng(14);
  const StackOp kOps[] = {StackOp::push0, StackOp::push1, StackOp::pop, StackOp::stop,
                          StackOp::empty_check};
  for (int i = 0; i < 1000; ++i) {
    std::string s0, sf;
    for (std::size_t k = rng.index(5); k > 0; --k) s0.push_back(rng.bernoulli(0.5) ? '1' : '0');
    for (std::size_t k = rng.index(5); k > 0; --k) sf.push_back(rng.bernoulli(0.5) ? '1' : '0');
    std::vector<StackOp> ops;
    std::vector<std::string> op_names;
    for (std::size_t k = 1 + rng.index(10); k > 0; --k) {
      StackOp op = kOps[rng.index(5)];
      ops.push_back(op);
      op_names.emplace_back(stack_op_name(op));
    }
    EXPECT_EQ(oracle_stack(s0, ops, sf), refs::reference_stack(s0, op_names, sf, kStackCapacity));
  }
}

TEST(Oracles, Hamiltonian) {
  Digraph complete2{2, {0, 1, 1, 0}};
  EXPECT_EQ(oracle_hamiltonian(complete2, {0, 1}), 1);
  EXPECT_EQ(oracle_hamiltonian(complete2, {0, 0}), 0);
  EXPECT_THROW(oracle_hamiltonian(complete2, {0, 2}), MalformedInstanceError);
}

TEST(Oracles, HamiltonianAgreesWithPermutationCheck) {
  Rng rng(15);
  for (int i = 0; i < 400; ++i) {
    int n = 2 + static_cast<int>(rng.index(7));  // n <= 8
    Digraph g;
    g.n = n;
    g.adj.assign(static_cast<std::size_t>(n) * n, 0);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (r != c && rng.bernoulli(0.5)) g.adj[static_cast<std::size_t>(r) * n + c] = 1;
      }
    }
    std::vector<int> path;
    if (rng.bernoulli(0.5)) {
      path.resize(n);
      std::iota(path.begin(), path.end(), 0);
      rng.shuffle(path);
      if (rng.bernoulli(0.5)) {
        for (int k = 0; k + 1 < n; ++k) g.adj[static_cast<std::size_t>(path[k]) * n + path[k + 1]] = 1;
      }
    } else {
      for (std::size_t k = 1 + rng.index(n + 1); k > 0; --k) {
        path.push_back(static_cast<int>(rng.index(n)));
      }
    }
    EXPECT_EQ(oracle_hamiltonian(g, path), refs::permutation_hamiltonian(n, g.adj, path));
  }
}

TEST(Oracles, MazeSolve) {
  MazeGrid one_step = parse_maze({"###", "SE#", "###"});
  EXPECT_EQ(oracle_maze_solve(one_step, moves_of({"right"})), 1);
  EXPECT_EQ(oracle_maze_solve(one_step, moves_of({"up"})), 0);
}

TEST(Oracles, MazeComplete) {
  MazeGrid maze = parse_maze(kPrompt3Maze);
  EXPECT_EQ(oracle_maze_complete(maze, moves_of({"down", "down", "right"})), 1);
  EXPECT_EQ(oracle_maze_complete(maze, moves_of({"up"})), 0);
  EXPECT_EQ(oracle_maze_complete(maze, moves_of({"down", "down", "left"})), 0);
  MazeGrid no_gap = parse_maze({"###", "SE#", "###"});
  EXPECT_THROW(oracle_maze_complete(no_gap, {}), MalformedInstanceError);
}

TEST(Oracles, VendingMachine) {
  std::vector<VmToken> exact{vm_token_from_text("+20"), vm_token_from_text("biscuit")};
  EXPECT_EQ(vm_sum(0, exact), 0);
  EXPECT_EQ(oracle_vm_verify(0, exact, 0), 1);
  EXPECT_EQ(oracle_vm_verify(0, exact, 5), 0);
  EXPECT_EQ(vm_sum(0, {}), 0);
  EXPECT_EQ(vm_sum(7, {}), 7);
  EXPECT_THROW(vm_token_from_text("tea"), MalformedInstanceError);
}

TEST(Oracles, Prompt6SequenceReachesTen) {
  std::vector<VmToken> ops;
  for (const std::string& tok : split(kPrompt6Ops, ',')) ops.push_back(vm_token_from_text(tok));
  EXPECT_EQ(vm_sum(0, ops), 10);
  std::vector<std::string> names = split(kPrompt6Ops, ',');
  EXPECT_EQ(refs::fold_vm(0, names), 10);
}

// --------------------------------------------------------------------------
// Generators: postconditions and oracle agreement on generated instances.
// --------------------------------------------------------------------------

TEST(Generators, LabelTargetsAreHonoured) {
  for (TaskId id : all_task_ids()) {
    const Task& task = get_task(id);
    for (double d : {0.0, 0.85}) {
      Automaton shifted = shift(task.base_automaton(), d);
      for (int i = 0; i < 20; ++i) {
        int target = task.binary() ? i % 2 : -1;
        TaskInstance inst = generate_instance(task, shifted, target, 1000 + i);
        if (task.binary()) {
          EXPECT_EQ(inst.gold, target) << task.name();
        }
        EXPECT_EQ(task.oracle(inst.input), inst.gold) << task.name();
        EXPECT_EQ(inst.delta, d);
      }
    }
  }
}

TEST(Generators, DeterministicGivenSeed) {
  for (TaskId id : all_task_ids()) {
    const Task& task = get_task(id);
    Automaton shifted = shift(task.base_automaton(), 0.45);
    for (int i = 0; i < 5; ++i) {
      TaskInstance a = generate_instance(task, shifted, task.binary() ? i % 2 : -1, 77 + i);
      TaskInstance b = generate_instance(task, shifted, task.binary() ? i % 2 : -1, 77 + i);
      EXPECT_EQ(a.input, b.input);
      EXPECT_EQ(a.gold, b.gold);
    }
  }
}

TEST(Generators, PatternInstancesAreLongEnough) {
  const Task& task = get_task(TaskId::pattern_matching);
  Automaton shifted = shift(task.base_automaton(), 0.0);
  for (int i = 0; i < 50; ++i) {
    TaskInstance inst = generate_instance(task, shifted, i % 2, 5000 + i);
    EXPECT_GE(inst.input.size(), 8u);
  }
}

TEST(Generators, GeneratedMazesSatisfyGridInvariants) {
  for (TaskId id : {TaskId::maze_solve, TaskId::maze_complete}) {
    const Task& task = get_task(id);
    for (double d : {0.0, 0.85}) {
      Automaton shifted = shift(task.base_automaton(), d);
      for (int i = 0; i < 15; ++i) {
        TaskInstance inst = generate_instance(task, shifted, i % 2, 31 * i + 5);
        std::vector<std::string> lines = split(inst.input, '\n');
        std::vector<std::string> grid(lines.begin() + 1,
                                      lines.begin() + static_cast<long>(lines.size()) - 2);
        EXPECT_NO_THROW(parse_maze(grid)) << inst.input;
      }
    }
  }
}

// Independent re-labelling of generated instances from their rendered text.
TEST(Generators, BruteForceAgreementOnRenderedInstances) {
  Rng seeds(101);
  for (TaskId id : all_task_ids()) {
    const Task& task = get_task(id);
    for (double d : {0.0, 0.45, 0.85}) {
      Automaton shifted = shift(task.base_automaton(), d);
      for (int i = 0; i < 40; ++i) {
        int target = task.binary() ? i % 2 : -1;
        TaskInstance inst = generate_instance(task, shifted, target, seeds.next());
        long long expected = -777;
        switch (id) {
          case TaskId::parity:
            expected = refs::count_zero_parity(inst.input);
            break;
          case TaskId::pattern_matching:
            expected = refs::naive_substring(inst.input, std::string(kPattern));
            break;
          case TaskId::reversal: {
            std::vector<std::string> left, right;
            bool after = false;
            std::size_t pos = 0;
            while (pos < inst.input.size()) {
              if (inst.input[pos] == '#') {
                after = true;
                ++pos;
                continue;
              }
              bool matched = false;
              for (const std::string& tok : kReversalAlphabet) {
                if (inst.input.compare(pos, tok.size(), tok) == 0) {
                  (after ? right : left).push_back(tok);
                  pos += tok.size();
                  matched = true;
                  break;
                }
              }
              ASSERT_TRUE(matched);
            }
            expected = refs::reverse_and_compare(left, right);
            break;
          }
          case TaskId::stack: {
            std::vector<std::string> parts = split(inst.input, '|');
            std::vector<std::string> ops =
                parts[1].empty() ? std::vector<std::string>{} : split(parts[1], ',');
            expected = refs::reference_stack(parts[0], ops, parts[2], kStackCapacity);
            break;
          }
          case TaskId::hamiltonian: {
            std::vector<std::string> lines = split(inst.input, '\n');
            std::vector<std::uint8_t> adj;
            std::size_t li = 1;
            while (lines[li] != "Path:") {
              for (char c : lines[li]) adj.push_back(c == '1');
              ++li;
            }
            int n = static_cast<int>(li - 1);
            std::vector<int> path;
            for (const std::string& tok : split(lines[li + 1], ',')) path.push_back(std::stoi(tok));
            // Too large for permutation enumeration; check conditions directly.
            bool ok = static_cast<int>(path.size()) == n;
            std::set<int> seen;
            for (int v : path) ok = ok && seen.insert(v).second;
            for (std::size_t k = 0; ok && k + 1 < path.size(); ++k) {
              ok = adj[static_cast<std::size_t>(path[k]) * n + path[k + 1]] != 0;
            }
            expected = ok ? 1 : 0;
            break;
          }
          case TaskId::maze_solve: {
            std::vector<std::string> lines = split(inst.input, '\n');
            std::vector<std::string> grid(lines.begin() + 1, lines.end() - 2);
            expected = refs::simulate_maze_walk(grid, split(lines.back(), ','));
            break;
          }
          case TaskId::maze_complete: {
            std::vector<std::string> lines = split(inst.input, '\n');
            std::vector<std::string> grid(lines.begin() + 1, lines.end() - 2);
            expected = refs::bfs_maze_complete(grid, split(lines.back(), ','));
            break;
          }
          case TaskId::vm_verify: {
            std::vector<std::string> parts = split(inst.input, '|');
            expected = refs::fold_vm(0, split(parts[0], ',')) == std::stoll(parts[1]) ? 1 : 0;
            break;
          }
          case TaskId::vm_sum:
            expected = refs::fold_vm(0, split(inst.input, ','));
            break;
        }
        ASSERT_EQ(inst.gold, expected) << task.name() << "\n" << inst.input;
      }
    }
  }
}

// --------------------------------------------------------------------------
// Chain-of-thought traces.
// --------------------------------------------------------------------------

TEST(Traces, FinalAnswerMatchesOracle) {
  Rng seeds(303);
  for (TaskId id : all_task_ids()) {
    const Task& task = get_task(id);
    Automaton shifted = shift(task.base_automaton(), 0.0);
    for (int i = 0; i < 200; ++i) {
      int target = task.binary() ? i % 2 : -1;
      TaskInstance inst = generate_instance(task, shifted, target, seeds.next());
      std::string trace = task.cot_trace(inst.input);
      ASSERT_EQ(trace_answer(trace), inst.gold) << task.name() << "\n" << inst.input << "\n" << trace;
    }
  }
}

TEST(Traces, ParityEmptyInput) {
  std::string trace = get_task(TaskId::parity).cot_trace("");
  EXPECT_EQ(trace_answer(trace), 1);
}

TEST(Traces, PatternWordingMatchesTemplate) {
  std::string trace = get_task(TaskId::pattern_matching).cot_trace("abaababb");
  std::vector<std::string> lines = split(trace, '\n');
  EXPECT_EQ(lines[0],
            "Let's think and solve this step-by-step. We read the string character-by-character "
            "and keep a tally:");
  EXPECT_EQ(lines[1], "We read \"a\". It is a match. Our tally is: a. Now we move to the next character.");
  EXPECT_EQ(lines[2], "We read \"b\". It is a match. Our tally is: ab. Now we move to the next character.");
  EXPECT_EQ(lines[3],
            "We read \"a\". It is not a match. We clear our tally. Now we move to the next character.");
  EXPECT_EQ(lines[4], "We read \"a\". It is a match. Our tally is: a. Now we move to the next character.");
  EXPECT_EQ(lines[5], "We read \"b\". It is a match. Our tally is: ab. Now we move to the next character.");
  EXPECT_EQ(lines[6],
            "We read \"a\". It is not a match. We clear our tally. Now we move to the next character.");
  EXPECT_EQ(lines[7], "We read \"b\". It is not a match. Now we move to the next character.");
}

TEST(Traces, VendingMachineMatchesPrompt6) {
  std::string trace = get_task(TaskId::vm_sum).cot_trace(kPrompt6Ops);
  EXPECT_NE(trace.find("We start with a balance of 0."), std::string::npos);
  EXPECT_NE(trace.find("We read \"+10\", so we add 10 to our current balance and we now have 10."),
            std::string::npos);
  EXPECT_NE(trace.find("We read \"biscuit\", so we return a biscuit and substract 20 from our "
                       "balance and now we have 0."),
            std::string::npos);
  EXPECT_NE(trace.find("Our final balance is 10. The answer is then 10"), std::string::npos);
  EXPECT_EQ(trace_answer(trace), 10);
}

TEST(Traces, MazeCompleteMatchesPrompt3) {
  std::string input = "Solved maze:\n" + join(kPrompt3Maze, "\n") + "\nMissing moves:\ndown,down,right";
  std::string trace = get_task(TaskId::maze_complete).cot_trace(input);
  EXPECT_NE(trace.find("We begin at line 0."), std::string::npos);
  EXPECT_NE(trace.find("This line contains \"?\"."), std::string::npos);
  EXPECT_NE(trace.find("The \"?\" character is at position 3 in the line. We will now perform a "
                       "search on the neighbours to find the path."),
            std::string::npos);
  EXPECT_NE(trace.find("This has neighbours: ['down'] at [(6, 3)]."), std::string::npos);
  EXPECT_NE(trace.find("We select the neighbour at (6, 3) (\"down\") and add it to our buffer. "
                       "Our buffer is: ['down']."),
            std::string::npos);
  EXPECT_NE(trace.find("This has a \"+\" neighbour at (7, 4) (\"right\"), so it connects to the path."),
            std::string::npos);
  EXPECT_NE(trace.find("We add it to our buffer. Our buffer is now ['down', 'down', 'right']."),
            std::string::npos);
  EXPECT_NE(trace.find("We are done!"), std::string::npos);
  EXPECT_NE(trace.find("Our final set of positions is down,down,right and the solution says "
                       "down,down,right."),
            std::string::npos);
  EXPECT_EQ(trace_answer(trace), 1);
}

// --------------------------------------------------------------------------
// Length scaling of the generator automata.
// --------------------------------------------------------------------------

TEST(LengthScaling, ExpectedLengthsFollowTable3Direction) {
  const double deltas[] = {0.0, 0.2, 0.45, 0.65, 0.85};
  for (TaskId id : {TaskId::pattern_matching, TaskId::reversal, TaskId::stack}) {
    const Automaton& base = get_task(id).base_automaton();
    double prev = -1;
    for (double d : deltas) {
      double len = refs::expected_walk_length(shift(base, d));
      EXPECT_GT(len, prev) << task_name(id) << " delta " << d;
      prev = len;
    }
  }
  const Automaton& parity = get_task(TaskId::parity).base_automaton();
  double base_len = refs::expected_walk_length(parity);
  for (double d : deltas) {
    double len = refs::expected_walk_length(shift(parity, d));
    EXPECT_NEAR(len, base_len, 0.2 * base_len);
  }
}

TEST(LengthScaling, PrintCalibration) {
  for (TaskId id : all_task_ids()) {
    const Automaton& base = get_task(id).base_automaton();
    std::cout << task_name(id) << ":";
    for (double d : {0.0, 0.2, 0.45, 0.65, 0.85}) {
      std::cout << " " << refs::expected_walk_length(shift(base, d));
    }
    std::cout << "\n";
  }
  SUCCEED();
}

}  // namespace
}  // namespace icl
