#include <sstream>

#include "icl/errors.hpp"
#include "icl/text.hpp"
#include "task_text.hpp"

namespace icl::detail {

namespace {

constexpr std::string_view kThink = "Let's think and solve this step-by-step.";

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

std::string move_list(const std::vector<Move>& moves, std::size_t count) {
  std::string out = "[";
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) out += ", ";
    out += "'" + std::string(move_name(moves[i])) + "'";
  }
  return out + "]";
}

std::string cell_text(Cell c) {
  return "(" + std::to_string(c.first) + ", " + std::to_string(c.second) + ")";
}

std::string moves_csv(const std::vector<Move>& moves) {
  std::vector<std::string> names;
  names.reserve(moves.size());
  for (Move m : moves) names.emplace_back(move_name(m));
  return join(names, ",");
}

}  // namespace

bool pattern_scan_finds(std::string_view s) {
  std::size_t tally = 0;
  bool found = false;
  for (char c : s) {
    if (c == kPattern[tally]) {
      if (++tally == kPattern.size()) {
        found = true;
        tally = 0;
      }
    } else {
      tally = 0;
    }
  }
  return found;
}

StackInput parse_stack_input(const std::string& input) {
  std::vector<std::string> parts = split(input, '|');
  if (parts.size() != 3) throw MalformedInstanceError("stack input needs INITIAL|OPERATIONS|FINAL");
  StackInput out;
  out.initial = parts[0];
  out.final_ = parts[2];
  if (!parts[1].empty()) {
    for (const std::string& tok : split(parts[1], ',')) {
      out.ops.push_back(stack_op_from_name(tok));
      out.op_texts.push_back(tok);
    }
  }
  return out;
}

VmInput parse_vm_input(const std::string& input, bool expect_target) {
  VmInput out;
  std::string ops_part = input;
  if (expect_target) {
    std::vector<std::string> parts = split(input, '|');
    if (parts.size() != 2) throw MalformedInstanceError("vending machine input needs OPERATIONS|FINAL");
    ops_part = parts[0];
    try {
      out.target = std::stoll(parts[1]);
    } catch (const std::exception&) {
      throw MalformedInstanceError("vending machine final balance is not an integer");
    }
    out.has_target = true;
  }
  if (!ops_part.empty()) {
    for (const std::string& tok : split(ops_part, ',')) out.ops.push_back(vm_token_from_text(tok));
  }
  return out;
}

HamiltonianInput parse_hamiltonian_input(const std::string& input) {
  std::vector<std::string> lines = split(input, '\n');
  HamiltonianInput out;
  std::size_t i = 0;
  if (i >= lines.size() || lines[i] != "Graph:") throw MalformedInstanceError("missing Graph: header");
  ++i;
  std::vector<std::string> matrix_rows;
  while (i < lines.size() && lines[i] != "Path:") matrix_rows.push_back(lines[i++]);
  if (i >= lines.size()) throw MalformedInstanceError("missing Path: header");
  ++i;
  if (i >= lines.size()) throw MalformedInstanceError("missing path line");
  out.graph.n = static_cast<int>(matrix_rows.size());
  for (const std::string& row : matrix_rows) {
    if (static_cast<int>(row.size()) != out.graph.n) {
      throw MalformedInstanceError("adjacency matrix is not square");
    }
    for (char c : row) {
      if (c != '0' && c != '1') throw MalformedInstanceError("adjacency matrix has foreign character");
      out.graph.adj.push_back(c == '1' ? 1 : 0);
    }
  }
  for (const std::string& tok : split(lines[i], ',')) {
    try {
      out.path.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw MalformedInstanceError("path vertex is not an integer");
    }
  }
  return out;
}

MazeInput parse_maze_input(const std::string& input, std::string_view maze_header,
                           std::string_view moves_header) {
  std::vector<std::string> lines = split(input, '\n');
  if (lines.empty() || lines[0] != maze_header) {
    throw MalformedInstanceError("missing maze header");
  }
  std::size_t i = 1;
  std::vector<std::string> grid;
  while (i < lines.size() && lines[i] != moves_header) grid.push_back(lines[i++]);
  if (i + 1 >= lines.size()) throw MalformedInstanceError("missing moves line");
  MazeInput out{parse_maze(grid), {}};
  for (const std::string& tok : split(lines[i + 1], ',')) out.moves.push_back(move_from_name(tok));
  return out;
}

std::vector<std::string> tokenize_reversal(const std::string& input) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < input.size()) {
    if (input[pos] == '#') {
      tokens.emplace_back("#");
      ++pos;
      continue;
    }
    bool matched = false;
    for (const std::string& tok : kReversalAlphabet) {
      if (input.compare(pos, tok.size(), tok) == 0) {
        tokens.push_back(tok);
        pos += tok.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw MalformedInstanceError("reversal input has foreign characters");
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// Trace builders.
// ---------------------------------------------------------------------------

std::string cot_parity(const std::string& input) {
  std::ostringstream t;
  t << kThink << " We read the string character-by-character and count the zeros:\n";
  long long zeros = 0;
  for (char c : input) {
    if (c == '0') {
      ++zeros;
      t << "We read \"0\". It is a zero. Our count is now " << zeros
        << ". Now we move to the next character.\n";
    } else if (c == '1') {
      t << "We read \"1\". It is not a zero. Our count stays at " << zeros
        << ". Now we move to the next character.\n";
    } else {
      throw MalformedInstanceError("parity input contains foreign character");
    }
  }
  bool even = zeros % 2 == 0;
  t << "We have reached the end of the string. The count of zeros is " << zeros << ", which is "
    << (even ? "even" : "odd") << ".\n";
  t << "So the answer is " << (even ? 1 : 0);
  return t.str();
}

std::string cot_pattern(const std::string& input) {
  std::ostringstream t;
  t << kThink << " We read the string character-by-character and keep a tally:\n";
  std::string tally;
  bool found = false;
  for (char c : input) {
    if (c != 'a' && c != 'b' && c != 'c') {
      throw MalformedInstanceError("pattern input contains foreign character");
    }
    if (c == kPattern[tally.size()]) {
      tally.push_back(c);
      t << "We read " << quoted(std::string(1, c)) << ". It is a match. Our tally is: " << tally
        << ".";
      if (tally.size() == kPattern.size()) {
        t << " The tally equals the pattern.";
        found = true;
        tally.clear();
      }
      t << " Now we move to the next character.\n";
    } else if (!tally.empty()) {
      tally.clear();
      t << "We read " << quoted(std::string(1, c))
        << ". It is not a match. We clear our tally. Now we move to the next character.\n";
    } else {
      t << "We read " << quoted(std::string(1, c))
        << ". It is not a match. Now we move to the next character.\n";
    }
  }
  t << "We have reached the end of the string. The pattern " << quoted(kPattern) << " is "
    << (found ? "" : "not ") << "in the string.\n";
  t << "So the answer is " << (found ? 1 : 0);
  return t.str();
}

std::string cot_reversal(const std::string& input) {
  std::vector<std::string> tokens = tokenize_reversal(input);
  std::vector<std::string> left, right;
  bool after_hash = false;
  int hashes = 0;
  for (const std::string& tok : tokens) {
    if (tok == "#") {
      ++hashes;
      after_hash = true;
      continue;
    }
    (after_hash ? right : left).push_back(tok);
  }
  if (hashes != 1) throw MalformedInstanceError("reversal input must contain exactly one '#'");
  std::ostringstream t;
  t << kThink
    << " We split the string at \"#\" and compare the left part with the reversed right part "
       "token by token:\n";
  t << "The left part has tokens: " << join(left, ", ") << ".\n";
  t << "The right part has tokens: " << join(right, ", ") << ".\n";
  if (left.size() != right.size()) {
    t << "The left part has " << left.size() << " tokens but the right part has " << right.size()
      << " tokens, so the right part is not a reversal of the left part.\n";
    t << "So the answer is 0";
    return t.str();
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    const std::string& r = right[right.size() - 1 - i];
    t << "We compare left token " << i + 1 << " (" << quoted(left[i]) << ") with right token "
      << right.size() - i << " (" << quoted(r) << ").";
    if (left[i] == r) {
      t << " They match.\n";
    } else {
      t << " They do not match, so the right part is not a reversal of the left part.\n";
      t << "So the answer is 0";
      return t.str();
    }
  }
  t << "All tokens match, so the right part is a reversal of the left part.\n";
  t << "So the answer is 1";
  return t.str();
}

std::string cot_stack(const std::string& input) {
  StackInput in = parse_stack_input(input);
  std::ostringstream t;
  auto shown = [](const std::string& s) { return s.empty() ? std::string("(empty)") : s; };
  t << kThink << " We start with the stack: " << shown(in.initial)
    << " (the rightmost character is the top).\n";
  std::string stack = in.initial;
  auto fail = [&](const std::string& why) {
    t << why << " The sequence is not grammatical.\n";
    t << "So the answer is 0";
    return t.str();
  };
  for (std::size_t i = 0; i < in.ops.size(); ++i) {
    const std::string& text = in.op_texts[i];
    switch (in.ops[i]) {
      case StackOp::push0:
      case StackOp::push1: {
        char bit = in.ops[i] == StackOp::push0 ? '0' : '1';
        if (stack.size() >= kStackCapacity) {
          return fail("We read " + quoted(text) + ". The stack is full, so we cannot push.");
        }
        stack.push_back(bit);
        t << "We read " << quoted(text) << ". We push " << bit
          << " onto the stack. Our stack is now: " << shown(stack) << ".\n";
        break;
      }
      case StackOp::pop: {
        if (stack.empty()) {
          return fail("We read " + quoted(text) + ". The stack is empty, so we cannot pop.");
        }
        char bit = stack.back();
        stack.pop_back();
        t << "We read " << quoted(text) << ". We pop " << bit
          << " from the stack. Our stack is now: " << shown(stack) << ".\n";
        break;
      }
      case StackOp::empty_check: {
        if (!stack.empty()) {
          return fail("We read " + quoted(text) + ". The stack is not empty.");
        }
        t << "We read " << quoted(text) << ". The stack is empty, so we continue.\n";
        break;
      }
      case StackOp::stop: {
        t << "We read " << quoted(text) << ". We stop executing.\n";
        i = in.ops.size();  // halt
        break;
      }
    }
    if (i == in.ops.size()) break;
  }
  bool match = stack == in.final_;
  t << "We have executed the operations. Our final stack is: " << shown(stack) << ". The final stack "
    << (match ? "equals" : "does not equal") << " the target " << shown(in.final_) << ".\n";
  t << "So the answer is " << (match ? 1 : 0);
  return t.str();
}

std::string cot_hamiltonian(const std::string& input) {
  HamiltonianInput in = parse_hamiltonian_input(input);
  std::ostringstream t;
  std::vector<std::string> verts;
  for (int v : in.path) {
    if (v < 0 || v >= in.graph.n) throw MalformedInstanceError("hamiltonian path vertex out of range");
    verts.push_back(std::to_string(v));
  }
  t << kThink << " The graph has " << in.graph.n << " vertices. The path is: " << join(verts, ",")
    << ".\n";
  if (static_cast<int>(in.path.size()) != in.graph.n) {
    t << "The path has " << in.path.size() << " vertices but the graph has " << in.graph.n
      << ", so it cannot visit every vertex exactly once. The path is not Hamiltonian.\n";
    t << "So the answer is 0";
    return t.str();
  }
  t << "The path has " << in.path.size() << " vertices and the graph has " << in.graph.n
    << ", so the length is correct.\n";
  std::vector<bool> seen(in.graph.n, false);
  for (int v : in.path) {
    if (seen[v]) {
      t << "We check that no vertex repeats. Vertex " << v
        << " appears more than once. The path is not Hamiltonian.\n";
      t << "So the answer is 0";
      return t.str();
    }
    seen[v] = true;
  }
  t << "We check that no vertex repeats. All vertices are distinct.\n";
  t << "We check the edges:\n";
  for (std::size_t i = 0; i + 1 < in.path.size(); ++i) {
    int a = in.path[i], b = in.path[i + 1];
    if (in.graph.edge(a, b)) {
      t << "We move from " << a << " to " << b << ". The entry at row " << a << ", column " << b
        << " is 1, so the edge exists.\n";
    } else {
      t << "We move from " << a << " to " << b << ". The entry at row " << a << ", column " << b
        << " is 0, so the edge does not exist. The path is not Hamiltonian.\n";
      t << "So the answer is 0";
      return t.str();
    }
  }
  t << "Every move follows an edge and every vertex is visited exactly once, so the path is "
       "Hamiltonian.\n";
  t << "So the answer is 1";
  return t.str();
}

std::string cot_maze_solve(const std::string& input) {
  MazeInput in = parse_maze_input(input, "Maze:", "Moves:");
  std::ostringstream t;
  Cell pos = in.maze.find('S');
  t << kThink << " We start at \"S\", at row " << pos.first << ", column " << pos.second << ".\n";
  for (Move m : in.moves) {
    Cell next = pos;
    switch (m) {
      case Move::up: next.first -= 1; break;
      case Move::down: next.first += 1; break;
      case Move::left: next.second -= 1; break;
      case Move::right: next.second += 1; break;
    }
    t << "We move " << move_name(m) << " to row " << next.first << ", column " << next.second << ".";
    if (!in.maze.inside(next.first, next.second)) {
      t << " That would leave the maze. The moves are not a valid path.\n";
      t << "So the answer is 0";
      return t.str();
    }
    if (in.maze.at(next.first, next.second) == '#') {
      t << " This cell is a wall. The moves are not a valid path.\n";
      t << "So the answer is 0";
      return t.str();
    }
    t << " This cell is open.\n";
    pos = next;
  }
  bool solved = in.maze.at(pos.first, pos.second) == 'E';
  t << "We have used all the moves. We are at row " << pos.first << ", column " << pos.second
    << ", which is " << (solved ? "\"E\". The moves solve the maze." : "not \"E\". The moves do not solve the maze.")
    << "\n";
  t << "So the answer is " << (solved ? 1 : 0);
  return t.str();
}

std::string cot_maze_complete(const std::string& input) {
  MazeInput in = parse_maze_input(input, "Solved maze:", "Missing moves:");
  std::vector<Move> expected = maze_gap_path(in.maze);
  Cell q = in.maze.find('?');
  std::ostringstream t;
  t << kThink << "\n";
  for (int r = 0; r <= q.first; ++r) {
    if (r == 0) {
      t << "We begin at line 0.";
    } else {
      t << "We move on then to line " << r << ".\n";
    }
    t << "This line " << (r == q.first ? "contains" : "does not contain") << " \"?\".\n";
  }
  t << "The \"?\" character is at position " << q.second
    << " in the line. We will now perform a search on the neighbours to find the path.\n";

  // Walk the unique gap path, narrating the neighbour search.
  std::vector<Move> buffer;
  Cell pos = q;
  Cell prev{-1, -1};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    Move m = expected[i];
    Cell next = pos;
    switch (m) {
      case Move::up: next.first -= 1; break;
      case Move::down: next.first += 1; break;
      case Move::left: next.second -= 1; break;
      case Move::right: next.second += 1; break;
    }
    bool last = i + 1 == expected.size();
    if (last) {
      t << "This one has the following available neighbours connecting to the path: ['"
        << move_name(m) << "'] at [" << cell_text(next) << "].\n";
      t << "This has a \"+\" neighbour at " << cell_text(next) << " (\"" << move_name(m)
        << "\"), so it connects to the path.\n";
      buffer.push_back(m);
      t << "We add it to our buffer. Our buffer is now " << move_list(buffer, buffer.size())
        << ".\n";
      t << "We are done!\n";
    } else {
      // Open continuations from the current cell, excluding where we came from.
      std::vector<std::string> names;
      std::vector<std::string> cells;
      const Move dirs[4] = {Move::up, Move::down, Move::left, Move::right};
      const int dr[4] = {-1, 1, 0, 0};
      const int dc[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        Cell cand{pos.first + dr[d], pos.second + dc[d]};
        if (cand == prev) continue;
        if (in.maze.inside(cand.first, cand.second) && in.maze.at(cand.first, cand.second) == ' ') {
          names.push_back("'" + std::string(move_name(dirs[d])) + "'");
          cells.push_back(cell_text(cand));
        }
      }
      t << "This has neighbours: [" << join(names, ", ") << "] at [" << join(cells, ", ") << "].\n";
      buffer.push_back(m);
      t << "We select the neighbour at " << cell_text(next) << " (\"" << move_name(m)
        << "\") and add it to our buffer. Our buffer is: " << move_list(buffer, buffer.size())
        << ".\n";
    }
    prev = pos;
    pos = next;
  }
  bool match = in.moves == expected;
  t << "Our final set of positions is " << moves_csv(expected) << " and the solution says "
    << moves_csv(in.moves) << ".\n";
  t << "So the answer is " << (match ? 1 : 0);
  return t.str();
}

std::string cot_vm(const std::string& input, bool verify) {
  VmInput in = parse_vm_input(input, verify);
  std::ostringstream t;
  t << kThink << " We start with a balance of 0.\n";
  long long balance = 0;
  for (const VmToken& op : in.ops) {
    balance += op.signed_value;
    if (op.signed_value >= 0) {
      t << "We read \"" << op.text << "\", so we add " << op.signed_value
        << " to our current balance and we now have " << balance << ".\n";
    } else {
      // "substract" follows the template wording.
      t << "We read \"" << op.text << "\", so we return a " << op.text << " and substract "
        << -op.signed_value << " from our balance and now we have " << balance << ".\n";
    }
  }
  if (verify) {
    bool match = balance == in.target;
    t << "Our final balance is " << balance << ". The target balance is " << in.target << ".\n";
    t << "So the answer is " << (match ? 1 : 0);
  } else {
    t << "Our final balance is " << balance << ". The answer is then " << balance;
  }
  return t.str();
}

// ---------------------------------------------------------------------------
// System prompts.
// ---------------------------------------------------------------------------

namespace {

const char* kParityDescription =
    "This task is called PARITY. The strings in PARITY are generated from a probabilistic "
    "automaton.\n"
    "Your job is to learn what is the likelihood of a string to be labeled 0 or 1, and output the "
    "correct label.\n"
    "In the limit where the automaton is deterministic, if the number of zeros in the input string "
    "is even, the label is always 1. Else, it is 0.\n"
    "Given the data below, determine what is the most likely label for the given string and output "
    "ONLY the label.\n"
    "Data:";

const char* kPatternDescription =
    "This is a pattern matching task. The strings in this task are generated from a probabilistic "
    "automaton.\n"
    "Each string is labelled 0 or 1 depending on whether the pattern \"abcabb\" is (1) or is not "
    "(0) in the string.\n"
    "Your job is to learn what is the likelihood of a string to be labelled 0 or 1, and output the "
    "correct label.\n"
    "In the limit where the automaton is deterministic, if the pattern is present in the string, "
    "the label is always 1. Else, it is 0.\n"
    "Given the data below, determine what is the most likely label for the given string and output "
    "ONLY the label.\n"
    "Data:";

const char* kReversalDescription =
    "This is a string detection task. The strings in this task are generated from a probabilistic "
    "automaton.\n"
    "Each input is of the form LEFT#RIGHT. Each string is labelled 0 or 1 depending on whether the "
    "RIGHT pattern is (1) or is not (0) a reversal of LEFT.\n"
    "Your job is to learn what is the likelihood of a string to be labelled 0 or 1, and output the "
    "correct label.\n"
    "In the limit where the automaton is deterministic, if RIGHT is the reversal of LEFT, the "
    "label is always 1. Else, it is 0.\n"
    "Given the data below, determine what is the most likely label for the given string and output "
    "ONLY the label.\n"
    "Data:";

const char* kStackDescription =
    "This is a stack simulation task. The inputs in this task are generated from a probabilistic "
    "automaton.\n"
    "Each input is of the form INITIAL|OPERATIONS|FINAL, where INITIAL and FINAL are binary "
    "strings and OPERATIONS is a comma-separated sequence of stack operations. The rightmost "
    "character of a string is the top of the stack.\n"
    "Each input is labelled 0 or 1 depending on whether executing the operations on INITIAL is "
    "grammatical and leaves exactly FINAL on the stack. Popping an empty stack, pushing onto a "
    "full stack, or asserting empty on a non-empty stack is not grammatical.\n"
    "Your job is to learn what is the likelihood of an input to be labelled 0 or 1, and output the "
    "correct label.\n"
    "In the limit where the automaton is deterministic, if the operations are grammatical and "
    "produce FINAL, the label is always 1. Else, it is 0.\n"
    "Given the data below, determine what is the most likely label for the given input and output "
    "ONLY the label.\n"
    "Data:";

const char* kHamiltonianDescription =
    "This is a graph verification task. The graphs in this task are generated from a probabilistic "
    "automaton.\n"
    "Each input contains a directed graph as an adjacency matrix of 0/1 rows, and a path as a "
    "comma-separated list of vertices.\n"
    "Each input is labelled 0 or 1 depending on whether the path is (1) or is not (0) a "
    "Hamiltonian path of the graph, visiting every vertex exactly once along existing edges.\n"
    "Your job is to learn what is the likelihood of an input to be labelled 0 or 1, and output the "
    "correct label.\n"
    "In the limit where the automaton is deterministic, if the path is Hamiltonian, the label is "
    "always 1. Else, it is 0.\n"
    "Given the data below, determine what is the most likely label for the given graph and moves; "
    "and output ONLY the label.\n"
    "Data:";

const char* kMazeCompleteDescription =
    "You are helping me complete a maze. You will be given a maze almost solved, and sequence of "
    "moves to finish solving it.\n"
    "Your job is to determine whether the moves are correct and will lead to solving the maze "
    "solved.\n"
    "You must always output 0 (incorrect) or 1 (correct).\n"
    "The path you must complete is denoted by uninterrupted \"+\", and your completion starts at "
    "\"?\". Walls are denoted by \"#\", and the start and end are \"S\" and \"E\", respectively.\n"
    "The first move you must verify is the one connecting the path to \"?\".\n"
    "Given the data below, determine what is the most likely label for the given maze and moves; "
    "and output ONLY the label.\n"
    "Data:";

const char* kMazeSolveDescription =
    "You are helping me solve a maze. You will be given a maze and a sequence of moves to solve "
    "it.\n"
    "Your job is to determine whether the moves are correct and form a valid path from the start "
    "to the exit.\n"
    "You must always output 0 (incorrect) or 1 (correct).\n"
    "Walls are denoted by \"#\", and the start and end are \"S\" and \"E\", respectively. Moves "
    "start at \"S\".\n"
    "Given the data below, determine what is the most likely label for the given maze and moves; "
    "and output ONLY the label.\n"
    "Data:";

const char* kVmVerifyDescription =
    "You are a vending machine. You are given a sequence of additions of balance (+10, +5, etc) or "
    "a selection (soda, biscuit, or coffee), followed by \"|\" and a final balance.\n"
    "Your job is to verify whether the final balance is correct, starting from a balance of 0.\n"
    "Each soda is worth 25. Each biscuit is 20. Each coffee is 15. When someone selects a soda, "
    "biscuit, or coffee, the value of the item is subtracted from the balance.\n"
    "You must always output 0 (incorrect) or 1 (correct).\n"
    "Given the data below, determine what is the most likely label for the given string and output "
    "ONLY the label.\n"
    "Data:";

const char* kVmSumDescription =
    "You are a vending machine. You are given a sequence of additions of balance (+10, +5, etc) or "
    "a selection (soda, biscuit, or coffee).\n"
    "Your job is to output the remaining balance given the sequence.\n"
    "Each soda is worth 25. Each biscuit is 20. Each coffee is 15. When someone selects a soda, "
    "biscuit, or coffee, the value of the item is subtracted from the balance.\n"
    "Given the data below, determine what is the most likely balance for the given string and "
    "output ONLY the balance.\n"
    "Data:";

// Language-neutral walk listing embedded by direct encoding, weights elided.
const char* kWalkListing =
    "procedure sample_tape(P):\n"
    "    tape <- empty list\n"
    "    state <- \"start\"\n"
    "    repeat:\n"
    "        next <- draw one of STATES with weights P[state]\n"
    "        if next = \"stop\":\n"
    "            return tape\n"
    "        append EMIT[next] to tape\n"
    "        state <- next";

std::string with_code_header(const std::string& description, const std::string& code) {
  // Splice ", described in the code below." into the first sentence block and
  // insert the code listing before the closing instruction lines.
  std::vector<std::string> lines = split(description, '\n');
  std::string first = lines[0];
  if (first.size() >= 1 && first.back() == '.') first.pop_back();
  first += ", described in the code below.";
  std::ostringstream out;
  out << first << "\n";
  for (std::size_t i = 1; i + 2 < lines.size(); ++i) out << lines[i] << "\n";
  out << "Here's the code:\n" << code << "\n\n";
  out << lines[lines.size() - 2] << "\n" << lines.back();
  return out.str();
}

}  // namespace

std::string description_prompt_for(TaskId id) {
  switch (id) {
    case TaskId::parity: return kParityDescription;
    case TaskId::pattern_matching: return kPatternDescription;
    case TaskId::reversal: return kReversalDescription;
    case TaskId::stack: return kStackDescription;
    case TaskId::hamiltonian: return kHamiltonianDescription;
    case TaskId::maze_complete: return kMazeCompleteDescription;
    case TaskId::maze_solve: return kMazeSolveDescription;
    case TaskId::vm_verify: return kVmVerifyDescription;
    case TaskId::vm_sum: return kVmSumDescription;
  }
  throw Error("unknown task");
}

std::string direct_encoding_prompt_for(TaskId id) {
  std::string constants;
  switch (id) {
    case TaskId::parity:
      constants = "ALPHABET = [\"0\", \"1\"]";
      break;
    case TaskId::pattern_matching:
      constants = "ALPHABET = [\"a\", \"b\", \"c\"]\nPATTERN = \"abcabb\"\nMIN_LEN = 8";
      break;
    case TaskId::reversal:
      constants =
          "ALPHABET = [\"gfx\", \"chtte\", \"%\", \"ltintprk\", \"\u00AF\\_(\u30C4)_/\u00AF\"]\n"
          "MIN_LEN = 5";
      break;
    case TaskId::stack:
      constants =
          "ALPHABET = [\"0\", \"1\", \"push(0)\", \"push(1)\", \"pop\", \"stop\", \"empty\"]\n"
          "CAPACITY = 16";
      break;
    case TaskId::hamiltonian:
      constants =
          "VERTICES = 10 + growth drawn from P[grow]\n"
          "for each ordered pair (i, j), i != j:\n"
          "    edge[i][j] <- draw one of [1, 0] with weights P[edge]";
      break;
    case TaskId::maze_complete:
    case TaskId::maze_solve:
      constants =
          "GLYPHS = [\"#\", \" \", \"S\", \"E\", \"+\", \"?\"]\n"
          "SIDE = base + 2 * growth drawn from P[grow]\n"
          "maze <- recursive backtracker over a SIDE x SIDE grid";
      break;
    case TaskId::vm_verify:
    case TaskId::vm_sum:
      constants =
          "ALPHABET = [\"+5\", \"+10\", \"+15\", \"+20\", \"+25\", \"coffee\", \"biscuit\", "
          "\"soda\"]\n"
          "PRICES = {coffee: 15, biscuit: 20, soda: 25}";
      break;
  }
  std::string code = constants;
  if (id != TaskId::hamiltonian && id != TaskId::maze_complete && id != TaskId::maze_solve) {
    code += "\n\n";
    code += kWalkListing;
  }
  return with_code_header(description_prompt_for(id), code);
}

}  // namespace icl::detail
