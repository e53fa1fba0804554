#include <algorithm>
#include <array>
#include <numeric>

#include "icl/errors.hpp"
#include "icl/task.hpp"
#include "icl/text.hpp"
#include "task_text.hpp"

namespace icl {

namespace {

// ---------------------------------------------------------------------------
// Automaton construction helpers.
// ---------------------------------------------------------------------------

struct StateDef {
  std::string name;
  std::vector<std::string> emit;
};

struct RowDef {
  std::string from;
  std::vector<std::pair<std::string, double>> to;
  double stop = 0.0;
  std::string donor;
  std::string recipient;
};

Automaton build_automaton(std::string name, std::vector<StateDef> states, std::string start,
                          std::vector<RowDef> row_defs, std::vector<std::string> alphabet) {
  Automaton a;
  a.name = std::move(name);
  a.alphabet = std::move(alphabet);
  for (StateDef& s : states) {
    a.states.push_back(s.name);
    a.emissions.push_back(s.emit);
  }
  const std::size_t n = a.states.size();
  a.rows.assign(n, TransitionRow{std::vector<double>(n, 0.0), 0.0, -1, -1});
  for (const RowDef& def : row_defs) {
    int idx = a.state_index(def.from);
    TransitionRow& row = a.rows[idx];
    for (const auto& [succ, w] : def.to) row.weights[a.state_index(succ)] = w;
    row.stop = def.stop;
    if (!def.donor.empty()) {
      row.donor = a.state_index(def.donor);
      row.recipient = a.state_index(def.recipient);
    }
  }
  a.start = a.state_index(start);
  a.validate();
  return a;
}

std::string walk_chars(const Automaton& a, Rng& rng) {
  std::string out;
  for (const std::string& sym : sample_symbols(a, rng)) out += sym;
  return out;
}

std::string moves_csv(const std::vector<Move>& moves) {
  std::vector<std::string> names;
  names.reserve(moves.size());
  for (Move m : moves) names.emplace_back(move_name(m));
  return join(names, ",");
}

int coin_want(int label_target, Rng& rng) {
  return label_target >= 0 ? label_target : (rng.bernoulli(0.5) ? 1 : 0);
}

constexpr int kInnerAttempts = 256;

[[noreturn]] void starve(const Task& task, int label_target) {
  throw GenerationStarvationError("task " + std::string(task.name()) +
                                  ": could not construct an instance with label " +
                                  std::to_string(label_target));
}

// ---------------------------------------------------------------------------
// PARITY
// ---------------------------------------------------------------------------

class ParityTask final : public Task {
 public:
  TaskId id() const override { return TaskId::parity; }

  const Automaton& base_automaton() const override {
    // Emits three-character blocks carrying exactly one zero each, so the
    // zero count tracks the length while the zero positions keep the support
    // rich. Stop mass is constant, making the expected length delta-invariant;
    // shifts only change which block variants run together.
    static const Automaton a = build_automaton(
        "parity",
        {{"start", {}},
         {"b110", {"1", "1", "0"}},
         {"b101", {"1", "0", "1"}},
         {"b011", {"0", "1", "1"}}},
        "start",
        {
            {"start", {{"b110", 0.34}, {"b101", 0.33}, {"b011", 0.33}}, 0.0, "", ""},
            {"b110", {{"b101", 0.85}, {"b011", 0.02}, {"b110", 0.03}}, 0.10, "b101", "b110"},
            {"b101", {{"b110", 0.30}, {"b101", 0.30}, {"b011", 0.30}}, 0.10, "", ""},
            {"b011", {{"b110", 0.30}, {"b101", 0.30}, {"b011", 0.30}}, 0.10, "", ""},
        },
        {"0", "1"});
    return a;
  }

  long long oracle(const std::string& input) const override { return oracle_parity(input); }

  GeneratedInstance generate(const Automaton& shifted, int /*label_target*/,
                             Rng& rng) const override {
    std::string s = walk_chars(shifted, rng);
    return {s, oracle_parity(s)};
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_parity(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override { return {"0", "1"}; }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> out;
    for (char c : input) out.emplace_back(1, c);
    return out;
  }

  std::vector<std::pair<std::string, int>> symbol_table() const override {
    return {{"0", 0}, {"1", 1}};
  }
};

// ---------------------------------------------------------------------------
// Pattern Matching
// ---------------------------------------------------------------------------

class PatternTask final : public Task {
 public:
  TaskId id() const override { return TaskId::pattern_matching; }

  const Automaton& base_automaton() const override {
    static const Automaton a = build_automaton(
        "pattern_matching",
        {{"start", {}}, {"a", {"a"}}, {"b", {"b"}}, {"c", {"c"}}},
        "start",
        {
            {"start", {{"a", 0.34}, {"b", 0.33}, {"c", 0.33}}, 0.0, "", ""},
            // abc cycling with a b-repeat rate tuned so "abcabb" appears
            // naturally in about half of the in-distribution strings; shifts
            // lengthen runs and dilute the cycle.
            {"a", {{"a", 0.006}, {"b", 0.985}, {"c", 0.009}}, 0.0, "b", "a"},
            {"b", {{"a", 0.006}, {"b", 0.08}, {"c", 0.914}}, 0.0, "c", "b"},
            // The only stopping state; shifts drain traffic away from it.
            {"c", {{"a", 0.907}, {"b", 0.014}, {"c", 0.004}}, 0.075, "a", "b"},
        },
        {"a", "b", "c"});
    return a;
  }

  long long oracle(const std::string& input) const override { return oracle_pattern(input); }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    const std::size_t pat_len = kPattern.size();
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::string s = walk_chars(shifted, rng);
      if (s.size() < 8) continue;
      int want = coin_want(label_target, rng);
      bool contains = s.find(kPattern) != std::string::npos;
      if (want == 1) {
        // Natural occurrences first; at high shift they become rare, so fall
        // back to planting the pattern over a random window.
        if (!contains) {
          if (attempt < 64) continue;
          std::size_t pos = rng.index(s.size() - pat_len + 1);
          s.replace(pos, pat_len, kPattern);
        }
        // Reject positives the naive trace scan would miss, so traces stay
        // faithful to the oracle.
        if (!detail::pattern_scan_finds(s)) continue;
        return {s, 1};
      }
      if (contains) continue;
      return {s, 0};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_pattern(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override {
    return {"a", "b", "c", std::string(kPattern)};
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> out;
    for (char c : input) out.emplace_back(1, c);
    return out;
  }

  std::vector<std::pair<std::string, int>> symbol_table() const override {
    return {{"a", 0}, {"b", 1}, {"c", 2}};
  }
};

// ---------------------------------------------------------------------------
// Reversal
// ---------------------------------------------------------------------------

class ReversalTask final : public Task {
 public:
  TaskId id() const override { return TaskId::reversal; }

  const Automaton& base_automaton() const override {
    static const Automaton a = [] {
      const std::string shrug = kReversalAlphabet[4];
      std::vector<StateDef> states{{"start", {}},
                                   {"gfx", {"gfx"}},
                                   {"chtte", {"chtte"}},
                                   {"pct", {"%"}},
                                   {"ltintprk", {"ltintprk"}},
                                   {"shrug", {shrug}}};
      std::vector<RowDef> rows;
      rows.push_back({"start",
                      {{"gfx", 0.2}, {"chtte", 0.2}, {"pct", 0.2}, {"ltintprk", 0.2}, {"shrug", 0.2}},
                      0.0,
                      "",
                      ""});
      for (const char* tok : {"gfx", "chtte", "ltintprk", "shrug"}) {
        std::vector<std::pair<std::string, double>> to{{"pct", 0.92}};
        for (const char* other : {"gfx", "chtte", "ltintprk", "shrug"}) {
          to.push_back({other, std::string_view(other) == tok ? 0.026 : 0.018});
        }
        rows.push_back({tok, to, 0.0, "pct", tok});
      }
      rows.push_back({"pct",
                      {{"gfx", 0.1675}, {"chtte", 0.1675}, {"ltintprk", 0.1675}, {"shrug", 0.1675},
                       {"pct", 0.10}},
                      0.23,
                      "",
                      ""});
      std::vector<std::string> alphabet(kReversalAlphabet);
      return build_automaton("reversal", states, "start", rows, alphabet);
    }();
    return a;
  }

  long long oracle(const std::string& input) const override {
    return oracle_reversal(detail::tokenize_reversal(input));
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    constexpr std::size_t kMinLen = 5;
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::vector<std::string> left = sample_symbols(shifted, rng);
      if (left.size() < kMinLen) continue;
      std::vector<std::string> right(left.rbegin(), left.rend());
      int want = coin_want(label_target, rng);
      if (want == 0) {
        if (rng.bernoulli(0.8)) {
          std::size_t idx = rng.index(right.size());
          std::size_t tok = rng.index(kReversalAlphabet.size() - 1);
          std::string repl = kReversalAlphabet[tok];
          if (repl == right[idx]) repl = kReversalAlphabet.back();
          right[idx] = repl;
        } else {
          right.erase(right.begin() + static_cast<long>(rng.index(right.size())));
        }
      }
      std::string input = join(left, "") + "#" + join(right, "");
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_reversal(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override {
    std::vector<std::string> out(kReversalAlphabet);
    out.push_back("#");
    return out;
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    return detail::tokenize_reversal(input);
  }

  std::vector<std::pair<std::string, int>> symbol_table() const override {
    // 1-based alphabet order, '#' last.
    return {{"gfx", 1},      {"chtte", 2},          {"%", 3},
            {"ltintprk", 4}, {kReversalAlphabet[4], 5}, {"#", 6}};
  }
};

// ---------------------------------------------------------------------------
// Stack
// ---------------------------------------------------------------------------

struct StackExec {
  bool grammatical = true;
  std::string stack;
};

StackExec exec_stack(const std::string& s0, const std::vector<StackOp>& ops) {
  StackExec out{true, s0};
  for (StackOp op : ops) {
    switch (op) {
      case StackOp::push0:
      case StackOp::push1:
        if (out.stack.size() >= kStackCapacity) return {false, out.stack};
        out.stack.push_back(op == StackOp::push0 ? '0' : '1');
        break;
      case StackOp::pop:
        if (out.stack.empty()) return {false, out.stack};
        out.stack.pop_back();
        break;
      case StackOp::empty_check:
        if (!out.stack.empty()) return {false, out.stack};
        break;
      case StackOp::stop:
        return out;
    }
  }
  return out;
}

class StackTask final : public Task {
 public:
  TaskId id() const override { return TaskId::stack; }

  const Automaton& base_automaton() const override {
    static const Automaton a = build_automaton(
        "stack",
        {{"start", {}},
         {"b0", {"0"}},
         {"b1", {"1"}},
         {"push0", {"push(0)"}},
         {"push1", {"push(1)"}},
         {"popst", {"pop"}},
         {"emp", {"empty"}},
         {"stop_tok", {"stop"}}},
        "start",
        {
            {"start",
             {{"b0", 0.44}, {"b1", 0.44}, {"push0", 0.05}, {"push1", 0.05}, {"popst", 0.02}},
             0.0, "", ""},
            {"b0",
             {{"b0", 0.375}, {"b1", 0.375}, {"push0", 0.10}, {"push1", 0.10}, {"popst", 0.05}},
             0.0, "", ""},
            {"b1",
             {{"b0", 0.375}, {"b1", 0.375}, {"push0", 0.10}, {"push1", 0.10}, {"popst", 0.05}},
             0.0, "", ""},
            {"push0",
             {{"push0", 0.02}, {"push1", 0.04}, {"popst", 0.87}, {"emp", 0.04}, {"stop_tok", 0.03}},
             0.0, "popst", "push0"},
            {"push1",
             {{"push0", 0.04}, {"push1", 0.02}, {"popst", 0.87}, {"emp", 0.04}, {"stop_tok", 0.03}},
             0.0, "popst", "push1"},
            {"popst",
             {{"push0", 0.3775}, {"push1", 0.3775}, {"popst", 0.03}, {"emp", 0.07},
              {"stop_tok", 0.145}},
             0.0, "", ""},
            {"emp",
             {{"push0", 0.30}, {"push1", 0.30}, {"popst", 0.15}, {"stop_tok", 0.25}},
             0.0, "", ""},
            {"stop_tok", {}, 1.0, "", ""},
        },
        {"0", "1", "push(0)", "push(1)", "pop", "stop", "empty"});
    return a;
  }

  long long oracle(const std::string& input) const override {
    detail::StackInput in = detail::parse_stack_input(input);
    return oracle_stack(in.initial, in.ops, in.final_);
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::vector<std::string> syms = sample_symbols(shifted, rng);
      std::string s0;
      std::size_t i = 0;
      while (i < syms.size() && (syms[i] == "0" || syms[i] == "1")) s0 += syms[i++][0];
      if (s0.size() > kStackCapacity / 2) continue;
      std::vector<StackOp> ops;
      std::vector<std::string> texts;
      for (; i < syms.size(); ++i) {
        ops.push_back(stack_op_from_name(syms[i]));
        texts.push_back(syms[i]);
      }
      if (ops.empty()) continue;
      StackExec ex = exec_stack(s0, ops);
      int want = coin_want(label_target, rng);
      std::string sf;
      if (want == 1) {
        if (!ex.grammatical) continue;
        sf = ex.stack;
      } else if (ex.grammatical) {
        sf = ex.stack;
        if (sf.empty()) {
          sf.push_back(rng.bernoulli(0.5) ? '0' : '1');
        } else {
          std::size_t pos = rng.index(sf.size());
          sf[pos] = sf[pos] == '0' ? '1' : '0';
        }
      } else {
        sf = ex.stack;  // stack content at the violation; label 0 regardless
      }
      std::string input = s0 + "|" + join(texts, ",") + "|" + sf;
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_stack(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override {
    return {"0", "1", "push(0)", "push(1)", "pop", "stop", "empty", "|"};
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    detail::StackInput in = detail::parse_stack_input(input);
    std::vector<std::string> out;
    for (char c : in.initial) out.emplace_back(1, c);
    out.emplace_back("|");
    for (const std::string& t : in.op_texts) out.push_back(t);
    out.emplace_back("|");
    for (char c : in.final_) out.emplace_back(1, c);
    return out;
  }

  std::vector<std::pair<std::string, int>> symbol_table() const override {
    return {{"0", 0},   {"1", 1},    {"push(0)", 2}, {"push(1)", 3},
            {"pop", 4}, {"stop", 5}, {"empty", 6},   {"|", 7}};
  }
};

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

class HamiltonianTask final : public Task {
 public:
  TaskId id() const override { return TaskId::hamiltonian; }

  const Automaton& base_automaton() const override {
    static const Automaton a = build_automaton(
        "hamiltonian",
        {{"grow", {"g"}}, {"done", {}}, {"edge", {}}, {"edge_yes", {"1"}}, {"edge_no", {"0"}}},
        "grow",
        {
            {"grow", {{"grow", 0.02}, {"done", 0.98}}, 0.0, "done", "grow"},
            {"done", {}, 1.0, "", ""},
            // One-step coin row: shifts raise the edge density.
            {"edge", {{"edge_yes", 0.12}, {"edge_no", 0.88}}, 0.0, "edge_no", "edge_yes"},
            {"edge_yes", {}, 1.0, "", ""},
            {"edge_no", {}, 1.0, "", ""},
        },
        {"g", "0", "1"});
    return a;
  }

  long long oracle(const std::string& input) const override {
    detail::HamiltonianInput in = detail::parse_hamiltonian_input(input);
    return oracle_hamiltonian(in.graph, in.path);
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    const int edge_state = shifted.state_index("edge");
    const int yes_state = shifted.state_index("edge_yes");
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::size_t units = sample_symbols(shifted, rng).size();
      int n = 10 + static_cast<int>(std::min<std::size_t>(units, 2));
      std::vector<int> path(n);
      std::iota(path.begin(), path.end(), 0);
      rng.shuffle(path);
      Digraph g;
      g.n = n;
      g.adj.assign(static_cast<std::size_t>(n) * n, 0);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          if (r == c) continue;
          g.adj[static_cast<std::size_t>(r) * n + c] =
              draw_step(shifted, edge_state, rng) == yes_state ? 1 : 0;
        }
      }
      for (int k = 0; k + 1 < n; ++k) {
        g.adj[static_cast<std::size_t>(path[k]) * n + path[k + 1]] = 1;
      }
      int want = coin_want(label_target, rng);
      if (want == 0) {
        if (rng.bernoulli(0.5)) {
          int k = static_cast<int>(rng.index(n - 1));
          g.adj[static_cast<std::size_t>(path[k]) * n + path[k + 1]] = 0;
        } else {
          int k = static_cast<int>(rng.index(n));
          int v = static_cast<int>(rng.index(n - 1));
          if (v >= path[k]) ++v;
          path[k] = v;
        }
        if (oracle_hamiltonian(g, path) != 0) continue;
      }
      std::string input = "Graph:\n";
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          input.push_back(g.edge(r, c) ? '1' : '0');
        }
        input.push_back('\n');
      }
      input += "Path:\n";
      std::vector<std::string> verts;
      for (int v : path) verts.push_back(std::to_string(v));
      input += join(verts, ",");
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_hamiltonian(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override { return {}; }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> out;
    for (const std::string& line : split(input, '\n')) {
      for (const std::string& tok : split(line, ' ')) {
        if (!tok.empty()) out.push_back(tok);
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Mazes
// ---------------------------------------------------------------------------

class MazeSolveTask final : public Task {
 public:
  TaskId id() const override { return TaskId::maze_solve; }

  const Automaton& base_automaton() const override {
    static const Automaton a = build_automaton(
        "maze_solve", {{"grow", {"g"}}, {"done", {}}}, "grow",
        {
            {"grow", {{"grow", 0.02}, {"done", 0.98}}, 0.0, "done", "grow"},
            {"done", {}, 1.0, "", ""},
        },
        {"g"});
    return a;
  }

  long long oracle(const std::string& input) const override {
    detail::MazeInput in = detail::parse_maze_input(input, "Maze:", "Moves:");
    return oracle_maze_solve(in.maze, in.moves);
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::size_t units = sample_symbols(shifted, rng).size();
      int side = 15 + 2 * static_cast<int>(std::min<std::size_t>(units, 3));
      MazeGrid maze = generate_maze(side, side, rng);
      std::vector<Move> moves = solution_moves(maze);
      int want = coin_want(label_target, rng);
      if (want == 0) {
        std::size_t idx = rng.index(moves.size());
        Move orig = moves[idx];
        Move repl = static_cast<Move>(rng.index(3));
        if (repl == orig || static_cast<int>(repl) >= static_cast<int>(orig)) {
          repl = static_cast<Move>((static_cast<int>(repl) + 1) % 4);
        }
        if (repl == orig) repl = static_cast<Move>((static_cast<int>(orig) + 1) % 4);
        moves[idx] = repl;
        if (oracle_maze_solve(maze, moves) != 0) continue;
      }
      std::string input = "Maze:\n" + maze.render() + "\nMoves:\n" + moves_csv(moves);
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_maze_solve(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override {
    return {"#", "S", "E", "+", "?", "up", "down", "left", "right"};
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> out;
    for (const std::string& line : split(input, '\n')) out.push_back(line);
    return out;
  }
};

class MazeCompleteTask final : public Task {
 public:
  TaskId id() const override { return TaskId::maze_complete; }

  const Automaton& base_automaton() const override {
    static const Automaton a = build_automaton(
        "maze_complete", {{"grow", {"g"}}, {"done", {}}}, "grow",
        {
            {"grow", {{"grow", 0.01}, {"done", 0.99}}, 0.0, "done", "grow"},
            {"done", {}, 1.0, "", ""},
        },
        {"g"});
    return a;
  }

  long long oracle(const std::string& input) const override {
    detail::MazeInput in = detail::parse_maze_input(input, "Solved maze:", "Missing moves:");
    return oracle_maze_complete(in.maze, in.moves);
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::size_t units = sample_symbols(shifted, rng).size();
      int side = 11 + 2 * static_cast<int>(std::min<std::size_t>(units, 2));
      MazeGrid maze = generate_maze(side, side, rng);
      std::vector<Cell> path = maze_solution(maze);
      std::size_t k = 1 + rng.index(3);  // gap of 1..3 moves
      if (path.size() < k + 3) continue;
      std::size_t gap = 1 + rng.index(path.size() - 1 - k);  // gap in [1, size-1-k]
      for (std::size_t p = 0; p < path.size(); ++p) {
        char glyph = '+';
        if (p == gap) {
          glyph = '?';
        } else if (p > gap && p < gap + k) {
          glyph = ' ';
        }
        maze.rows[path[p].first][path[p].second] = glyph;
      }
      std::vector<Move> moves;
      for (std::size_t p = gap; p < gap + k; ++p) {
        Cell a = path[p], b = path[p + 1];
        if (b.first < a.first) moves.push_back(Move::up);
        else if (b.first > a.first) moves.push_back(Move::down);
        else if (b.second < a.second) moves.push_back(Move::left);
        else moves.push_back(Move::right);
      }
      int want = coin_want(label_target, rng);
      if (want == 0) {
        std::vector<Move> wrong = moves;
        if (rng.bernoulli(0.5)) {
          std::size_t idx = rng.index(wrong.size());
          int shift = 1 + static_cast<int>(rng.index(3));
          wrong[idx] = static_cast<Move>((static_cast<int>(wrong[idx]) + shift) % 4);
        } else {
          for (Move& m : wrong) m = static_cast<Move>(rng.index(4));
          if (wrong == moves) wrong[0] = static_cast<Move>((static_cast<int>(moves[0]) + 1) % 4);
        }
        moves = wrong;
        if (oracle_maze_complete(maze, moves) != 0) continue;
      }
      std::string input = "Solved maze:\n" + maze.render() + "\nMissing moves:\n" + moves_csv(moves);
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_maze_complete(input);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> protected_literals() const override {
    return {"#", "S", "E", "+", "?", "up", "down", "left", "right"};
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> out;
    for (const std::string& line : split(input, '\n')) out.push_back(line);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Vending machine
// ---------------------------------------------------------------------------

class VmTaskBase : public Task {
 public:
  const Automaton& base_automaton() const override {
    static const Automaton a = [] {
      std::vector<StateDef> states{{"start", {}},     {"c5", {"+5"}},   {"c10", {"+10"}},
                                   {"c15", {"+15"}},  {"c20", {"+20"}}, {"c25", {"+25"}},
                                   {"cof", {"coffee"}}, {"bis", {"biscuit"}}, {"sod", {"soda"}}};
      std::vector<RowDef> rows;
      rows.push_back({"start",
                      {{"c5", 0.2}, {"c10", 0.2}, {"c15", 0.2}, {"c20", 0.2}, {"c25", 0.2}},
                      0.0, "", ""});
      for (const char* coin : {"c5", "c15", "c20", "c25"}) {
        rows.push_back({coin,
                        {{"c5", 0.14}, {"c10", 0.14}, {"c15", 0.14}, {"c20", 0.14}, {"c25", 0.14},
                         {"cof", 0.10}, {"bis", 0.10}, {"sod", 0.10}},
                        0.0, "", ""});
      }
      // Shifts redirect this row from soda (heaviest stopper) toward coffee.
      rows.push_back({"c10",
                      {{"c10", 0.02}, {"sod", 0.86}, {"c5", 0.03}, {"c15", 0.03}, {"c20", 0.02},
                       {"c25", 0.02}, {"cof", 0.01}, {"bis", 0.01}},
                      0.0, "sod", "cof"});
      rows.push_back({"cof",
                      {{"c5", 0.15}, {"c10", 0.15}, {"c15", 0.15}, {"c20", 0.15}, {"c25", 0.15},
                       {"bis", 0.05}, {"sod", 0.05}},
                      0.15, "", ""});
      rows.push_back({"bis",
                      {{"c5", 0.15}, {"c10", 0.15}, {"c15", 0.15}, {"c20", 0.15}, {"c25", 0.15},
                       {"cof", 0.05}, {"sod", 0.05}},
                      0.15, "", ""});
      rows.push_back({"sod",
                      {{"c5", 0.13}, {"c10", 0.13}, {"c15", 0.13}, {"c20", 0.13}, {"c25", 0.13},
                       {"cof", 0.05}, {"bis", 0.05}},
                      0.25, "", ""});
      return build_automaton("vending_machine", states, "start", rows,
                             {"+5", "+10", "+15", "+20", "+25", "coffee", "biscuit", "soda"});
    }();
    return a;
  }

 protected:
  // Walk that only emits purchase tokens the running balance can cover.
  std::vector<VmToken> sample_ops(const Automaton& shifted, Rng& rng) const {
    std::vector<VmToken> ops;
    long long balance = 0;
    int state = shifted.start;
    for (int steps = 0; steps < 400; ++steps) {
      int next = -2;
      for (int attempt = 0; attempt < 16; ++attempt) {
        int cand = draw_step(shifted, state, rng);
        if (cand < 0) {
          next = -1;
          break;
        }
        VmToken tok = vm_token_from_text(shifted.emissions[cand][0]);
        if (tok.signed_value < 0 && balance + tok.signed_value < 0) continue;
        next = cand;
        break;
      }
      if (next == -2) {
        // All draws hit unaffordable items; fall back to the row's coin mass.
        const TransitionRow& row = shifted.rows[state];
        std::vector<double> masked(row.weights.size(), 0.0);
        for (std::size_t j = 0; j < row.weights.size(); ++j) {
          if (row.weights[j] <= 0.0 || shifted.emissions[j].empty()) continue;
          if (vm_token_from_text(shifted.emissions[j][0]).signed_value >= 0) {
            masked[j] = row.weights[j];
          }
        }
        next = static_cast<int>(rng.pick_weighted(masked));
      }
      if (next == -1) break;
      VmToken tok = vm_token_from_text(shifted.emissions[next][0]);
      balance += tok.signed_value;
      ops.push_back(tok);
      state = next;
    }
    return ops;
  }

  static std::string ops_text(const std::vector<VmToken>& ops) {
    std::vector<std::string> texts;
    texts.reserve(ops.size());
    for (const VmToken& op : ops) texts.push_back(op.text);
    return join(texts, ",");
  }

  std::vector<std::string> protected_literals() const override {
    return {"+5", "+10", "+15", "+20", "+25", "coffee", "biscuit", "soda", "|"};
  }
};

class VmVerifyTask final : public VmTaskBase {
 public:
  TaskId id() const override { return TaskId::vm_verify; }

  long long oracle(const std::string& input) const override {
    detail::VmInput in = detail::parse_vm_input(input, true);
    return oracle_vm_verify(0, in.ops, in.target);
  }

  GeneratedInstance generate(const Automaton& shifted, int label_target,
                             Rng& rng) const override {
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::vector<VmToken> ops = sample_ops(shifted, rng);
      if (ops.empty()) continue;
      long long bf = vm_sum(0, ops);
      int want = coin_want(label_target, rng);
      if (want == 0) {
        static const int kOffsets[] = {-25, -20, -15, -10, -5, 5, 10, 15, 20, 25};
        bf += kOffsets[rng.index(10)];
      }
      std::string input = ops_text(ops) + "|" + std::to_string(bf);
      return {input, want};
    }
    starve(*this, label_target);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_vm(input, true);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    std::vector<std::string> parts = split(input, '|');
    if (parts.size() != 2) throw MalformedInstanceError("vending machine input needs OPERATIONS|FINAL");
    std::vector<std::string> out = split(parts[0], ',');
    out.emplace_back("|");
    for (char c : parts[1]) out.emplace_back(1, c);
    return out;
  }

  std::vector<std::pair<std::string, int>> symbol_table() const override {
    std::vector<std::pair<std::string, int>> table{
        {"+5", 1},     {"+10", 2},    {"+15", 3}, {"+20", 4}, {"+25", 5},
        {"coffee", 6}, {"biscuit", 7}, {"soda", 8}, {"|", 9},  {"-", 20}};
    for (int d = 0; d <= 9; ++d) table.push_back({std::string(1, static_cast<char>('0' + d)), 10 + d});
    return table;
  }
};

class VmSumTask final : public VmTaskBase {
 public:
  TaskId id() const override { return TaskId::vm_sum; }
  bool binary() const override { return false; }

  long long oracle(const std::string& input) const override {
    detail::VmInput in = detail::parse_vm_input(input, false);
    return vm_sum(0, in.ops);
  }

  GeneratedInstance generate(const Automaton& shifted, int /*label_target*/,
                             Rng& rng) const override {
    for (int attempt = 0; attempt < kInnerAttempts; ++attempt) {
      std::vector<VmToken> ops = sample_ops(shifted, rng);
      if (ops.empty()) continue;
      return {ops_text(ops), vm_sum(0, ops)};
    }
    starve(*this, -1);
  }

  std::string cot_trace(const std::string& input) const override {
    return detail::cot_vm(input, false);
  }

  std::string description_prompt() const override {
    return detail::description_prompt_for(id());
  }
  std::string direct_encoding_prompt() const override {
    return detail::direct_encoding_prompt_for(id());
  }

  std::vector<std::string> tokenize(const std::string& input) const override {
    return split(input, ',');
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

std::string_view task_name(TaskId id) {
  switch (id) {
    case TaskId::parity: return "parity";
    case TaskId::pattern_matching: return "pattern_matching";
    case TaskId::reversal: return "reversal";
    case TaskId::stack: return "stack";
    case TaskId::hamiltonian: return "hamiltonian";
    case TaskId::maze_complete: return "maze_complete";
    case TaskId::maze_solve: return "maze_solve";
    case TaskId::vm_verify: return "vm_verify";
    case TaskId::vm_sum: return "vm_sum";
  }
  return "parity";
}

TaskId task_from_name(std::string_view name) {
  for (TaskId id : all_task_ids()) {
    if (task_name(id) == name) return id;
  }
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

const std::vector<TaskId>& all_task_ids() {
  static const std::vector<TaskId> ids{
      TaskId::parity,       TaskId::pattern_matching, TaskId::reversal,
      TaskId::stack,        TaskId::hamiltonian,      TaskId::maze_complete,
      TaskId::maze_solve,   TaskId::vm_verify,        TaskId::vm_sum};
  return ids;
}

const Task& get_task(TaskId id) {
  static const ParityTask parity;
  static const PatternTask pattern;
  static const ReversalTask reversal;
  static const StackTask stack;
  static const HamiltonianTask hamiltonian;
  static const MazeCompleteTask maze_complete;
  static const MazeSolveTask maze_solve;
  static const VmVerifyTask vm_verify;
  static const VmSumTask vm_sum;
  switch (id) {
    case TaskId::parity: return parity;
    case TaskId::pattern_matching: return pattern;
    case TaskId::reversal: return reversal;
    case TaskId::stack: return stack;
    case TaskId::hamiltonian: return hamiltonian;
    case TaskId::maze_complete: return maze_complete;
    case TaskId::maze_solve: return maze_solve;
    case TaskId::vm_verify: return vm_verify;
    case TaskId::vm_sum: return vm_sum;
  }
  throw Error("unknown task id");
}

TaskInstance generate_instance(const Task& task, const Automaton& shifted, int label_target,
                               std::uint64_t seed) {
  Rng rng(seed);
  for (int tries = 0; tries < kGenerationBudget; ++tries) {
    GeneratedInstance g = task.generate(shifted, label_target, rng);
    if (label_target >= 0 && g.gold != label_target) continue;
    if (task.oracle(g.input) != g.gold) {
      throw Error("task " + std::string(task.name()) + ": generator/oracle disagreement");
    }
    TaskInstance inst;
    inst.task = task.id();
    inst.input = g.input;
    inst.gold = g.gold;
    inst.delta = shifted.delta;
    inst.seed = seed;
    return inst;
  }
  throw GenerationStarvationError("task " + std::string(task.name()) +
                                  ": rejection budget exhausted for label " +
                                  std::to_string(label_target));
}

TaskInstance generate_instance(TaskId task, double delta, int label_target, std::uint64_t seed) {
  const Task& t = get_task(task);
  Automaton shifted = shift(t.base_automaton(), delta);
  return generate_instance(t, shifted, label_target, seed);
}

}  // namespace icl
