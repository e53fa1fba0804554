#include <algorithm>
#include <string>
#include <vector>

#include "icl/errors.hpp"
#include "icl/task.hpp"

namespace icl {

const std::vector<std::string> kReversalAlphabet = {
    "gfx", "chtte", "%", "ltintprk", "¯\\_(ツ)_/¯"};

int oracle_parity(std::string_view bits) {
  long long zeros = 0;
  for (char c : bits) {
    if (c == '0') {
      ++zeros;
    } else if (c != '1') {
      throw MalformedInstanceError("parity input contains foreign character");
    }
  }
  return zeros % 2 == 0 ? 1 : 0;
}

int oracle_pattern(std::string_view s) {
  for (char c : s) {
    if (c != 'a' && c != 'b' && c != 'c') {
      throw MalformedInstanceError("pattern input contains foreign character");
    }
  }
  return s.find(kPattern) != std::string_view::npos ? 1 : 0;
}

int oracle_reversal(const std::vector<std::string>& tokens) {
  std::vector<std::string> left, right;
  int hash_count = 0;
  for (const std::string& tok : tokens) {
    if (tok == "#") {
      ++hash_count;
      continue;
    }
    if (std::find(kReversalAlphabet.begin(), kReversalAlphabet.end(), tok) ==
        kReversalAlphabet.end()) {
      throw MalformedInstanceError("reversal tape contains foreign token '" + tok + "'");
    }
    (hash_count == 0 ? left : right).push_back(tok);
  }
  if (hash_count != 1) {
    throw MalformedInstanceError("reversal tape must contain exactly one '#'");
  }
  if (left.size() != right.size()) return 0;
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left[i] != right[right.size() - 1 - i]) return 0;
  }
  return 1;
}

std::string_view stack_op_name(StackOp op) {
  switch (op) {
    case StackOp::push0: return "push(0)";
    case StackOp::push1: return "push(1)";
    case StackOp::pop: return "pop";
    case StackOp::stop: return "stop";
    case StackOp::empty_check: return "empty";
  }
  return "pop";
}

StackOp stack_op_from_name(std::string_view name) {
  for (StackOp op : {StackOp::push0, StackOp::push1, StackOp::pop, StackOp::stop,
                     StackOp::empty_check}) {
    if (stack_op_name(op) == name) return op;
  }
  throw MalformedInstanceError("unknown stack operation '" + std::string(name) + "'");
}

// Rightmost character is the top of the stack. Execution halts at the first
// 'stop'. Ungrammatical runs (pop on empty, growth past the capacity cap,
// 'empty' asserted on a non-empty stack) force label 0.
int oracle_stack(std::string_view s0, const std::vector<StackOp>& ops, std::string_view sf,
                 std::size_t capacity) {
  for (char c : s0) {
    if (c != '0' && c != '1') throw MalformedInstanceError("stack string contains foreign character");
  }
  for (char c : sf) {
    if (c != '0' && c != '1') throw MalformedInstanceError("stack string contains foreign character");
  }
  std::string stack(s0);
  for (StackOp op : ops) {
    switch (op) {
      case StackOp::push0:
      case StackOp::push1:
        if (stack.size() >= capacity) return 0;
        stack.push_back(op == StackOp::push0 ? '0' : '1');
        break;
      case StackOp::pop:
        if (stack.empty()) return 0;
        stack.pop_back();
        break;
      case StackOp::empty_check:
        if (!stack.empty()) return 0;
        break;
      case StackOp::stop:
        return stack == sf ? 1 : 0;
    }
  }
  return stack == sf ? 1 : 0;
}

int oracle_hamiltonian(const Digraph& g, const std::vector<int>& path) {
  for (int v : path) {
    if (v < 0 || v >= g.n) throw MalformedInstanceError("hamiltonian path vertex out of range");
  }
  if (static_cast<int>(path.size()) != g.n) return 0;
  std::vector<bool> seen(g.n, false);
  for (int v : path) {
    if (seen[v]) return 0;
    seen[v] = true;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!g.edge(path[i], path[i + 1])) return 0;
  }
  return 1;
}

VmToken vm_token_from_text(std::string_view text) {
  if (text == "coffee") return {"coffee", -kPriceCoffee};
  if (text == "biscuit") return {"biscuit", -kPriceBiscuit};
  if (text == "soda") return {"soda", -kPriceSoda};
  if (text.size() >= 2 && text[0] == '+') {
    long long value = 0;
    for (std::size_t i = 1; i < text.size(); ++i) {
      if (text[i] < '0' || text[i] > '9') {
        throw MalformedInstanceError("unknown vending machine token '" + std::string(text) + "'");
      }
      value = value * 10 + (text[i] - '0');
    }
    return {std::string(text), value};
  }
  throw MalformedInstanceError("unknown vending machine token '" + std::string(text) + "'");
}

long long vm_sum(long long b0, const std::vector<VmToken>& ops) {
  long long balance = b0;
  for (const VmToken& op : ops) balance += op.signed_value;
  return balance;
}

int oracle_vm_verify(long long b0, const std::vector<VmToken>& ops, long long bf) {
  return vm_sum(b0, ops) == bf ? 1 : 0;
}

}  // namespace icl
