#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "icl/rng.hpp"

namespace icl {

// One transition row: weights over successor states plus a stop weight.
// donor/recipient designate the entry pair used by shift(); rows without a
// designation are left untouched by any shift.
struct TransitionRow {
  std::vector<double> weights;
  double stop = 0.0;
  int donor = -1;
  int recipient = -1;
};

// Probabilistic generator automaton. Entering a state appends that state's
// emission to the output; the walk halts when the stop weight is drawn.
// Immutable after construction, so concurrent sampling needs no locks as long
// as each sampler brings its own Rng.
struct Automaton {
  std::string name;
  std::vector<std::string> states;
  int start = 0;
  std::vector<TransitionRow> rows;
  std::vector<std::vector<std::string>> emissions;
  std::vector<std::string> alphabet;
  double delta = 0.0;  // shift applied relative to the base table

  int state_index(std::string_view state_name) const;

  // Throws Error when a structural invariant is broken: row sums off by more
  // than 1e-12, negative weights, dangling start, or a reachable state with
  // no outgoing mass and no stop weight.
  void validate() const;
};

inline constexpr std::size_t kWalkSymbolCap = 10000;

// Moves exactly `delta` of mass from each designated donor entry to its
// recipient. Never rescales, so sup_distance(base, shift(base, d)) == d
// whenever at least one row is designated.
Automaton shift(const Automaton& base, double delta);

// max_ij |p_ij - q_ij| over all transition entries including the stop column.
double sup_distance(const Automaton& p, const Automaton& q);

// One transition draw from `state`; returns the successor index or -1 for stop.
int draw_step(const Automaton& a, int state, Rng& rng);

// Full walk from the start state. Throws GenerationOverflowError when the
// emitted sequence exceeds `cap` symbols.
std::vector<std::string> sample_symbols(const Automaton& a, Rng& rng,
                                        std::size_t cap = kWalkSymbolCap);
std::vector<std::string> sample_string(const Automaton& a, std::uint64_t seed);

// Plain-text key/value document; parse_automaton() inverts it exactly.
std::string serialize(const Automaton& a);
Automaton parse_automaton(std::string_view text);

// SHA-256 of the serialized form; stored in dataset manifests for audit.
std::string fingerprint(const Automaton& a);

}  // namespace icl
