#include "icl/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "icl/errors.hpp"
#include "icl/sha256.hpp"
#include "icl/text.hpp"

namespace icl {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Symbols may contain spaces (maze glyphs) and the separators used by the
// key/value document, so those characters are percent-escaped.
std::string encode_symbol(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '%': out += "%25"; break;
      case ' ': out += "%20"; break;
      case '\n': out += "%0A"; break;
      case '=': out += "%3D"; break;
      case ',': out += "%2C"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string decode_symbol(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      std::string hex(s.substr(i + 1, 2));
      out.push_back(static_cast<char>(std::stoi(hex, nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

int Automaton::state_index(std::string_view state_name) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == state_name) return static_cast<int>(i);
  }
  return -1;
}

void Automaton::validate() const {
  const std::size_t n = states.size();
  if (n == 0) throw Error("automaton '" + name + "': no states");
  if (rows.size() != n || emissions.size() != n) {
    throw Error("automaton '" + name + "': rows/emissions do not match state count");
  }
  if (start < 0 || static_cast<std::size_t>(start) >= n) {
    throw Error("automaton '" + name + "': start state out of range");
  }
  std::set<std::string> alpha(alphabet.begin(), alphabet.end());
  for (std::size_t i = 0; i < n; ++i) {
    const TransitionRow& row = rows[i];
    if (row.weights.size() != n) {
      throw Error("automaton '" + name + "': row '" + states[i] + "' has wrong width");
    }
    double sum = row.stop;
    if (row.stop < 0.0) throw Error("automaton '" + name + "': negative stop weight");
    for (double w : row.weights) {
      if (w < 0.0) throw Error("automaton '" + name + "': negative weight in row '" + states[i] + "'");
      sum += w;
    }
    if (std::fabs(sum - 1.0) > kRowSumTolerance) {
      throw Error("automaton '" + name + "': row '" + states[i] + "' sums to " + format_double(sum));
    }
    for (const std::string& sym : emissions[i]) {
      if (!alpha.count(sym)) {
        throw Error("automaton '" + name + "': state '" + states[i] + "' emits symbol outside alphabet");
      }
    }
    if (row.donor >= 0 || row.recipient >= 0) {
      if (row.donor < 0 || row.recipient < 0 || row.donor == row.recipient ||
          static_cast<std::size_t>(row.donor) >= n || static_cast<std::size_t>(row.recipient) >= n) {
        throw Error("automaton '" + name + "': bad donor/recipient designation in row '" + states[i] + "'");
      }
    }
  }
  // Reachability sweep: every reachable state needs outgoing mass or stop > 0.
  std::vector<bool> seen(n, false);
  std::vector<int> frontier{start};
  seen[start] = true;
  while (!frontier.empty()) {
    int s = frontier.back();
    frontier.pop_back();
    double out = rows[s].stop;
    for (std::size_t j = 0; j < n; ++j) {
      if (rows[s].weights[j] > 0.0) {
        out += rows[s].weights[j];
        if (!seen[j]) {
          seen[j] = true;
          frontier.push_back(static_cast<int>(j));
        }
      }
    }
    if (out <= 0.0) {
      throw Error("automaton '" + name + "': reachable state '" + states[s] + "' has no exit");
    }
  }
}

Automaton shift(const Automaton& base, double delta) {
  if (delta < 0.0 || delta >= 1.0) {
    throw InfeasibleShiftError("shift delta must lie in [0, 1), got " + format_double(delta));
  }
  Automaton out = base;
  out.delta = delta;
  if (delta == 0.0) return out;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    TransitionRow& row = out.rows[i];
    if (row.donor < 0) continue;
    double d = row.weights[row.donor] - delta;
    double r = row.weights[row.recipient] + delta;
    if (d < 0.0 || r > 1.0) {
      throw InfeasibleShiftError("automaton '" + base.name + "': row '" + base.states[i] +
                                 "' lacks headroom for delta " + format_double(delta));
    }
    row.weights[row.donor] = d;
    row.weights[row.recipient] = r;
  }
  out.validate();
  return out;
}

double sup_distance(const Automaton& p, const Automaton& q) {
  if (p.states != q.states) {
    throw IncomparableAutomataError("sup_distance: state sets differ ('" + p.name + "' vs '" +
                                    q.name + "')");
  }
  double max_abs = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    for (std::size_t j = 0; j < p.states.size(); ++j) {
      max_abs = std::max(max_abs, std::fabs(p.rows[i].weights[j] - q.rows[i].weights[j]));
    }
    max_abs = std::max(max_abs, std::fabs(p.rows[i].stop - q.rows[i].stop));
  }
  return max_abs;
}

int draw_step(const Automaton& a, int state, Rng& rng) {
  const TransitionRow& row = a.rows[state];
  double x = rng.next_double();
  for (std::size_t j = 0; j < row.weights.size(); ++j) {
    x -= row.weights[j];
    if (x < 0.0) return static_cast<int>(j);
  }
  return -1;  // stop draw (also absorbs any 1e-16 rounding slack)
}

std::vector<std::string> sample_symbols(const Automaton& a, Rng& rng, std::size_t cap) {
  std::vector<std::string> out;
  int state = a.start;
  std::size_t steps = 0;
  while (true) {
    int next = draw_step(a, state, rng);
    if (next < 0) return out;
    state = next;
    for (const std::string& sym : a.emissions[state]) out.push_back(sym);
    ++steps;
    if (out.size() > cap || steps > cap + 16) {
      throw GenerationOverflowError("automaton '" + a.name + "': walk exceeded " +
                                    std::to_string(cap) + " symbols");
    }
  }
}

std::vector<std::string> sample_string(const Automaton& a, std::uint64_t seed) {
  Rng rng(seed);
  return sample_symbols(a, rng);
}

std::string serialize(const Automaton& a) {
  std::ostringstream out;
  out << "automaton " << a.name << "\n";
  out << "delta " << format_double(a.delta) << "\n";
  out << "start " << a.states[a.start] << "\n";
  out << "alphabet";
  for (const std::string& sym : a.alphabet) out << " " << encode_symbol(sym);
  out << "\n";
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    out << "state " << a.states[i];
    if (!a.emissions[i].empty()) {
      out << " emit=";
      for (std::size_t k = 0; k < a.emissions[i].size(); ++k) {
        if (k > 0) out << ",";
        out << encode_symbol(a.emissions[i][k]);
      }
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const TransitionRow& row = a.rows[i];
    out << "row " << a.states[i];
    for (std::size_t j = 0; j < row.weights.size(); ++j) {
      if (row.weights[j] != 0.0) out << " " << a.states[j] << "=" << format_double(row.weights[j]);
    }
    if (row.stop != 0.0) out << " stop=" << format_double(row.stop);
    if (row.donor >= 0) {
      out << " donor=" << a.states[row.donor] << " recipient=" << a.states[row.recipient];
    }
    out << "\n";
  }
  return out.str();
}

Automaton parse_automaton(std::string_view text) {
  Automaton a;
  std::vector<std::string> lines = split(text, '\n');
  // First pass collects the state list so rows can be sized.
  for (const std::string& line : lines) {
    std::vector<std::string> parts = split(std::string(trim(line)), ' ');
    if (parts.size() >= 2 && parts[0] == "state") a.states.push_back(parts[1]);
  }
  const std::size_t n = a.states.size();
  a.rows.assign(n, TransitionRow{std::vector<double>(n, 0.0), 0.0, -1, -1});
  a.emissions.assign(n, {});
  std::string start_name;
  for (const std::string& raw : lines) {
    std::string line(trim(raw));
    if (line.empty()) continue;
    std::vector<std::string> parts = split(line, ' ');
    const std::string& key = parts[0];
    if (key == "automaton" && parts.size() >= 2) {
      a.name = parts[1];
    } else if (key == "delta" && parts.size() >= 2) {
      a.delta = std::stod(parts[1]);
    } else if (key == "start" && parts.size() >= 2) {
      start_name = parts[1];
    } else if (key == "alphabet") {
      for (std::size_t i = 1; i < parts.size(); ++i) a.alphabet.push_back(decode_symbol(parts[i]));
    } else if (key == "state" && parts.size() >= 2) {
      int idx = a.state_index(parts[1]);
      for (std::size_t i = 2; i < parts.size(); ++i) {
        if (parts[i].rfind("emit=", 0) == 0) {
          for (const std::string& sym : split(parts[i].substr(5), ',')) {
            a.emissions[idx].push_back(decode_symbol(sym));
          }
        }
      }
    } else if (key == "row" && parts.size() >= 2) {
      int idx = a.state_index(parts[1]);
      if (idx < 0) throw Error("parse_automaton: unknown row state '" + parts[1] + "'");
      TransitionRow& row = a.rows[idx];
      for (std::size_t i = 2; i < parts.size(); ++i) {
        std::size_t eq = parts[i].find('=');
        if (eq == std::string::npos) throw Error("parse_automaton: bad row entry '" + parts[i] + "'");
        std::string field = parts[i].substr(0, eq);
        std::string value = parts[i].substr(eq + 1);
        if (field == "stop") {
          row.stop = std::stod(value);
        } else if (field == "donor") {
          row.donor = a.state_index(value);
        } else if (field == "recipient") {
          row.recipient = a.state_index(value);
        } else {
          int col = a.state_index(field);
          if (col < 0) throw Error("parse_automaton: unknown successor '" + field + "'");
          row.weights[col] = std::stod(value);
        }
      }
    } else {
      throw Error("parse_automaton: unrecognised line '" + line + "'");
    }
  }
  a.start = a.state_index(start_name);
  a.validate();
  return a;
}

std::string fingerprint(const Automaton& a) { return Sha256::hex(serialize(a)); }

}  // namespace icl
